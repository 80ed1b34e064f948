#include <cmath>

#include "doctest.h"
#include "mulpart/asymptotics.hpp"
#include "mulpart/catalog.hpp"
#include "mulpart/errors.hpp"

using namespace mulpart;
namespace cat = mulpart::catalog;

namespace {

// Li2 by brute-force series, independent of the library's reflection formulas.
double li2_series(double y) {
  long double s = 0.0L, p = 1.0L;
  for (int k = 1; k < 200000; ++k) {
    p *= y;
    s += p / ((long double)k * k);
  }
  return double(s);
}

}  // namespace

TEST_CASE("name parsing") {
  auto s = cat::parse(" Weighted( y = 2 ) ");
  CHECK(s.name == "weighted");
  REQUIRE(s.args.size() == 1);
  CHECK(s.args[0].first == "y");
  CHECK(s.args[0].second == "2");
  s = cat::parse("gibbs(1, 0.5)");
  CHECK(s.args.size() == 2);
  CHECK(s.args[1].first.empty());
  CHECK_THROWS_AS(cat::parse("gibbs(1"), ParamError);
}

TEST_CASE("catalog entries build with the expected regimes") {
  CHECK(cat::make("uniform").regime() == Regime::ErgodicPoleAtOne);
  CHECK(cat::make("weighted(y=0.5)").regime() == Regime::ErgodicSupercritical);
  CHECK(cat::make("weighted(2)").regime() == Regime::NonergodicGrandCanonical);
  CHECK(cat::make("gibbs(theta=1,beta=1)").regime() == Regime::ErgodicSupercritical);
  CHECK(cat::make("ordered_lists").regime() == Regime::ErgodicSupercritical);
  CHECK(cat::make("ewens(1)").regime() == Regime::OutOfScope);
  CHECK(cat::make("restricted(odds)").regime() == Regime::ErgodicPoleAtOne);
  CHECK(cat::make("restricted(evens)").regime() == Regime::OutOfScope);
  CHECK(cat::make("restricted(1,2,5)").regime() == Regime::OutOfScope);
  CHECK(cat::make("restricted(mod=3,res=1|2)").b(3) == 0.0);
  CHECK(cat::make("restricted(mod=3,res=1|2)").b(4) == 1.0);
  for (const char* n : {"uniform", "weighted(0.5)", "weighted(3)", "gibbs(2,0.5)", "ordered_lists", "ewens(2)",
                        "restricted(odds)"}) {
    const auto en = cat::entry(n);
    CHECK(en.ensemble.regime() == en.expected_regime);
  }
  CHECK_THROWS_AS(cat::make("bogus"), UnknownNameError);
  CHECK_THROWS_AS(cat::make("weighted(y=0)"), ParamError);
  CHECK_THROWS_AS(cat::make("gibbs(1,0)"), ParamError);
  CHECK_THROWS_AS(cat::make("restricted()"), ParamError);
  CHECK_THROWS_AS(cat::make("weighted(y=abc)"), ParamError);
}

TEST_CASE("gibbs with theta != 1 trades b_1 into f") {
  const Ensemble e = cat::make("gibbs(theta=2,beta=0.5)");
  CHECK(e.b(1) == 1.0);
  CHECK(e.b(4) == doctest::Approx(0.5));
  // E_x N = theta sum k^beta x^k regardless of the trade
  double direct = 0.0;
  for (int k = 1; k < 2000; ++k) direct += 2.0 * std::pow(k, 0.5) * std::pow(0.7, k);
  CHECK(mean_N(e, 0.7) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("dilogarithm") {
  for (double y : {-3.0, -0.8, -0.3, 0.1, 0.5, 0.7, 0.95})
    if (std::abs(y) < 1.0) CHECK(cat::dilog(y) == doctest::Approx(li2_series(y)).epsilon(1e-13));
  CHECK(cat::dilog(0.5) == doctest::Approx(M_PI * M_PI / 12.0 - 0.5 * std::log(2.0) * std::log(2.0)).epsilon(1e-15));
  CHECK(cat::dilog(-3.0) == doctest::Approx(-1.9393754207667089531).epsilon(1e-13));
  CHECK(cat::dilog(1.0) == doctest::Approx(M_PI * M_PI / 6.0));
  CHECK_THROWS_AS(cat::dilog(1.5), DomainError);
}

TEST_CASE("omega references match quadrature") {
  for (const char* n : {"uniform", "weighted(0.5)", "weighted(0.9)", "gibbs(1,1)", "gibbs(2,0.5)", "gibbs(0.7,2.5)"}) {
    const auto en = cat::entry(n);
    REQUIRE(en.omega);
    CHECK(omega(en.ensemble) == doctest::Approx(*en.omega).epsilon(1e-10));
  }
}

TEST_CASE("reference shapes") {
  CHECK(*cat::reference_shape("uniform", std::log(2.0)) == doctest::Approx(6.0 / (M_PI * M_PI) * std::log(2.0)).epsilon(1e-12));
  CHECK(*cat::reference_shape("gibbs(1,1)", 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(*cat::reference_shape("weighted(0.5)", 0.0) == doctest::Approx(1.19048).epsilon(1e-5));
  CHECK_FALSE(cat::reference_shape("restricted(odds)", 1.0));
  CHECK_FALSE(cat::reference_shape("ewens(1)", 1.0));
  for (const char* n : {"uniform", "weighted(0.5)", "gibbs(1,1)", "gibbs(1,0.5)", "gibbs(3,2)", "ordered_lists"}) {
    const Ensemble e = cat::make(n);
    const double om = omega(e);
    for (double t : {0.1, 0.5, 1.0, 2.0, 4.0})
      CHECK(std::abs(limit_shape(e, t, om) - *cat::reference_shape(n, t)) < 1e-6);
  }
}

TEST_CASE("symmetric rescale reproduces the c = pi/sqrt(6) curve") {
  const double om = M_PI * M_PI / 6.0, c = M_PI / std::sqrt(6.0);
  for (double t : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    const auto [s, psi] = cat::symmetric_rescale(t, *cat::reference_shape("uniform", t), om);
    CHECK(std::exp(-c * psi) + std::exp(-c * s) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("scaling factors agree with the closed forms at n = 1e6") {
  for (const char* n : {"uniform", "weighted(0.5)", "gibbs(1,1)", "gibbs(2,0.5)", "ordered_lists"}) {
    const double ratio = scaling_alpha(cat::make(n), 1'000'000) / *cat::reference_alpha(n, 1'000'000);
    CHECK(std::abs(ratio - 1.0) < 0.05);
  }
}
