#include <cmath>

#include "doctest.h"
#include "mulpart/asymptotics.hpp"
#include "mulpart/errors.hpp"

using namespace mulpart;

namespace {

const double kPi = 3.14159265358979323846;

Ensemble uniform() { return Ensemble(SeriesFunction::geometric(1.0), WeightSequence::constant()); }
Ensemble weighted(double y) { return Ensemble(SeriesFunction::geometric(y), WeightSequence::constant()); }
Ensemble gibbs(double th, double be) {
  return Ensemble(SeriesFunction::exponential(), WeightSequence::power_density(th, be));
}

double li2_series(double y) {
  double s = 0.0, p = 1.0;
  for (int j = 1; j < 400; ++j) {
    p *= y;
    s += p / (double(j) * j);
  }
  return s;
}

}  // namespace

TEST_CASE("omega closed forms") {
  CHECK(std::abs(omega(uniform()) - kPi * kPi / 6) < 1e-9);
  CHECK(li2_series(0.5) == doctest::Approx(0.582241).epsilon(1e-6));
  CHECK(std::abs(omega(weighted(0.5)) - li2_series(0.5)) < 1e-9);
  CHECK(std::abs(omega(weighted(0.9)) - li2_series(0.9)) < 1e-9);
  // h = 1: Omega = Gamma(beta + 2) - Gamma(beta + 1)
  CHECK(std::abs(omega(gibbs(1, 1)) - 1.0) < 1e-9);
  CHECK(std::abs(omega(gibbs(1, 0.5)) - (std::tgamma(2.5) - std::tgamma(1.5))) < 1e-9);
}

TEST_CASE("omega requires an ergodic regime") {
  CHECK_THROWS_AS(omega(weighted(2.0)), RegimeError);
  CHECK_THROWS_AS(sigma_sq(weighted(2.0)), RegimeError);
}

TEST_CASE("sigma squared") {
  CHECK(std::abs(sigma_sq(uniform()) - kPi * kPi / 3) < 1e-8);
  for (const auto& e : {uniform(), weighted(0.5), gibbs(1, 1), gibbs(2, 0.5)}) {
    const double s = sigma_sq(e);
    CHECK(s > 0.0);
    CHECK(s == doctest::Approx((e.beta() + 1) * omega(e)).epsilon(1e-6));
  }
  const Ensemble pois(SeriesFunction::exponential(), WeightSequence::constant());
  const double x = 0.999;
  CHECK(sigma_sq(pois) == doctest::Approx(std::pow(1 - x, 3) * var_N(pois, x)).epsilon(0.02));
}

TEST_CASE("limit shape closed forms") {
  const double ln2 = std::log(2.0);
  CHECK(limit_shape(uniform(), ln2) == doctest::Approx(6 / (kPi * kPi) * ln2).epsilon(1e-9));
  CHECK(limit_shape(uniform(), ln2) == doctest::Approx(0.421383).epsilon(1e-6));
  for (double t : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    CHECK(std::abs(limit_shape(uniform(), t) + 6 / (kPi * kPi) * std::log1p(-std::exp(-t))) < 1e-8);
    CHECK(std::abs(limit_shape(gibbs(1, 1), t) - std::exp(-t)) < 1e-8);
    const double w = -std::log1p(-0.5 * std::exp(-t)) / li2_series(0.5);
    CHECK(std::abs(limit_shape(weighted(0.5), t) - w) < 1e-8);
  }
  CHECK(std::abs(limit_shape(weighted(0.5), 0.0) - std::log(2.0) / li2_series(0.5)) < 1e-8);
}

TEST_CASE("phi at zero") {
  CHECK(phi_at_zero_infinite(uniform()));
  CHECK_FALSE(phi_at_zero_infinite(weighted(0.5)));
  CHECK_FALSE(phi_at_zero_infinite(Ensemble(SeriesFunction::geometric(1.0), WeightSequence::power_law(1, 2))));
  CHECK_THROWS_AS(limit_shape(uniform(), 0.0), DomainError);
}

TEST_CASE("limit shape is nonincreasing and has unit mass") {
  for (const auto& e : {uniform(), weighted(0.5), gibbs(1, 1), gibbs(1, 0.5)}) {
    const auto c = shape_curve(e, 12.0, 1000);
    for (std::size_t i = 1; i < c.grid.size(); ++i) CHECK(c.grid[i].second <= c.grid[i - 1].second + 1e-12);
    CHECK(shape_mass(e) == doctest::Approx(1.0).epsilon(1e-6));
  }
  // Curve with finite phi(0): trapezoid plus tail is accurate.
  const auto c = shape_curve(weighted(0.5), 30.0, 3000);
  CHECK(curve_mass(c) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("mean asymptotics approach omega") {
  for (const auto& e : {uniform(), Ensemble(SeriesFunction::geometric(1.0), WeightSequence::power_law(2.0, 0.5))}) {
    const double om = omega(e);
    double prev_gap = INFINITY;
    for (int j = 2; j <= 4; ++j) {
      const double x = 1 - std::pow(10.0, -j);
      const double r = std::pow(1 - x, e.beta() + 1) * mean_N(e, x) / e.theta();
      const double gap = std::abs(r - om) / om;
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    CHECK(prev_gap < 0.01);
  }
  const double x = 0.999;
  CHECK(std::pow(1 - x, 3) * var_N(uniform(), x) == doctest::Approx(sigma_sq(uniform())).epsilon(0.01));
}

TEST_CASE("shape matches partial tails of the mean") {
  const auto e = uniform();
  const double x = 0.999, om = omega(e);
  for (double t : {0.5, 1.0, 2.0}) {
    double tail = 0.0;
    for (long long k = (long long)std::floor(t / (1 - x)) + 1; k < 100000; ++k) tail += mean_count(e, k, x);
    CHECK((1 - x) * tail == doctest::Approx(om * limit_shape(e, t, om)).epsilon(0.02));
  }
}

TEST_CASE("tilt solver for the uniform measure") {
  const auto e = uniform();
  const auto s = solve_tilt(e, 100);
  CHECK(s.residual <= 1e-8);
  CHECK(s.x > 0.85);
  CHECK(s.x < 0.90);
  // Independent bisection on sum k x^k / (1 - x^k) = 100.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    double m = 0.0;
    for (int k = 1; k < 5000; ++k) m += k * std::pow(mid, k) / (1 - std::pow(mid, k));
    (m < 100 ? lo : hi) = mid;
  }
  CHECK(s.x == doctest::Approx(lo).epsilon(1e-12));
  for (std::size_t i = 1; i < s.residual_history.size(); ++i)
    CHECK(s.residual_history[i] < s.residual_history[i - 1]);

  const long long n = 1000000;
  const auto big = solve_tilt(e, n);
  CHECK(big.residual <= 1e-10 * n);
  const double ratio = big.tau / (kPi / std::sqrt(6.0 * n));
  CHECK(ratio >= 0.95);
  CHECK(ratio <= 1.05);
  CHECK(scaling_alpha(e, n) == doctest::Approx(std::sqrt(6.0 * n) / kPi).epsilon(0.05));
}

TEST_CASE("tilt solver on the nonergodic side") {
  const auto s = solve_tilt(weighted(2.0), 10000);
  CHECK(s.x < 0.5);
  CHECK((0.5 - s.x) * 10000 == doctest::Approx(0.5).epsilon(0.1));
  CHECK_THROWS_AS(scaling_alpha(weighted(2.0), 100), RegimeError);
}

TEST_CASE("gibbs scaling is sqrt(n)") {
  CHECK(scaling_alpha(gibbs(1, 1), 10000) == doctest::Approx(100.0).epsilon(0.05));
  const double th = 2.0, be = 0.5;
  const long long n = 1000000;
  const double ref = std::pow(th * std::tgamma(be + 1), -1 / (be + 1)) * std::pow(double(n), 1 / (be + 1));
  CHECK(scaling_alpha(gibbs(th, be), n) == doctest::Approx(ref).epsilon(0.05));
}

TEST_CASE("tilt residuals on several ensembles") {
  for (const auto& e : {uniform(), weighted(0.5), gibbs(1, 1), gibbs(2, 0.5)}) {
    for (long long n : {100LL, 10000LL, 1000000LL}) {
      const auto s = solve_tilt(e, n);
      CHECK(s.residual <= 1e-10 * double(n));
      CHECK(s.x > 0.0);
      CHECK(s.x < e.rho());
    }
  }
  CHECK_THROWS_AS(solve_tilt(uniform(), 0), ParamError);
}
