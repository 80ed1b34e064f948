#include <cmath>

#include "doctest.h"
#include "mulpart/ensemble.hpp"
#include "mulpart/errors.hpp"

using namespace mulpart;

namespace {

Ensemble uniform() { return Ensemble(SeriesFunction::geometric(1.0), WeightSequence::constant()); }
Ensemble weighted(double y) { return Ensemble(SeriesFunction::geometric(y), WeightSequence::constant()); }

}  // namespace

TEST_CASE("prefix sums") {
  CHECK(WeightSequence::constant().prefix_sum(10) == 10.0);
  CHECK(WeightSequence::power_law(1.0, 2.0).prefix_sum(4) == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(WeightSequence::residues(2, {0}).prefix_sum(7) == 3.0);
  CHECK(WeightSequence::residues(3, {1, 2}).prefix_sum(10) == 7.0);
  CHECK(WeightSequence::members({2, 5, 9}).prefix_sum(6) == 2.0);
  CHECK(WeightSequence::explicit_periodic({1.0, 2.0, 4.0}).prefix_sum(8) == 1 + 2 + 4 + 1 + 2 + 4 + 1 + 2);
}

TEST_CASE("prefix sums agree with direct summation") {
  const std::vector<WeightSequence> ws = {WeightSequence::power_law(2.0, 0.5), WeightSequence::power_density(1.0, 1.5),
                                          WeightSequence::residues(4, {1, 3}),
                                          WeightSequence::explicit_periodic({0.5, 1.5})};
  for (const auto& w : ws) {
    double s = 0.0;
    for (long long k = 1; k <= 1000; ++k) {
      s += w.weight(k);
      if (k % 97 == 0) CHECK(w.prefix_sum(k) == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("normalization trades b_1 into f") {
  const Ensemble e(SeriesFunction::exponential(), WeightSequence::power_density(3.0, 1.0));
  CHECK(e.normalized());
  CHECK(e.b(1) == doctest::Approx(1.0));
  CHECK(e.b(7) == doctest::Approx(1.0));
  CHECK(e.f().eval(0.2).h == doctest::Approx(3.0));
  CHECK(e.theta() == doctest::Approx(1.0));
}

TEST_CASE("mean of N") {
  CHECK(mean_N(uniform(), 0.0) == 0.0);
  double direct = 0.0;
  for (int k = 1; k < 200; ++k) direct += k * std::pow(0.5, k) / (1.0 - std::pow(0.5, k));
  CHECK(direct == doctest::Approx(2.744).epsilon(1e-3));
  CHECK(mean_N(uniform(), 0.5) == doctest::Approx(direct).epsilon(1e-14));
  CHECK_THROWS_AS(mean_N(uniform(), 1.0), DomainError);
  CHECK_THROWS_AS(mean_N(weighted(2.0), 0.6), DomainError);
}

TEST_CASE("variance of N") {
  CHECK(var_N(uniform(), 0.0) == 0.0);
  for (double x : {0.5, 0.9, 0.99}) {
    const double d = 1e-6 * x;
    const double fd = x * (mean_N(uniform(), x + d) - mean_N(uniform(), x - d)) / (2 * d);
    CHECK(var_N(uniform(), x) == doctest::Approx(fd).epsilon(1e-5));
  }
  // Poisson counts: Var N = sum k^2 q^k.
  const Ensemble pois(SeriesFunction::exponential(), WeightSequence::constant());
  double direct = 0.0;
  for (int k = 1; k < 200; ++k) direct += double(k) * k * std::pow(0.5, k);
  CHECK(var_N(pois, 0.5) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(direct == doctest::Approx(0.5 * 1.5 / 0.125).epsilon(1e-14));
}

TEST_CASE("moments are increasing in x") {
  for (const auto& e : {uniform(), weighted(0.5), weighted(2.0)}) {
    double pm = -1, pv = -1;
    for (int i = 1; i < 200; ++i) {
      const double x = e.rho() * i / 200.0;
      const auto m = moments(e, x);
      CHECK(m.mean > pm);
      CHECK(m.var > pv);
      pm = m.mean;
      pv = m.var;
    }
  }
}

TEST_CASE("moments at an indicator set with gaps") {
  const Ensemble e(SeriesFunction::geometric(1.0), WeightSequence::residues(5, {0}));
  double direct = 0.0;
  for (int j = 1; j < 2000; ++j) {
    const int k = 5 * j;
    direct += k * std::pow(0.99, k) / (1 - std::pow(0.99, k));
  }
  CHECK(mean_N(e, 0.99) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("regime classification") {
  CHECK(weighted(0.5).regime() == Regime::ErgodicSupercritical);
  CHECK(uniform().regime() == Regime::ErgodicPoleAtOne);
  CHECK(weighted(2.0).regime() == Regime::NonergodicGrandCanonical);
  CHECK(Ensemble(SeriesFunction::exponential(), WeightSequence::power_density(1.0, 0.0)).regime() ==
        Regime::OutOfScope);
  CHECK(Ensemble(SeriesFunction::geometric(1.0), WeightSequence::residues(2, {0})).regime() == Regime::OutOfScope);
  const auto ess = SeriesFunction::custom([](std::size_t j) { return std::pow(2.0, double(j)) / std::tgamma(double(j) + 1); },
                                          0.5, Singularity::essential());
  CHECK(Ensemble(ess, WeightSequence::constant()).regime() == Regime::EssentialSubcritical);
  CHECK(to_string(Regime::NonergodicGrandCanonical) == "NonergodicGrandCanonical");
}

TEST_CASE("K_s membership") {
  for (long long k = 1; k <= 30; ++k) CHECK(in_K_s(k, 3.0) == (k % 3 == 0));
  for (long long k = 1; k <= 10; ++k) CHECK(in_K_s(k, 0.7));
  CHECK(in_K_s(5, 2.5));
  CHECK_FALSE(in_K_s(6, 2.5));
}

TEST_CASE("condition (10) ratios") {
  CHECK(condition_10_ratio(WeightSequence::constant(), 2.0, 100) == doctest::Approx(0.5));
  CHECK(condition_10_ratio(WeightSequence::residues(2, {0}), 2.0, 100) == 1.0);
  const auto rep = check_condition_10(WeightSequence::constant(), 10, 10000);
  CHECK(rep.pass);
  CHECK(rep.worst_ratio <= 0.51);
  const auto ev = check_condition_10(WeightSequence::residues(2, {0}), 4, 1000);
  CHECK_FALSE(ev.pass);
  REQUIRE_FALSE(ev.failing_s.empty());
  CHECK(ev.failing_s.front() == 2.0);
}

TEST_CASE("condition (11) fits") {
  const auto exact = check_condition_11(WeightSequence::power_law(1.0, 1.0), 1 << 14);
  CHECK(exact.exact);
  CHECK(exact.compliant);

  const auto alt = check_condition_11(WeightSequence::explicit_periodic({0.5, 1.5}).scaled(2.0), 1 << 14);
  CHECK_FALSE(alt.exact);
  CHECK(alt.fitted_beta == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(alt.remainder_exponent == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(alt.compliant);

  const auto ew = check_condition_11(WeightSequence::power_density(1.0, 0.0), 1 << 14);
  CHECK(ew.fitted_beta < 0.2);
  CHECK(ew.out_of_scope);
  CHECK_FALSE(ew.compliant);
}
