#include <cmath>

#include "doctest.h"
#include "mulpart/asymptotics.hpp"
#include "mulpart/diagnostics.hpp"
#include "mulpart/errors.hpp"

using namespace mulpart;

namespace {

Ensemble uniform() { return Ensemble(SeriesFunction::geometric(1.0), WeightSequence::constant()); }
Ensemble weighted(double y) { return Ensemble(SeriesFunction::geometric(y), WeightSequence::constant()); }

Partition from_parts(std::initializer_list<long long> parts) {
  Partition p;
  for (long long k : parts) p.add(k, 1);
  return p;
}

}  // namespace

TEST_CASE("young function counts parts above t") {
  const Partition p = from_parts({3, 1, 1});
  CHECK(young_function(p, 0.0) == 3);
  CHECK(young_function(p, 0.999) == 3);
  CHECK(young_function(p, 1.0) == 1);
  CHECK(young_function(p, 2.5) == 1);
  CHECK(young_function(p, 3.0) == 0);
  CHECK(young_function(p, 10.0) == 0);
  CHECK(young_function(Partition(), 0.0) == 0);
  // Area under the diagram is the weight: sum over integer steps.
  long long area = 0;
  for (int t = 0; t < 3; ++t) area += young_function(p, t);
  CHECK(area == p.weight());
}

TEST_CASE("scaled diagram") {
  const Partition p = from_parts({4, 2, 2, 1, 1});
  const auto v = scaled_diagram(p, 1.0, 10.0, {0.0, 1.5});
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[1] == doctest::Approx(0.3));
  const Partition single = from_parts({100});
  const auto w = scaled_diagram(single, 10.0, 100.0, {0.0, 5.0, 9.99, 10.0});
  CHECK(w[0] == doctest::Approx(0.1));
  CHECK(w[1] == doctest::Approx(0.1));
  CHECK(w[2] == doctest::Approx(0.1));
  CHECK(w[3] == 0.0);
  CHECK_THROWS_AS(scaled_diagram(p, 0.0, 1.0, {0.0}), ParamError);
}

TEST_CASE("concentration report is well formed and reproducible") {
  ConcentrationOptions opt;
  opt.seed = 5;
  opt.threads = 3;
  const auto a = concentration_experiment(uniform(), 300, 40, opt);
  opt.threads = 1;
  const auto b = concentration_experiment(uniform(), 300, 40, opt);
  REQUIRE(a.grid.size() == 12);
  CHECK(a.hit_fraction == b.hit_fraction);
  CHECK(a.sup_distance == b.sup_distance);
  for (double h : a.hit_fraction) {
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
  }
  CHECK(a.sup_q10 <= a.sup_median);
  CHECK(a.sup_median <= a.sup_q90);
  CHECK(a.phi[0] == doctest::Approx(-6.0 / (M_PI * M_PI) * std::log(1.0 - std::exp(-0.25))).epsilon(1e-8));
  CHECK(a.steep.front());
  CHECK_FALSE(a.steep.back());
  CHECK(a.sup_csv().rfind("replica,sup_distance\n0,", 0) == 0);
  CHECK(a.to_json().find("\"hit_fraction\"") != std::string::npos);
  CHECK_THROWS_AS(concentration_experiment(weighted(2.0), 100, 5), RegimeError);
}

TEST_CASE("sup distance shrinks with n") {
  ConcentrationOptions opt;
  opt.seed = 9;
  const auto small = concentration_experiment(uniform(), 100, 60, opt);
  const auto large = concentration_experiment(uniform(), 2000, 60, opt);
  CHECK(large.sup_median < small.sup_median);
}

TEST_CASE("variance ratio tends to 2 for a simple pole") {
  const Ensemble e = weighted(2.0);
  const double rho = 0.5;
  const auto r = variance_ratio_probe(e, {rho * (1 - 1e-2), rho * (1 - 1e-3), rho * (1 - 1e-4)});
  CHECK(r.expected_limit == doctest::Approx(2.0));
  CHECK(std::abs(r.points.back().second - 2.0) < 0.1);
  CHECK(r.nonergodic);
  // Double pole: (1 - 2z)^{-2} has limit 3/2.
  const Ensemble d(SeriesFunction::geometric(2.0, 2.0), WeightSequence::constant());
  const auto rd = variance_ratio_probe(d, {rho * (1 - 1e-5)});
  CHECK(rd.expected_limit == doctest::Approx(1.5));
  CHECK(rd.points[0].second == doctest::Approx(1.5).epsilon(0.02));
  CHECK_THROWS_AS(variance_ratio_probe(uniform(), {0.5}), RegimeError);
}

TEST_CASE("degenerate shape statistic") {
  CHECK(degenerate_statistic(from_parts({7})) == 1.0);
  CHECK(degenerate_statistic(from_parts({1, 1, 1})) == 0.0);
  CHECK(degenerate_statistic(from_parts({2, 1, 1})) == doctest::Approx(0.5));

  const auto a = degenerate_shape_probe(weighted(2.0), 100, 100, 3);
  const auto b = degenerate_shape_probe(weighted(2.0), 600, 100, 3);
  CHECK_FALSE(a.conjectural);
  CHECK(b.mean < a.mean);
  CHECK(a.q10 <= a.median);
  CHECK_THROWS_AS(degenerate_shape_probe(uniform(), 50, 10, 1), RegimeError);

  const Ensemble odds(SeriesFunction::geometric(2.0), WeightSequence::residues(2, {1}));
  CHECK(degenerate_shape_probe(odds, 50, 10, 1).conjectural);
}

TEST_CASE("miss fraction does not grow with n") {
  ConcentrationOptions opt;
  opt.seed = 21;
  const int M = 80;
  const auto a = concentration_experiment(uniform(), 1000, M, opt);
  const auto b = concentration_experiment(uniform(), 10000, M, opt);
  for (std::size_t j = 0; j < a.grid.size(); ++j) {
    const double ma = 1.0 - a.hit_fraction[j], mb = 1.0 - b.hit_fraction[j];
    const double se = std::sqrt((ma * (1 - ma) + mb * (1 - mb)) / M);
    CHECK(mb <= ma + 2.0 * se + 1e-12);
  }
}
