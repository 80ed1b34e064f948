#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <map>

#include "doctest.h"
#include "mulpart/asymptotics.hpp"
#include "mulpart/errors.hpp"
#include "mulpart/sampler.hpp"

using namespace mulpart;

namespace {

Ensemble uniform() { return Ensemble(SeriesFunction::geometric(1.0), WeightSequence::constant()); }
Ensemble weighted(double y) { return Ensemble(SeriesFunction::geometric(y), WeightSequence::constant()); }
Ensemble gibbs(double th, double be) {
  return Ensemble(SeriesFunction::exponential(), WeightSequence::power_density(th, be));
}
Ensemble evens() { return Ensemble(SeriesFunction::geometric(1.0), WeightSequence::residues(2, {0})); }

struct Stats {
  double mean = 0.0, var = 0.0;
};

template <class F>
Stats collect(int M, F&& draw) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < M; ++i) {
    const double v = draw();
    s += v;
    s2 += v * v;
  }
  Stats st;
  st.mean = s / M;
  st.var = s2 / M - st.mean * st.mean;
  return st;
}

double chi_square_pvalue(const std::map<Partition, int>& counts, const std::map<Partition, double>& probs, int M) {
  double chi = 0.0;
  for (const auto& [p, pr] : probs) {
    const auto it = counts.find(p);
    const double o = it == counts.end() ? 0.0 : it->second;
    const double ex = pr * M;
    chi += (o - ex) * (o - ex) / ex;
  }
  boost::math::chi_squared dist(double(probs.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, chi));
}

// All partitions of n with nonincreasing parts, built recursively.
void enumerate(long long n, long long max_part, Partition cur, std::vector<Partition>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (long long k = std::min(n, max_part); k >= 1; --k) {
    Partition next = cur;
    next.add(k, 1);
    enumerate(n - k, k, next, out);
  }
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(42, 0), b(42, 0), c(42, 1);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs |= x != c.next();
  }
  CHECK(differs);
  RngStream u(7, 3);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("scalar laws have the right first two moments") {
  RngStream rng(1, 0);
  const int M = 200000;
  auto geo = collect(M, [&] { return double(rng.geometric(0.6)); });
  CHECK(std::abs(geo.mean - 1.5) < 4.0 * std::sqrt(0.6 / 0.16 / M));
  auto poi = collect(M, [&] { return double(rng.poisson(3.5)); });
  CHECK(std::abs(poi.mean - 3.5) < 4.0 * std::sqrt(3.5 / M));
  CHECK(poi.var == doctest::Approx(3.5).epsilon(0.03));
  auto big = collect(M, [&] { return double(rng.poisson(80.0)); });
  CHECK(std::abs(big.mean - 80.0) < 4.0 * std::sqrt(80.0 / M));
  CHECK(big.var == doctest::Approx(80.0).epsilon(0.03));
  auto gam = collect(M, [&] { return rng.gamma(0.4); });
  CHECK(std::abs(gam.mean - 0.4) < 4.0 * std::sqrt(0.4 / M));
  // NB(r, q): mean r q / (1 - q), variance r q / (1 - q)^2
  for (double r : {2.0, 2.5, 20.0}) {
    auto nb = collect(M, [&] { return double(rng.negative_binomial(r, 0.3)); });
    const double mu = r * 0.3 / 0.7, var = r * 0.3 / 0.49;
    CHECK(std::abs(nb.mean - mu) < 4.0 * std::sqrt(var / M));
    CHECK(nb.var == doctest::Approx(var).epsilon(0.04));
  }
}

TEST_CASE("partition bookkeeping") {
  Partition p;
  p.add(3, 2);
  p.add(1, 1);
  p.add(5, 0);
  CHECK(p.weight() == 7);
  CHECK(p.num_parts() == 3);
  CHECK(p.largest_part() == 3);
  CHECK(p.parts() == std::vector<long long>{3, 3, 1});
  CHECK(p.consistent());
  CHECK(p.to_json(9, 2) == R"({"n":7,"counts":[[1,1],[3,2]],"seed":9,"stream":2})");
  CHECK_THROWS_AS(p.add(0, 1), ParamError);
}

TEST_CASE("grand canonical draws at x = 0 are empty") {
  RngStream rng(3, 0);
  const GrandCanonicalSampler g(uniform(), 0.0);
  for (int i = 0; i < 10; ++i) CHECK(g.draw(rng).empty());
  CHECK_THROWS_AS(GrandCanonicalSampler(uniform(), 1.0), DomainError);
}

TEST_CASE("grand canonical moments match E_x N and Var_x N") {
  struct Case {
    Ensemble e;
    double x;
  };
  std::vector<Case> cases = {{uniform(), 0.9}, {weighted(2.0), 0.4}, {gibbs(1.0, 0.5), 0.9},
                             {Ensemble(SeriesFunction::custom({1.0, 1.0, 1.0}), WeightSequence::constant()), 0.9}};
  RngStream rng(11, 0);
  const int M = 10000;
  for (auto& c : cases) {
    const GrandCanonicalSampler g(c.e, c.x);
    const Moments mo = moments(c.e, c.x);
    auto st = collect(M, [&] { return double(g.draw(rng).weight()); });
    CHECK(std::abs(st.mean - mo.mean) < 3.0 * std::sqrt(mo.var / M));
    CHECK(st.var == doctest::Approx(mo.var).epsilon(0.08));
  }
}

TEST_CASE("counts at distinct k are uncorrelated") {
  const Ensemble e = uniform();
  const GrandCanonicalSampler g(e, 0.8);
  RngStream rng(5, 0);
  const int M = 40000;
  double s1 = 0, s2 = 0, s12 = 0, q1 = 0, q2 = 0;
  for (int i = 0; i < M; ++i) {
    const auto p = g.draw(rng);
    const double a = double(p.count(1)), b = double(p.count(2));
    s1 += a;
    s2 += b;
    s12 += a * b;
    q1 += a * a;
    q2 += b * b;
  }
  const double cov = s12 / M - (s1 / M) * (s2 / M);
  const double corr = cov / std::sqrt((q1 / M - s1 * s1 / M / M) * (q2 / M - s2 * s2 / M / M));
  CHECK(std::abs(corr) < 4.0 / std::sqrt(double(M)));
  CHECK(s1 / M == doctest::Approx(mean_count(e, 1, 0.8)).epsilon(0.03));
}

TEST_CASE("uniform n = 5: both samplers are uniform over the seven partitions") {
  const Ensemble e = uniform();
  std::vector<Partition> all;
  enumerate(5, 5, Partition(), all);
  REQUIRE(all.size() == 7);
  std::map<Partition, double> probs;
  for (const auto& p : all) probs[p] = 1.0 / 7.0;

  const int M = 20000;
  RngStream rng(2024, 0);
  RejectionSampler rej(e, 5, 100000);
  std::map<Partition, int> c1, c2;
  for (int i = 0; i < M; ++i) ++c1[rej.draw(rng)];
  CHECK(c1.size() == 7);
  CHECK(chi_square_pvalue(c1, probs, M) > 1e-3);

  const ExactSampler ex(e, CoefficientTable::build(e, 5));
  for (int i = 0; i < M; ++i) ++c2[ex.draw(5, rng)];
  CHECK(c2.size() == 7);
  CHECK(chi_square_pvalue(c2, probs, M) > 1e-3);
}

TEST_CASE("weighted(2), n = 5: the all-ones partition has probability 32/74") {
  const Ensemble e = weighted(2.0);
  Partition ones;
  ones.add(1, 5);
  const double p = 32.0 / 74.0;
  const int M = 20000;
  const double tol = 4.0 * std::sqrt(p * (1 - p) / M);
  RngStream rng(99, 1);

  const ExactSampler ex(e, CoefficientTable::build(e, 10));
  int hits = 0;
  for (int i = 0; i < M; ++i) hits += ex.draw(5, rng) == ones;
  CHECK(std::abs(double(hits) / M - p) < tol);

  RejectionSampler rej(e, 5, 100000);
  hits = 0;
  for (int i = 0; i < M; ++i) hits += rej.draw(rng) == ones;
  CHECK(std::abs(double(hits) / M - p) < tol);
}

TEST_CASE("exact and rejection samplers agree on gibbs n = 40") {
  const Ensemble e = gibbs(1.0, 0.5);
  const ExactSampler ex(e, CoefficientTable::build(e, 40));
  RejectionSampler rej(e, 40, 100000);
  RngStream rng(17, 0);
  const int M = 4000;
  auto a = collect(M, [&] { return double(ex.draw(40, rng).num_parts()); });
  auto b = collect(M, [&] { return double(rej.draw(rng).num_parts()); });
  CHECK(std::abs(a.mean - b.mean) < 4.0 * std::sqrt((a.var + b.var) / M));
  auto la = collect(M, [&] { return double(ex.draw(40, rng).largest_part()); });
  auto lb = collect(M, [&] { return double(rej.draw(rng).largest_part()); });
  CHECK(std::abs(la.mean - lb.mean) < 4.0 * std::sqrt((la.var + lb.var) / M));
  CHECK(rej.acceptance_rate() > 0.0);
}

TEST_CASE("exact draws always have weight n") {
  const Ensemble e = uniform();
  const ExactSampler ex(e, CoefficientTable::build(e, 300));
  RngStream rng(8, 0);
  for (long long n : {0LL, 1LL, 2LL, 37LL, 300LL}) {
    const auto p = ex.draw(n, rng);
    CHECK(p.weight() == n);
    CHECK(p.consistent());
  }
  CHECK_THROWS_AS(ex.draw(301, rng), TableError);
  CHECK_THROWS_AS(ExactSampler(e, CoefficientTable::build(e, 10, {CoefficientMode::Auto, false})), TableError);
}

TEST_CASE("an unreachable n exhausts the rejection budget") {
  RngStream rng(1, 0);
  RejectionSampler rej(evens(), 7, 500);
  try {
    rej.draw(rng);
    FAIL("expected BudgetExhausted");
  } catch (const BudgetExhausted& b) {
    CHECK(b.attempts() == 500);
    CHECK(b.budget() == 500);
  }
  const Ensemble e = evens();
  const ExactSampler ex(e, CoefficientTable::build(e, 10));
  CHECK_THROWS_AS(ex.draw(7, rng), DomainError);
  CHECK(ex.draw(8, rng).weight() == 8);
}

TEST_CASE("same seed and stream reproduce the same partitions") {
  const Ensemble e = uniform();
  RngStream a(123, 4), b(123, 4);
  RejectionSampler ra(e, 60), rb(e, 60);
  for (int i = 0; i < 20; ++i) CHECK(ra.draw(a) == rb.draw(b));
}

TEST_CASE("default budget grows like n^gamma") {
  CHECK(rejection_gamma(1.0) == doctest::Approx(0.75));
  CHECK(default_budget(uniform(), 10000) == 20000);
}
