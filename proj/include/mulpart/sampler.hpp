#pragma once

#include <map>
#include <string>
#include <vector>

#include "mulpart/ensemble.hpp"
#include "mulpart/partition_function.hpp"
#include "mulpart/rng.hpp"

namespace mulpart {

/// A partition stored as its counts k -> R_k (only R_k > 0 kept).
class Partition {
 public:
  Partition() = default;
  /// Adds r parts of size k.
  void add(long long k, long long r);

  const std::map<long long, long long>& counts() const noexcept { return counts_; }
  long long count(long long k) const;
  long long weight() const noexcept { return weight_; }
  long long num_parts() const noexcept { return parts_; }
  long long largest_part() const noexcept;
  bool empty() const noexcept { return counts_.empty(); }
  /// Parts in nonincreasing order.
  std::vector<long long> parts() const;
  /// Recomputes the weight and checks it against the cached value.
  bool consistent() const;
  /// {"n":..,"counts":[[k,R_k],..],"seed":..,"stream":..}
  std::string to_json(std::uint64_t seed, std::uint64_t stream) const;

  bool operator==(const Partition& o) const { return counts_ == o.counts_; }
  bool operator<(const Partition& o) const { return counts_ < o.counts_; }

 private:
  std::map<long long, long long> counts_;
  long long weight_ = 0;
  long long parts_ = 0;
};

/// Law of a single count R_k under mu_x.
class CountLaw {
 public:
  CountLaw(const Ensemble& e, long long k, double x);
  long long sample(RngStream& rng) const;
  double mean() const noexcept { return mean_; }

 private:
  enum class Kind { Zero, Geometric, NegativeBinomial, Poisson, Table };
  Kind kind_ = Kind::Zero;
  double q_ = 0.0;
  double shape_ = 0.0;
  double lambda_ = 0.0;
  double p0_ = 1.0;
  double mean_ = 0.0;
  std::vector<double> cdf_;
};

/// Independent counts R_1..R_{K*} under mu_x, with K* chosen so that
/// sum_{k > K*} b_k (f(x^k) - 1) < 1e-9.
class GrandCanonicalSampler {
 public:
  GrandCanonicalSampler(const Ensemble& e, double x);
  Partition draw(RngStream& rng) const;
  /// Draws counts from the largest k down and gives up as soon as the weight
  /// exceeds `limit`. Returns false on early exit.
  bool draw_bounded(RngStream& rng, long long limit, Partition& out) const;
  long long sample_count(long long k, RngStream& rng) const;
  long long k_star() const noexcept { return k_star_; }
  double x() const noexcept { return x_; }

 private:
  double x_;
  long long k_star_ = 0;
  std::vector<long long> ks_;  // k with b_k > 0, ascending
  std::vector<CountLaw> laws_;
};

/// gamma = (beta + 2) / (2 beta + 2).
double rejection_gamma(double beta);
/// 20 * ceil(n^gamma).
long long default_budget(const Ensemble& e, long long n);

/// mu^(n) as mu_{x_n} conditioned on N = n.
class RejectionSampler {
 public:
  /// budget <= 0 selects default_budget.
  RejectionSampler(const Ensemble& e, long long n, long long budget = 0);
  /// Throws BudgetExhausted after `budget` failed attempts in one call.
  Partition draw(RngStream& rng);

  long long n() const noexcept { return n_; }
  double x() const noexcept { return grand_.x(); }
  long long budget() const noexcept { return budget_; }
  long long attempts() const noexcept { return attempts_; }
  long long accepted() const noexcept { return accepted_; }
  double acceptance_rate() const noexcept;

 private:
  long long n_;
  long long budget_;
  GrandCanonicalSampler grand_;
  long long attempts_ = 0;
  long long accepted_ = 0;
};

/// Exact draws from mu^(n) for n <= table.N_max(), sampling R_n, ..., R_1
/// from the retained prefix tables.
class ExactSampler {
 public:
  ExactSampler(const Ensemble& e, CoefficientTable table);
  Partition draw(long long n, RngStream& rng) const;
  const CoefficientTable& table() const noexcept { return table_; }

 private:
  Ensemble e_;
  CoefficientTable table_;
  // w_[k][j] = w_k(j) s^{kj}
  std::vector<std::vector<long double>> w_;
};

long long sample_count(const Ensemble& e, long long k, double x, RngStream& rng);
Partition sample_grand(const Ensemble& e, double x, RngStream& rng);
Partition sample_small_rejection(const Ensemble& e, long long n, RngStream& rng, long long budget = 0);
Partition sample_small_exact(const Ensemble& e, long long n, RngStream& rng, const CoefficientTable& table);

}  // namespace mulpart
