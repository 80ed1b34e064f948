#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mulpart/series.hpp"

namespace mulpart {

enum class WeightRule { Constant, IndicatorSet, PowerLaw, PowerDensity, Explicit };

/// Regular-variation data for B_k = theta k^beta + O(k^{beta - zeta}) (constant
/// slowly varying part). chi is the constant of the arithmetic-progression
/// condition on the K_s sets.
struct DeclaredGrowth {
  double beta = std::numeric_limits<double>::quiet_NaN();
  double theta = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> zeta;
  std::optional<double> chi;
};

/// The exponents b_k of F(x) = prod f(x^k)^{b_k}.
class WeightSequence {
 public:
  /// b_k = value.
  static WeightSequence constant(double value = 1.0);
  /// b_k = 1 iff (k mod modulus) is one of `residues`.
  static WeightSequence residues(long long modulus, std::vector<long long> residues);
  /// b_k = 1 iff k is in the finite set `members` (B_k stays bounded).
  static WeightSequence members(std::vector<long long> members);
  /// b_k = 1 iff member(k). Growth data must be declared by the caller.
  static WeightSequence indicator(std::function<bool(long long)> member, std::string label,
                                  DeclaredGrowth declared);
  /// b_k = theta (k^beta - (k-1)^beta), so B_k = theta k^beta exactly.
  static WeightSequence power_law(double theta, double beta);
  /// b_k = theta k^{beta - 1}; B_k ~ (theta / beta) k^beta. beta = 0 gives
  /// the Ewens weights theta / k.
  static WeightSequence power_density(double theta, double beta);
  /// b_k = values[(k - 1) mod values.size()].
  static WeightSequence explicit_periodic(std::vector<double> values);

  /// b_k * factor for all k.
  WeightSequence scaled(double factor) const;
  WeightSequence with_declared(const DeclaredGrowth& d) const;

  double weight(long long k) const;
  /// B_k = sum_{j <= k} b_j.
  double prefix_sum(long long k) const;

  WeightRule rule() const noexcept { return rule_; }
  const DeclaredGrowth& declared() const noexcept { return declared_; }
  /// True when every b_k is an integer (exact coefficient arithmetic applies).
  bool integer_valued() const noexcept;
  /// Smallest positive b_k for k <= k_max; 0 if some b_k vanishes.
  double min_weight(long long k_max) const;
  std::string describe() const;

 private:
  WeightRule rule_ = WeightRule::Constant;
  double scale_ = 1.0;
  double theta_ = 1.0;
  double beta_ = 1.0;
  long long modulus_ = 1;
  std::vector<long long> set_;  // sorted residues or members
  bool finite_set_ = false;
  std::function<bool(long long)> member_;
  std::string label_;
  std::vector<double> values_;
  DeclaredGrowth declared_;
};

/// Convenience free function matching WeightSequence::prefix_sum.
double prefix_sum(const WeightSequence& w, long long k);

enum class Regime {
  ErgodicSupercritical,
  ErgodicPoleAtOne,
  NonergodicGrandCanonical,
  EssentialSubcritical,
  OutOfScope,
};

std::string to_string(Regime r);
bool is_ergodic(Regime r);

/// A multiplicative ensemble F(x) = prod_k f(x^k)^{b_k}.
///
/// The constructor applies the normalization b_1 = 1 by trading f -> f^{b_1},
/// b_k -> b_k / b_1. When b_1 = 0 no normalization is possible and the
/// ensemble is classified OutOfScope (it can still be sampled).
class Ensemble {
 public:
  Ensemble(SeriesFunction f, WeightSequence weights, std::string name = {});

  const SeriesFunction& f() const noexcept { return f_; }
  const WeightSequence& weights() const noexcept { return weights_; }
  const std::string& name() const noexcept { return name_; }
  Regime regime() const noexcept { return regime_; }
  bool normalized() const noexcept { return normalized_; }

  double b(long long k) const { return weights_.weight(k); }
  /// Radius of convergence of F: min(rho_1, 1).
  double rho() const noexcept;
  double beta() const noexcept { return weights_.declared().beta; }
  /// Constant slowly varying factor of B_k after normalization.
  double theta() const noexcept { return weights_.declared().theta; }

 private:
  SeriesFunction f_;
  WeightSequence weights_;
  std::string name_;
  bool normalized_ = false;
  Regime regime_ = Regime::OutOfScope;
};

Regime classify_regime(const Ensemble& e);

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  long long terms = 0;  // number of k summed
};

/// E_x N and Var_x N under the grand canonical measure mu_x.
Moments moments(const Ensemble& e, double x);
double mean_N(const Ensemble& e, double x);
double var_N(const Ensemble& e, double x);

/// E_x R_k = b_k x^k h(x^k).
double mean_count(const Ensemble& e, long long k, double x);

struct Condition10Report {
  std::vector<std::pair<double, double>> per_s;  // (s, max_k ratio)
  double worst_ratio = 0.0;
  double worst_s = 0.0;
  std::vector<double> failing_s;
  bool pass = true;
};

/// max over k <= k_max of sum_{j <= k, j in K_s} b_j / B_k for s on a grid
/// of step 1/20 in [2, s_max].
Condition10Report check_condition_10(const WeightSequence& w, int s_max, long long k_max);
/// Single-s variant.
double condition_10_ratio(const WeightSequence& w, double s, long long k_max);
/// Membership in K_s = {k >= 1 : exists j, |k - s j| < 1/2}.
bool in_K_s(long long k, double s);

struct Condition11Report {
  double fitted_theta = 0.0;
  double fitted_beta = 0.0;
  double reference_theta = 0.0;
  double reference_beta = 0.0;
  double remainder_exponent = 0.0;  // -inf when the remainder vanishes
  double zeta = 0.0;                // zeta the check was made against
  bool exact = false;
  bool compliant = false;
  bool out_of_scope = false;
};

/// Fits B_k = theta k^beta + O(k^e) on dyadic blocks up to k_max.
Condition11Report check_condition_11(const WeightSequence& w, long long k_max);

}  // namespace mulpart
