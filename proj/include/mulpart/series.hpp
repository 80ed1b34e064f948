#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace mulpart {

enum class SeriesKind { Geometric, Exponential, Custom };

enum class SingularityKind { Pole, Essential, None };

struct Singularity {
  SingularityKind kind = SingularityKind::None;
  // Pole order. Real-valued because f^p of a simple pole is reported as a
  // pole of order p.
  double order = 0.0;

  static Singularity pole(double order) { return {SingularityKind::Pole, order}; }
  static Singularity essential() { return {SingularityKind::Essential, 0.0}; }
  static Singularity none() { return {SingularityKind::None, 0.0}; }
};

// f(u) together with the logarithmic derivative h = f'/f and its first two
// derivatives.
struct SeriesValues {
  double f = 1.0;
  double h = 0.0;
  double dh = 0.0;
  double d2h = 0.0;
};

// h and its scaled derivatives at u = e^{-v}: h(u), u h'(u), u^2 h''(u).
// Evaluated directly from v so that 1 - u does not lose digits as v -> 0.
struct LogPointValues {
  double u = 1.0;
  double h = 0.0;
  double u_dh = 0.0;
  double u2_d2h = 0.0;
};

/// The component generating function f of a multiplicative ensemble.
///
/// Internally f = base^power, where base is one of the closed-form kinds or a
/// coefficient list / rule. Taylor coefficients are normalized so g_0 = 1, and
/// g_1 > 0 is a constructor precondition.
///
/// Instances are immutable and cheap to copy.
class SeriesFunction {
 public:
  /// f(z) = (1 - y z)^{-power}.
  static SeriesFunction geometric(double y, double power = 1.0);
  /// f(z) = e^{rate z}.
  static SeriesFunction exponential(double rate = 1.0);
  /// Polynomial with the given coefficients (normalized by the constant term).
  static SeriesFunction custom(std::vector<double> coefficients);
  /// Infinite series given by a coefficient rule. The caller declares the
  /// radius of convergence and the kind of singularity sitting on it.
  static SeriesFunction custom(std::function<double(std::size_t)> rule,
                               double radius, Singularity singularity);

  /// f^p as a new series. Implements the f -> f^b normalization trade.
  SeriesFunction pow(double p) const;

  SeriesKind kind() const noexcept { return kind_; }
  /// y for Geometric, rate for Exponential, 1 for Custom.
  double parameter() const noexcept { return param_; }
  /// Exponent applied to the base series (always 1 for Exponential).
  double power() const noexcept { return power_; }
  double radius() const noexcept { return radius_; }
  Singularity singularity() const noexcept { return singularity_; }
  bool is_finite_polynomial() const noexcept;
  /// Coefficients of the base series (Custom only; normalized, finite lists).
  const std::vector<double>& base_coefficients() const noexcept { return base_; }

  /// Taylor coefficients g_0..g_J of f.
  std::vector<double> taylor(std::size_t J) const;

  /// f, h, h', h'' at u in [0, radius).
  SeriesValues eval(double u) const;
  /// h, u h', u^2 h'' at u = e^{-v}, v > 0 (v >= 0 when radius > 1).
  LogPointValues eval_log(double v) const;
  double log_f(double u) const;
  /// f(u) - 1 without cancellation for small u.
  double f_minus_one(double u) const;

  /// Coefficients c_0..c_J of f^b by the Miller power recurrence
  ///   j c_j = sum_{i=1}^{j} (i (b + 1) - j) g_i c_{j-i}.
  /// Throws NegativeCoefficientError when some c_j < -1e-12 max|c|, which
  /// signals that b is not admissible for this f.
  std::vector<double> power_coefficients(double b, std::size_t J) const;

  std::string describe() const;

 private:
  SeriesFunction() = default;
  void check_domain(double u) const;
  // f, f', f'', f''' of the base series for Custom kinds.
  void eval_base_custom(double u, double out[4]) const;

  SeriesKind kind_ = SeriesKind::Custom;
  double param_ = 1.0;
  double power_ = 1.0;
  double radius_ = std::numeric_limits<double>::infinity();
  Singularity singularity_;
  std::vector<double> base_;
  std::shared_ptr<const std::function<double(std::size_t)>> rule_;
  double rule_g0_ = 1.0;
};

/// Free-function form of SeriesFunction::power_coefficients operating on a
/// raw coefficient list (g_0 must be 1).
std::vector<double> miller_power(const std::vector<double>& g, double b, std::size_t J);

}  // namespace mulpart
