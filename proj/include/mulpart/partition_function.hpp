#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mulpart/ensemble.hpp"

namespace mulpart {

enum class CoefficientMode {
  Auto,   // exact when representable and cheap enough, else float
  Exact,  // GMP integers/rationals; ParamError when not representable
  Float,  // long double
};

struct CoefficientOptions {
  CoefficientMode mode = CoefficientMode::Auto;
  // Keep the prefix tables T_k(m) needed by the exact small-canonical sampler.
  bool retain_tables = true;
  // Scale s for the stored tables (T_k(m) s^m). 0 picks x_N, or min(1, rho).
  double scale = 0.0;
};

// Largest N for which prefix tables may be retained.
inline constexpr long long kMaxTableN = 5000;
// Auto mode uses rational arithmetic only up to this N (integer tables have no cap).
inline constexpr long long kAutoRationalN = 200;

/// Taylor coefficients a_0..a_N of F(x) = prod_k f(x^k)^{b_k}, optionally with
/// the prefix products T_k(m) = [x^m] prod_{j <= k} f(x^j)^{b_j}.
class CoefficientTable {
 public:
  static CoefficientTable build(const Ensemble& e, long long N, const CoefficientOptions& opt = {});

  long long N_max() const noexcept;
  bool exact() const noexcept;
  /// Exact values are integers (no rational denominators).
  bool integral() const noexcept;

  /// log a_m; -inf when a_m = 0.
  double log_a(long long m) const;
  /// a_m as a double (may overflow to +inf for large m).
  double a(long long m) const;
  /// a_m as text: integer or p/q in exact mode, 17 significant digits otherwise.
  std::string a_string(long long m) const;
  bool a_is_zero(long long m) const;

  bool has_prefix_tables() const noexcept;
  double scale() const noexcept;
  /// T_k(m) * scale^m, for 0 <= k, 0 <= m <= N_max.
  double prefix_scaled(long long k, long long m) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// True when every factor coefficient up to degree N is a rational number
/// GMP can carry exactly (small-denominator f parameters and b_k).
bool exactly_representable(const Ensemble& e, long long N);

/// Coefficients of f(z)^b up to degree J in long double (closed forms for
/// Geometric and Exponential, Miller recurrence for Custom).
std::vector<long double> factor_coefficients(const SeriesFunction& f, double b, std::size_t J);

/// log F(x), truncated once the tail is below 1e-16 absolute.
double log_F(const Ensemble& e, double x);

/// mu_x(P(m)) = a_m x^m / F(x). TruncationError if m > N_max.
double point_mass(const Ensemble& e, double x, long long m, const CoefficientTable& table);

struct NormalizationCheck {
  double sum = 0.0;         // sum of point masses m <= N_max
  double tail_bound = 0.0;  // Chernoff bound on P_x(N > N_max)
};

/// Throws TruncationError when the tail bound exceeds 1e-6.
NormalizationCheck normalization_check(const Ensemble& e, double x, const CoefficientTable& table);

struct LocalLimitPoint {
  double u = 0.0;
  long long m = 0;
  double value = 0.0;     // sqrt(Var) * mu_x(P(m))
  double gaussian = 0.0;  // e^{-u^2/2} / sqrt(2 pi)
};

/// sqrt(Var_x N) mu_x(P(m(u))) with m(u) = round(E_x N + u sqrt(Var_x N)).
/// Builds an exact streaming table up to the largest m needed.
std::vector<LocalLimitPoint> local_limit_probe(const Ensemble& e, double x,
                                               const std::vector<double>& u_grid);
std::vector<LocalLimitPoint> local_limit_probe(const Ensemble& e, double x,
                                               const std::vector<double>& u_grid,
                                               const CoefficientTable& table);

}  // namespace mulpart
