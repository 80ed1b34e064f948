#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mulpart/sampler.hpp"

namespace mulpart {

/// phi_lambda(t): number of parts strictly larger than t.
long long young_function(const Partition& p, double t);

/// (alpha / normalizer) * young_function(p, alpha t) at each grid point.
std::vector<double> scaled_diagram(const Partition& p, double alpha, double normalizer,
                                   const std::vector<double>& grid);

enum class SampleMode {
  Auto,       // exact below kAutoExactN, rejection above
  Rejection,
  Exact,
};

inline constexpr long long kAutoExactN = 2000;

struct ConcentrationOptions {
  std::vector<double> grid;  // empty: 0.25, 0.5, .., 3
  double eps = 0.05;
  double hit_threshold = 0.9;
  std::uint64_t seed = 1;
  SampleMode mode = SampleMode::Auto;
  long long budget = 0;  // per draw; 0 uses default_budget
  int threads = 0;       // 0: hardware concurrency
};

struct ConcentrationReport {
  long long n = 0;
  int M = 0;
  double eps = 0.0;
  double hit_threshold = 0.0;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  std::vector<double> grid;
  std::vector<double> phi;           // limit shape at the grid points
  std::vector<bool> steep;           // |phi'| * spacing >= eps / 4
  std::vector<double> hit_fraction;  // fraction of replicas within eps
  std::vector<double> sup_distance;  // per replica, ordered by stream index
  double sup_q10 = 0.0, sup_median = 0.0, sup_q90 = 0.0;

  /// Every grid point reaches the hit threshold.
  bool passed() const;
  std::string to_json() const;
  /// "replica,sup_distance" rows.
  std::string sup_csv() const;
};

/// M small-canonical samples of size n, replica i drawn from stream i.
ConcentrationReport concentration_experiment(const Ensemble& e, long long n, int M,
                                             const ConcentrationOptions& opt = {});

struct VarianceRatioReport {
  std::vector<std::pair<double, double>> points;  // (x, E N^2 / (E N)^2)
  double expected_limit = 0.0;                    // (m + 1) / m for a pole of order m
  bool nonergodic = false;                        // ratio - 1 > 0.5 everywhere
};

/// RegimeError unless f has a pole inside the unit disc.
VarianceRatioReport variance_ratio_probe(const Ensemble& e, const std::vector<double>& x_grid);

struct DegenerateShapeReport {
  long long n = 0;
  int M = 0;
  std::vector<double> values;  // sum_{k >= 2} k R_k / n per replica
  double mean = 0.0;
  double q10 = 0.0, median = 0.0, q90 = 0.0;
  // Some b_k vanish, so only the conjectured degenerate shape applies.
  bool conjectural = false;
};

DegenerateShapeReport degenerate_shape_probe(const Ensemble& e, long long n, int M, std::uint64_t seed,
                                             int threads = 0);

/// sum_{k >= 2} k R_k / n.
double degenerate_statistic(const Partition& p);

}  // namespace mulpart
