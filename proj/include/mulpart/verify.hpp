#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mulpart/ensemble.hpp"

namespace mulpart::verify {

struct Options {
  std::uint64_t seed = 1;
  int threads = 0;
  std::optional<long long> n;       // concentration size override
  std::optional<int> replicas;      // concentration replica override
  std::optional<Ensemble> ensemble; // concentration/tilt on a user ensemble
  double eps = 0.05;
  double hit_threshold = 0.9;
};

struct Result {
  int id = 0;
  std::string suite;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// coefficients, omega, shape, tilt, moments, small-canonical, local-limit,
/// concentration, nonergodic, degenerate, budget-floor, condition-10.
std::vector<std::string> suites();

/// One suite by name, or "all".
std::vector<Result> run(const std::string& suite, const Options& opt = {});

std::string to_json(const std::vector<Result>& results);

}  // namespace mulpart::verify
