#pragma once

#include <string>

#include "mulpart/asymptotics.hpp"
#include "mulpart/ensemble.hpp"
#include "mulpart/partition_function.hpp"

namespace mulpart {

struct Numerics {
  TiltOptions tilt;
  double eps = 0.05;
  double hit_threshold = 0.9;
  long long budget = 0;  // 0: default_budget
  CoefficientMode coefficients = CoefficientMode::Auto;
};

struct EnsembleConfig {
  Ensemble ensemble;
  std::string name;
  Numerics numerics;
};

/// JSON document, either {"catalog": "weighted", "params": {"y": 2}} or an
/// explicit {"f": {...}, "weights": {...}, "declared": {...}}, plus an optional
/// "numerics" block. ConfigError names the line/column or the offending field.
EnsembleConfig parse_config(const std::string& text, const std::string& origin = "<config>");
EnsembleConfig load_config(const std::string& path);

/// A catalog name such as "weighted(y=2)", or a path to a config file.
EnsembleConfig resolve_ensemble(const std::string& name_or_path);

}  // namespace mulpart
