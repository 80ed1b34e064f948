#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mulpart/ensemble.hpp"

namespace mulpart::catalog {

/// Parsed catalog name such as "weighted(y=2)" or "gibbs(1, 0.5)".
struct Spec {
  std::string name;
  std::vector<std::pair<std::string, std::string>> args;  // key may be empty (positional)
};

Spec parse(const std::string& text);

struct Entry {
  std::string name;  // canonical, e.g. "weighted(y=2)"
  Ensemble ensemble;
  Regime expected_regime;
  double beta;
  std::optional<double> omega;       // closed-form Omega where known
  bool closed_shape = false;         // reference_shape available
  std::string note;
};

/// uniform, weighted(y), restricted(evens | odds | k1,k2,.. | mod=M,res=r1|r2), gibbs(theta, beta),
/// ordered_lists, ewens(theta). UnknownNameError / ParamError.
Entry entry(const std::string& text);
Ensemble make(const std::string& text);

std::vector<std::string> names();

/// Closed-form limit shape under the 1/(1 - x_n) scaling; nullopt when none is known.
std::optional<double> reference_shape(const std::string& text, double t);

/// alpha^(n) as written for the uniform, weighted and gibbs families.
std::optional<double> reference_alpha(const std::string& text, long long n);

/// Li_2(y) for y <= 1.
double dilog(double y);

/// (t, phi) under the 1/(1 - x_n) scaling mapped to the sqrt(n) scaling:
/// (t / sqrt(Omega), phi * sqrt(Omega)).
std::pair<double, double> symmetric_rescale(double t, double phi, double omega);

}  // namespace mulpart::catalog
