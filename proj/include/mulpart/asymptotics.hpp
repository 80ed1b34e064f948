#pragma once

#include <vector>

#include "mulpart/ensemble.hpp"

namespace mulpart {

struct ShapeCurve {
  std::vector<std::pair<double, double>> grid;  // (t, phi(t))
  double omega = 0.0;
  double beta = 0.0;
  bool phi_at_zero_infinite = false;
  double phi_at_zero = 0.0;  // meaningful when finite
};

struct TiltSolution {
  long long n = 0;
  double x = 0.0;
  double tau = 1.0;  // 1 - x
  double residual = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  int iterations = 0;
  int newton_steps = 0;
  int bisection_steps = 0;
  std::vector<double> residual_history;  // |E_x N - n| after each iteration
};

struct TiltOptions {
  int max_iterations = 200;
  double rel_tolerance = 1e-10;
};

/// Normalization of the mean asymptotics E_x N ~ theta Omega / (1-x)^{beta+1}.
/// Omega is the theta = 1 integral. Ergodic regimes only.
double omega(const Ensemble& e);
/// Constant of Var_x N ~ theta sigma^2 / (1-x)^{beta+2}.
double sigma_sq(const Ensemble& e);

/// phi(t) under the 1/(1 - x_n) scaling.
double limit_shape(const Ensemble& e, double t);
/// Same, reusing a known Omega.
double limit_shape(const Ensemble& e, double t, double omega_value);

/// True when phi(0) is infinite (rho_1 = 1 and beta <= 1).
bool phi_at_zero_infinite(const Ensemble& e);

/// Grid of grid_size points evenly spaced on (0, t_max].
ShapeCurve shape_curve(const Ensemble& e, double t_max, int grid_size);

/// Integral of phi over (0, infinity) by quadrature; equals 1 for a true limit shape.
double shape_mass(const Ensemble& e);

/// Trapezoid integral of a curve plus an exponential tail estimate past the
/// last point. The first interval (0, t_1] uses phi(t_1) (rectangle).
double curve_mass(const ShapeCurve& c);

/// Solves E_x N = n on (0, rho).
TiltSolution solve_tilt(const Ensemble& e, long long n, const TiltOptions& opt = {});

/// alpha = 1 / (1 - x_n); ergodic regimes only.
double scaling_alpha(const Ensemble& e, long long n);

}  // namespace mulpart
