#include "mulpart/asymptotics.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "mulpart/errors.hpp"

namespace mulpart {

namespace {

constexpr double kQuadTol = 1e-13;
// Past this v every integrand carries a factor e^{-v} below the smallest double.
constexpr double kVMax = 740.0;

// v h, v^2 u h', v^3 u^2 h'' at u = e^{-v}. The scaled forms stay finite as
// v -> 0 when f has a pole at 1, so integrands never overflow near v = 0.
struct ScaledLog {
  double u;
  double h;
  double udh;
  double u2d2h;
};

ScaledLog scaled_log(const SeriesFunction& f, double v) {
  ScaledLog s{};
  s.u = std::exp(-v);
  if (f.kind() == SeriesKind::Geometric) {
    const double y = f.parameter(), p = f.power();
    const double w = -std::expm1(std::log(y) - v);
    if (!(w > 0.0)) throw DomainError("shape integrand evaluated beyond the pole");
    const double r = v / w;
    const double yu = y * s.u;
    s.h = p * y * r;
    s.udh = p * y * yu * r * r;
    s.u2d2h = 2.0 * p * y * yu * yu * r * r * r;
    return s;
  }
  const LogPointValues lp = f.eval_log(v);
  s.h = v * lp.h;
  s.udh = v * v * lp.u_dh;
  s.u2d2h = v * v * v * lp.u2_d2h;
  return s;
}

template <class F>
double integrate_to_inf(F&& fn, double a, double split, const char* what) {
  using namespace boost::math::quadrature;
  double total = 0.0, err1 = 0.0, err2 = 0.0, l1a = 0.0, l1b = 0.0;
  try {
    tanh_sinh<double> ts;
    exp_sinh<double> es;
    total = ts.integrate(fn, a, split, kQuadTol, &err1, &l1a);
    total += es.integrate(fn, split, std::numeric_limits<double>::infinity(), kQuadTol, &err2, &l1b);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    throw QuadratureError(std::string(what) + ": " + ex.what());
  }
  const double err = err1 + err2, l1 = l1a + l1b;
  if (!std::isfinite(total) || err > 1e-9 * std::max(1.0, l1))
    throw QuadratureError(std::string(what) + " did not converge (error estimate " +
                          std::to_string(err) + ")");
  return total;
}

void require_ergodic(const Ensemble& e, const char* what) {
  if (!is_ergodic(e.regime()))
    throw RegimeError(std::string(what) + " needs an ergodic ensemble; regime is " +
                      to_string(e.regime()));
}

}  // namespace

double omega(const Ensemble& e) {
  require_ergodic(e, "omega");
  const double beta = e.beta();
  const auto& f = e.f();
  auto g = [&](double v) {
    if (v <= 0.0 || v > kVMax) return 0.0;
    const ScaledLog s = scaled_log(f, v);
    // v^{beta+1}(h + u h') - v^beta h
    return std::pow(v, beta - 1.0) * (v * s.h + s.udh - s.h) * s.u;
  };
  return integrate_to_inf(g, 0.0, 1.0, "omega");
}

double sigma_sq(const Ensemble& e) {
  require_ergodic(e, "sigma_sq");
  const double beta = e.beta();
  const auto& f = e.f();
  auto g = [&](double v) {
    if (v <= 0.0 || v > kVMax) return 0.0;
    const ScaledLog s = scaled_log(f, v);
    // v^{beta+2}(h + 3 u h' + u^2 h'') - 2 v^{beta+1}(h + u h')
    const double a = 2.0 * (v * s.h + s.udh);
    const double b = v * v * s.h + 3.0 * v * s.udh + s.u2d2h;
    return std::pow(v, beta - 1.0) * (b - a) * s.u;
  };
  return integrate_to_inf(g, 0.0, 1.0, "sigma_sq");
}

bool phi_at_zero_infinite(const Ensemble& e) {
  return std::abs(e.f().radius() - 1.0) <= 1e-12 && e.beta() <= 1.0;
}

double limit_shape(const Ensemble& e, double t, double omega_value) {
  require_ergodic(e, "limit_shape");
  if (!(t >= 0.0)) throw DomainError("limit_shape needs t >= 0");
  if (t == 0.0 && phi_at_zero_infinite(e)) throw DomainError("phi(0) is infinite for this ensemble");
  if (t > kVMax) return 0.0;
  const double beta = e.beta();
  const auto& f = e.f();
  auto g = [&](double v) {
    if (v <= 0.0 || v > kVMax) return 0.0;
    const ScaledLog s = scaled_log(f, v);
    // v^beta (h + u h') e^{-v}
    const double a = std::pow(v, beta - 1.0) * s.h;
    return (s.udh == 0.0 ? a : a + std::pow(v, beta - 2.0) * s.udh) * s.u;
  };
  const double integral = integrate_to_inf(g, t, t + 1.0, "limit_shape");
  double boundary = 0.0;
  if (t > 0.0) {
    const ScaledLog s = scaled_log(f, t);
    boundary = std::pow(t, beta - 1.0) * s.h * s.u;
  }
  return (integral - boundary) / omega_value;
}

double limit_shape(const Ensemble& e, double t) { return limit_shape(e, t, omega(e)); }

ShapeCurve shape_curve(const Ensemble& e, double t_max, int grid_size) {
  if (!(t_max > 0.0)) throw ParamError("t_max must be > 0");
  if (grid_size < 1) throw ParamError("grid size must be >= 1");
  ShapeCurve c;
  c.omega = omega(e);
  c.beta = e.beta();
  c.phi_at_zero_infinite = phi_at_zero_infinite(e);
  c.phi_at_zero = c.phi_at_zero_infinite ? std::numeric_limits<double>::infinity()
                                         : limit_shape(e, 0.0, c.omega);
  c.grid.reserve(std::size_t(grid_size));
  for (int i = 1; i <= grid_size; ++i) {
    const double t = t_max * double(i) / double(grid_size);
    c.grid.emplace_back(t, limit_shape(e, t, c.omega));
  }
  return c;
}

double shape_mass(const Ensemble& e) {
  const double om = omega(e);
  // (0, 1e-12] carries at most ~1e-10 of the mass even when phi(0) is infinite.
  auto g = [&](double t) { return t > 1e-12 ? limit_shape(e, t, om) : 0.0; };
  return integrate_to_inf(g, 0.0, 1.0, "shape_mass");
}

double curve_mass(const ShapeCurve& c) {
  if (c.grid.empty()) return 0.0;
  double s = c.grid.front().first * c.grid.front().second;
  for (std::size_t i = 1; i < c.grid.size(); ++i) {
    const auto [t0, p0] = c.grid[i - 1];
    const auto [t1, p1] = c.grid[i];
    s += 0.5 * (t1 - t0) * (p0 + p1);
  }
  if (c.grid.size() >= 2) {
    const auto [t0, p0] = c.grid[c.grid.size() - 2];
    const auto [t1, p1] = c.grid.back();
    if (p1 > 0.0 && p0 > p1) s += p1 * (t1 - t0) / std::log(p0 / p1);
  }
  return s;
}

TiltSolution solve_tilt(const Ensemble& e, long long n, const TiltOptions& opt) {
  if (n < 1) throw ParamError("solve_tilt needs n >= 1");
  const double rho = e.rho();
  const double nd = double(n);

  double x;
  const Regime reg = e.regime();
  if (is_ergodic(reg)) {
    double om = 0.0;
    try {
      om = omega(e);
    } catch (const Error&) {
      om = 0.0;
    }
    const double tau = om > 0.0 ? std::pow(om * e.theta() / nd, 1.0 / (e.beta() + 1.0)) : 0.5;
    x = rho - std::min(tau, 0.5) * rho;
  } else if (e.f().singularity().kind == SingularityKind::Pole && e.f().radius() < 1.0) {
    const double m = e.f().singularity().order;
    x = rho - std::min(m * rho / nd, 0.5 * rho);
  } else {
    x = 0.5 * rho;
  }

  TiltSolution sol;
  sol.n = n;
  double lo = 0.0, hi = rho;
  Moments mo = moments(e, x);
  double res = mo.mean - nd;
  const double tol = opt.rel_tolerance * nd;

  for (int it = 0; it < opt.max_iterations && std::abs(res) > tol; ++it) {
    if (res < 0.0) lo = x;
    else hi = x;
    // Newton on log E in s = -log(rho - x): dlogE/ds = Var (rho - x) / (x E).
    double x_new = std::numeric_limits<double>::quiet_NaN();
    if (mo.mean > 0.0 && mo.var > 0.0) {
      const double gap = rho - x;
      const double g = std::log(mo.mean) - std::log(nd);
      const double dg = mo.var * gap / (x * mo.mean);
      const double s_new = -std::log(gap) - g / dg;
      x_new = rho - std::exp(-s_new);
    }
    bool newton = std::isfinite(x_new) && x_new > lo && x_new < hi;
    Moments mo_new;
    if (newton) {
      mo_new = moments(e, x_new);
      if (std::abs(mo_new.mean - nd) >= std::abs(res)) newton = false;
    }
    if (!newton) {
      x_new = 0.5 * (lo + hi);
      if (x_new <= lo || x_new >= hi) break;
      mo_new = moments(e, x_new);
      ++sol.bisection_steps;
    } else {
      ++sol.newton_steps;
    }
    x = x_new;
    mo = mo_new;
    res = mo.mean - nd;
    sol.residual_history.push_back(std::abs(res));
    sol.iterations = it + 1;
  }
  sol.x = x;
  sol.tau = 1.0 - x;
  sol.mean = mo.mean;
  sol.variance = mo.var;
  sol.residual = std::abs(res);
  if (sol.residual > tol)
    throw ConvergenceError("tilt solver stopped with residual " + std::to_string(sol.residual) +
                           " for n = " + std::to_string(n));
  return sol;
}

double scaling_alpha(const Ensemble& e, long long n) {
  require_ergodic(e, "scaling_alpha");
  return 1.0 / (1.0 - solve_tilt(e, n).x);
}

}  // namespace mulpart
