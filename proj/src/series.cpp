#include "mulpart/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mulpart/errors.hpp"

namespace mulpart {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Custom series may only be summed this close to the singularity.
constexpr double kCustomRadiusFraction = 0.999;
constexpr std::size_t kMaxSeriesTerms = 10'000'000;

}  // namespace

SeriesFunction SeriesFunction::geometric(double y, double power) {
  if (!(y > 0.0) || !std::isfinite(y)) throw ParamError("geometric series needs y > 0");
  if (!(power > 0.0) || !std::isfinite(power)) throw ParamError("series power must be > 0");
  SeriesFunction s;
  s.kind_ = SeriesKind::Geometric;
  s.param_ = y;
  s.power_ = power;
  s.radius_ = 1.0 / y;
  s.singularity_ = Singularity::pole(power);
  return s;
}

SeriesFunction SeriesFunction::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ParamError("exponential series needs rate > 0");
  SeriesFunction s;
  s.kind_ = SeriesKind::Exponential;
  s.param_ = rate;
  s.power_ = 1.0;
  s.radius_ = kInf;
  s.singularity_ = Singularity::none();
  return s;
}

SeriesFunction SeriesFunction::custom(std::vector<double> coefficients) {
  if (coefficients.size() < 2) throw ParamError("custom series needs at least g_0 and g_1");
  const double g0 = coefficients[0];
  if (!(g0 > 0.0)) throw ParamError("custom series needs g_0 > 0");
  for (double& g : coefficients) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw ParamError("custom series coefficients must be finite and >= 0");
    g /= g0;
  }
  if (!(coefficients[1] > 0.0)) throw ParamError("custom series needs g_1 > 0");
  SeriesFunction s;
  s.kind_ = SeriesKind::Custom;
  s.base_ = std::move(coefficients);
  s.radius_ = kInf;
  s.singularity_ = Singularity::none();
  return s;
}

SeriesFunction SeriesFunction::custom(std::function<double(std::size_t)> rule, double radius,
                                      Singularity singularity) {
  if (!rule) throw ParamError("custom series rule is empty");
  if (!(radius > 0.0)) throw ParamError("custom series radius must be > 0");
  if (std::isfinite(radius) && singularity.kind == SingularityKind::None)
    throw ParamError("a finite radius needs a declared singularity");
  if (singularity.kind == SingularityKind::Pole && !(singularity.order > 0.0))
    throw ParamError("pole order must be > 0");
  const double g0 = rule(0);
  if (!(g0 > 0.0)) throw ParamError("custom series needs g_0 > 0");
  if (!(rule(1) > 0.0)) throw ParamError("custom series needs g_1 > 0");
  SeriesFunction s;
  s.kind_ = SeriesKind::Custom;
  s.rule_ = std::make_shared<const std::function<double(std::size_t)>>(std::move(rule));
  s.rule_g0_ = g0;
  s.radius_ = radius;
  s.singularity_ = singularity;
  return s;
}

SeriesFunction SeriesFunction::pow(double p) const {
  if (!(p > 0.0) || !std::isfinite(p)) throw ParamError("series power must be > 0");
  SeriesFunction s = *this;
  if (kind_ == SeriesKind::Exponential) {
    s.param_ = param_ * p;
    return s;
  }
  s.power_ = power_ * p;
  if (s.singularity_.kind == SingularityKind::Pole) s.singularity_.order *= p;
  return s;
}

bool SeriesFunction::is_finite_polynomial() const noexcept {
  return kind_ == SeriesKind::Custom && !rule_;
}

std::vector<double> SeriesFunction::taylor(std::size_t J) const {
  std::vector<double> g(J + 1, 0.0);
  g[0] = 1.0;
  switch (kind_) {
    case SeriesKind::Geometric:
      for (std::size_t j = 1; j <= J; ++j)
        g[j] = g[j - 1] * (power_ + double(j) - 1.0) / double(j) * param_;
      return g;
    case SeriesKind::Exponential:
      for (std::size_t j = 1; j <= J; ++j) g[j] = g[j - 1] * param_ / double(j);
      return g;
    case SeriesKind::Custom:
      break;
  }
  std::vector<double> base(J + 1, 0.0);
  if (rule_) {
    for (std::size_t j = 0; j <= J; ++j) base[j] = (*rule_)(j) / rule_g0_;
  } else {
    std::copy_n(base_.begin(), std::min(base_.size(), J + 1), base.begin());
  }
  if (power_ == 1.0) return base;
  return miller_power(base, power_, J);
}

void SeriesFunction::check_domain(double u) const {
  if (!(u >= 0.0) || !(u < radius_))
    throw DomainError("series argument " + std::to_string(u) + " outside [0, " +
                      std::to_string(radius_) + ")");
}

void SeriesFunction::eval_base_custom(double u, double out[4]) const {
  // Sums f, f', f'', f''' of the base series.
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  if (!rule_) {
    // Horner for a polynomial and its derivatives.
    const std::size_t n = base_.size();
    for (std::size_t i = n; i-- > 0;) {
      s3 = s3 * u + 3.0 * s2;
      s2 = s2 * u + 2.0 * s1;
      s1 = s1 * u + s0;
      s0 = s0 * u + base_[i];
    }
    out[0] = s0; out[1] = s1; out[2] = s2; out[3] = s3;
    return;
  }
  if (u / radius_ >= kCustomRadiusFraction)
    throw DomainError("custom series cannot be summed this close to its radius of convergence");
  // Tail after term j is bounded by term_j * r / (1 - r), r ~ u / radius
  // (coefficients grow at most like radius^{-j} times a polynomial factor).
  const double r = std::isfinite(radius_) ? u / radius_ : 0.0;
  const double tail_factor = 1.0 / (1.0 - std::max(r, 0.5));
  // pw = {u^j, u^{j-1}, u^{j-2}, u^{j-3}}, zero for negative exponents.
  double pw[4] = {1.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < kMaxSeriesTerms; ++j) {
    const double g = (*rule_)(j) / rule_g0_;
    const double dj = double(j);
    s0 += g * pw[0];
    s1 += dj * g * pw[1];
    s2 += dj * (dj - 1.0) * g * pw[2];
    s3 += dj * (dj - 1.0) * (dj - 2.0) * g * pw[3];
    if (j >= 4) {
      const double term = dj * dj * dj * g * std::max(pw[0], pw[3]);
      if (term * tail_factor < 1e-16 * std::max(s0, 1.0)) break;
    }
    pw[3] = pw[2];
    pw[2] = pw[1];
    pw[1] = pw[0];
    pw[0] *= u;
  }
  out[0] = s0; out[1] = s1; out[2] = s2; out[3] = s3;
}

SeriesValues SeriesFunction::eval(double u) const {
  check_domain(u);
  SeriesValues v;
  switch (kind_) {
    case SeriesKind::Geometric: {
      const double w = 1.0 - param_ * u;
      v.f = std::pow(w, -power_);
      v.h = power_ * param_ / w;
      v.dh = power_ * param_ * param_ / (w * w);
      v.d2h = 2.0 * power_ * param_ * param_ * param_ / (w * w * w);
      return v;
    }
    case SeriesKind::Exponential:
      v.f = std::exp(param_ * u);
      v.h = param_;
      return v;
    case SeriesKind::Custom:
      break;
  }
  double d[4];
  eval_base_custom(u, d);
  const double hb = d[1] / d[0];
  const double dhb = d[2] / d[0] - hb * hb;
  const double d2hb = d[3] / d[0] - 3.0 * d[1] * d[2] / (d[0] * d[0]) + 2.0 * hb * hb * hb;
  v.f = std::pow(d[0], power_);
  v.h = power_ * hb;
  v.dh = power_ * dhb;
  v.d2h = power_ * d2hb;
  return v;
}

LogPointValues SeriesFunction::eval_log(double v) const {
  if (!(v >= 0.0)) throw DomainError("log-point evaluation needs v >= 0");
  LogPointValues out;
  out.u = std::exp(-v);
  switch (kind_) {
    case SeriesKind::Geometric: {
      // w = 1 - y e^{-v}, computed as -expm1(log y - v).
      const double w = -std::expm1(std::log(param_) - v);
      if (!(w > 0.0)) throw DomainError("log-point evaluation at or beyond the pole");
      const double yu = param_ * out.u;
      out.h = power_ * param_ / w;
      out.u_dh = power_ * param_ * yu / (w * w);
      out.u2_d2h = 2.0 * power_ * param_ * yu * yu / (w * w * w);
      return out;
    }
    case SeriesKind::Exponential:
      out.h = param_;
      return out;
    case SeriesKind::Custom:
      break;
  }
  const SeriesValues s = eval(out.u);
  out.h = s.h;
  out.u_dh = out.u * s.dh;
  out.u2_d2h = out.u * out.u * s.d2h;
  return out;
}

double SeriesFunction::log_f(double u) const {
  check_domain(u);
  switch (kind_) {
    case SeriesKind::Geometric:
      return -power_ * std::log1p(-param_ * u);
    case SeriesKind::Exponential:
      return param_ * u;
    case SeriesKind::Custom:
      break;
  }
  double d[4];
  eval_base_custom(u, d);
  return power_ * std::log(d[0]);
}

double SeriesFunction::f_minus_one(double u) const {
  check_domain(u);
  switch (kind_) {
    case SeriesKind::Geometric:
      return std::expm1(-power_ * std::log1p(-param_ * u));
    case SeriesKind::Exponential:
      return std::expm1(param_ * u);
    case SeriesKind::Custom:
      break;
  }
  // base(u) - 1 summed without the constant term.
  double d[4];
  eval_base_custom(u, d);
  const double base_minus_one = d[0] - 1.0;
  if (power_ == 1.0) return base_minus_one;
  return std::expm1(power_ * std::log1p(base_minus_one));
}

std::vector<double> SeriesFunction::power_coefficients(double b, std::size_t J) const {
  return miller_power(taylor(J), b, J);
}

std::vector<double> miller_power(const std::vector<double>& g, double b, std::size_t J) {
  if (!(b >= 0.0) || !std::isfinite(b)) throw ParamError("power must be finite and >= 0");
  if (g.empty() || g[0] != 1.0) throw ParamError("power extraction needs g_0 = 1");
  std::vector<double> c(J + 1, 0.0);
  c[0] = 1.0;
  if (b == 0.0) return c;
  double cmax = 1.0;
  for (std::size_t j = 1; j <= J; ++j) {
    double acc = 0.0;
    const std::size_t imax = std::min(j, g.size() - 1);
    for (std::size_t i = 1; i <= imax; ++i) {
      if (g[i] == 0.0) continue;
      acc += (double(i) * (b + 1.0) - double(j)) * g[i] * c[j - i];
    }
    c[j] = acc / double(j);
    cmax = std::max(cmax, std::abs(c[j]));
  }
  for (std::size_t j = 0; j <= J; ++j) {
    if (c[j] < -1e-12 * cmax) {
      std::ostringstream os;
      os << "coefficient " << j << " of f^" << b << " is negative (" << c[j]
         << "); exponent not admissible for this series";
      throw NegativeCoefficientError(os.str());
    }
    if (c[j] < 0.0) c[j] = 0.0;
  }
  return c;
}

std::string SeriesFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SeriesKind::Geometric:
      os << "geometric(y=" << param_ << ")";
      break;
    case SeriesKind::Exponential:
      os << "exponential(rate=" << param_ << ")";
      break;
    case SeriesKind::Custom:
      os << (rule_ ? "custom(rule)" : "custom(" + std::to_string(base_.size()) + " coefficients)");
      break;
  }
  if (power_ != 1.0) os << "^" << power_;
  return os.str();
}

}  // namespace mulpart
