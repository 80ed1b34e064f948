#include "mulpart/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mulpart/errors.hpp"

namespace mulpart {

namespace {

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

constexpr long long kMaxMomentTerms = 200'000'000;

}  // namespace

// ---------------------------------------------------------------------------
// WeightSequence

WeightSequence WeightSequence::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ParamError("constant weight must be > 0");
  WeightSequence w;
  w.rule_ = WeightRule::Constant;
  w.theta_ = value;
  w.declared_.beta = 1.0;
  w.declared_.theta = value;
  return w;
}

WeightSequence WeightSequence::residues(long long modulus, std::vector<long long> residues) {
  if (modulus < 1) throw ParamError("indicator modulus must be >= 1");
  if (residues.empty()) throw ParamError("indicator set is empty");
  for (auto& r : residues) r = ((r % modulus) + modulus) % modulus;
  std::sort(residues.begin(), residues.end());
  residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
  WeightSequence w;
  w.rule_ = WeightRule::IndicatorSet;
  w.modulus_ = modulus;
  w.set_ = std::move(residues);
  w.declared_.beta = 1.0;
  w.declared_.theta = double(w.set_.size()) / double(modulus);
  std::ostringstream os;
  os << "{k : k mod " << modulus << " in {";
  for (std::size_t i = 0; i < w.set_.size(); ++i) os << (i ? "," : "") << w.set_[i];
  os << "}}";
  w.label_ = os.str();
  return w;
}

WeightSequence WeightSequence::members(std::vector<long long> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  members.erase(std::remove_if(members.begin(), members.end(), [](long long k) { return k < 1; }),
                members.end());
  if (members.empty()) throw ParamError("indicator set is empty");
  WeightSequence w;
  w.rule_ = WeightRule::IndicatorSet;
  w.finite_set_ = true;
  w.set_ = std::move(members);
  w.declared_.beta = 0.0;
  w.declared_.theta = double(w.set_.size());
  w.label_ = "finite set of " + std::to_string(w.set_.size()) + " parts";
  return w;
}

WeightSequence WeightSequence::indicator(std::function<bool(long long)> member, std::string label,
                                         DeclaredGrowth declared) {
  if (!member) throw ParamError("indicator predicate is empty");
  WeightSequence w;
  w.rule_ = WeightRule::IndicatorSet;
  w.member_ = std::move(member);
  w.label_ = std::move(label);
  w.declared_ = declared;
  return w;
}

WeightSequence WeightSequence::power_law(double theta, double beta) {
  if (!(theta > 0.0) || !(beta > 0.0)) throw ParamError("power law needs theta > 0 and beta > 0");
  WeightSequence w;
  w.rule_ = WeightRule::PowerLaw;
  w.theta_ = theta;
  w.beta_ = beta;
  w.declared_.beta = beta;
  w.declared_.theta = theta;
  return w;
}

WeightSequence WeightSequence::power_density(double theta, double beta) {
  if (!(theta > 0.0) || !(beta >= 0.0)) throw ParamError("power density needs theta > 0 and beta >= 0");
  WeightSequence w;
  w.rule_ = WeightRule::PowerDensity;
  w.theta_ = theta;
  w.beta_ = beta;
  w.declared_.beta = beta;
  w.declared_.theta = beta > 0.0 ? theta / beta : 0.0;
  if (beta > 0.0) w.declared_.zeta = std::min(1.0, beta);
  return w;
}

WeightSequence WeightSequence::explicit_periodic(std::vector<double> values) {
  if (values.empty()) throw ParamError("explicit weight list is empty");
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParamError("explicit weights must be finite and >= 0");
    sum += v;
  }
  if (!(sum > 0.0)) throw ParamError("explicit weights are all zero");
  WeightSequence w;
  w.rule_ = WeightRule::Explicit;
  w.values_ = std::move(values);
  w.declared_.beta = 1.0;
  w.declared_.theta = sum / double(w.values_.size());
  return w;
}

WeightSequence WeightSequence::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw ParamError("weight scale must be > 0");
  WeightSequence w = *this;
  w.scale_ *= factor;
  w.declared_.theta *= factor;
  return w;
}

WeightSequence WeightSequence::with_declared(const DeclaredGrowth& d) const {
  WeightSequence w = *this;
  if (std::isfinite(d.beta)) w.declared_.beta = d.beta;
  if (std::isfinite(d.theta)) w.declared_.theta = d.theta;
  if (d.zeta) w.declared_.zeta = d.zeta;
  if (d.chi) w.declared_.chi = d.chi;
  return w;
}

double WeightSequence::weight(long long k) const {
  if (k < 1) return 0.0;
  switch (rule_) {
    case WeightRule::Constant:
      return scale_ * theta_;
    case WeightRule::IndicatorSet:
      if (member_) return member_(k) ? scale_ : 0.0;
      if (finite_set_) return std::binary_search(set_.begin(), set_.end(), k) ? scale_ : 0.0;
      return std::binary_search(set_.begin(), set_.end(), k % modulus_) ? scale_ : 0.0;
    case WeightRule::PowerLaw: {
      if (k == 1) return scale_ * theta_;
      const double kd = double(k);
      // k^beta - (k-1)^beta = -k^beta expm1(beta log1p(-1/k))
      return -scale_ * theta_ * std::pow(kd, beta_) * std::expm1(beta_ * std::log1p(-1.0 / kd));
    }
    case WeightRule::PowerDensity:
      return scale_ * theta_ * std::pow(double(k), beta_ - 1.0);
    case WeightRule::Explicit:
      return scale_ * values_[std::size_t((k - 1) % (long long)values_.size())];
  }
  return 0.0;
}

double WeightSequence::prefix_sum(long long k) const {
  if (k < 1) return 0.0;
  switch (rule_) {
    case WeightRule::Constant:
      return scale_ * theta_ * double(k);
    case WeightRule::PowerLaw:
      return scale_ * theta_ * std::pow(double(k), beta_);
    case WeightRule::IndicatorSet:
      if (!member_) {
        if (finite_set_) {
          return scale_ * double(std::upper_bound(set_.begin(), set_.end(), k) - set_.begin());
        }
        long long count = 0;
        for (long long r : set_) {
          if (r == 0) count += k / modulus_;
          else if (k >= r) count += (k - r) / modulus_ + 1;
        }
        return scale_ * double(count);
      }
      break;
    case WeightRule::Explicit: {
      const long long p = (long long)values_.size();
      const double period = std::accumulate(values_.begin(), values_.end(), 0.0);
      double s = double(k / p) * period;
      for (long long i = 0; i < k % p; ++i) s += values_[std::size_t(i)];
      return scale_ * s;
    }
    case WeightRule::PowerDensity:
      break;
  }
  // Kahan summation for the rules without a closed form.
  double s = 0.0, c = 0.0;
  for (long long j = 1; j <= k; ++j) {
    const double y = weight(j) - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

bool WeightSequence::integer_valued() const noexcept {
  switch (rule_) {
    case WeightRule::Constant:
      return is_integer(scale_ * theta_);
    case WeightRule::IndicatorSet:
      return is_integer(scale_);
    case WeightRule::PowerLaw:
      return beta_ == 1.0 && is_integer(scale_ * theta_);
    case WeightRule::PowerDensity:
      return is_integer(beta_) && beta_ >= 1.0 && is_integer(scale_ * theta_);
    case WeightRule::Explicit:
      return std::all_of(values_.begin(), values_.end(),
                         [this](double v) { return is_integer(scale_ * v); });
  }
  return false;
}

double WeightSequence::min_weight(long long k_max) const {
  double m = std::numeric_limits<double>::infinity();
  for (long long k = 1; k <= k_max; ++k) m = std::min(m, weight(k));
  return m;
}

std::string WeightSequence::describe() const {
  std::ostringstream os;
  switch (rule_) {
    case WeightRule::Constant:
      os << "constant(" << theta_ << ")";
      break;
    case WeightRule::IndicatorSet:
      os << "indicator(" << label_ << ")";
      break;
    case WeightRule::PowerLaw:
      os << "power_law(theta=" << theta_ << ", beta=" << beta_ << ")";
      break;
    case WeightRule::PowerDensity:
      os << "power_density(theta=" << theta_ << ", beta=" << beta_ << ")";
      break;
    case WeightRule::Explicit:
      os << "explicit(period " << values_.size() << ")";
      break;
  }
  if (scale_ != 1.0) os << "*" << scale_;
  return os.str();
}

double prefix_sum(const WeightSequence& w, long long k) { return w.prefix_sum(k); }

// ---------------------------------------------------------------------------
// Ensemble

std::string to_string(Regime r) {
  switch (r) {
    case Regime::ErgodicSupercritical: return "ErgodicSupercritical";
    case Regime::ErgodicPoleAtOne: return "ErgodicPoleAtOne";
    case Regime::NonergodicGrandCanonical: return "NonergodicGrandCanonical";
    case Regime::EssentialSubcritical: return "EssentialSubcritical";
    case Regime::OutOfScope: return "OutOfScope";
  }
  return "Unknown";
}

bool is_ergodic(Regime r) {
  return r == Regime::ErgodicSupercritical || r == Regime::ErgodicPoleAtOne;
}

Ensemble::Ensemble(SeriesFunction f, WeightSequence weights, std::string name)
    : f_(std::move(f)), weights_(std::move(weights)), name_(std::move(name)) {
  const double b1 = weights_.weight(1);
  if (b1 > 0.0) {
    normalized_ = true;
    if (b1 != 1.0) {
      f_ = f_.pow(b1);
      weights_ = weights_.scaled(1.0 / b1);
    }
  }
  regime_ = classify_regime(*this);
}

double Ensemble::rho() const noexcept { return std::min(f_.radius(), 1.0); }

Regime classify_regime(const Ensemble& e) {
  const double beta = e.weights().declared().beta;
  if (!e.normalized() || !(beta > 0.0)) return Regime::OutOfScope;
  const double r = e.f().radius();
  const Singularity s = e.f().singularity();
  if (r > 1.0 + 1e-12) return Regime::ErgodicSupercritical;
  if (std::abs(r - 1.0) <= 1e-12)
    return s.kind == SingularityKind::Pole ? Regime::ErgodicPoleAtOne : Regime::OutOfScope;
  if (s.kind == SingularityKind::Pole) return Regime::NonergodicGrandCanonical;
  return Regime::EssentialSubcritical;
}

Moments moments(const Ensemble& e, double x) {
  const double rho = e.rho();
  if (!(x >= 0.0) || !(x < rho))
    throw DomainError("x = " + std::to_string(x) + " outside [0, rho = " + std::to_string(rho) + ")");
  Moments m;
  if (x == 0.0) return m;
  const double lx = std::log(x);
  const double inv_gap = 1.0 / (1.0 - x);
  double B = 0.0;
  for (long long k = 1; k <= kMaxMomentTerms; ++k) {
    const double bk = e.b(k);
    B += bk;
    const double q = std::exp(double(k) * lx);
    const SeriesValues sv = e.f().eval(q);
    const double kd = double(k);
    if (bk > 0.0) {
      const double t = kd * bk * q * sv.h;
      m.mean += t;
      m.var += kd * t + kd * kd * bk * q * q * sv.dh;
    }
    m.terms = k;
    // Envelope bound on the remaining tail: terms are dominated by
    // k^3 B_k x^k (h + x^k h') and decay geometrically once x^k is small.
    const double env = kd * kd * kd * B * q * (sv.h + q * sv.dh) * inv_gap;
    if (q < 0.5 && B > 0.0 && env <= 1e-15 * m.var) break;
    if (q == 0.0) break;
    if (k == kMaxMomentTerms) throw ConvergenceError("moment series did not converge");
  }
  return m;
}

double mean_N(const Ensemble& e, double x) { return moments(e, x).mean; }
double var_N(const Ensemble& e, double x) { return moments(e, x).var; }

double mean_count(const Ensemble& e, long long k, double x) {
  if (!(x >= 0.0) || !(x < e.rho())) throw DomainError("x outside [0, rho)");
  const double q = std::pow(x, double(k));
  return e.b(k) * q * e.f().eval(q).h;
}

// ---------------------------------------------------------------------------
// Regularity diagnostics

bool in_K_s(long long k, double s) {
  if (k < 1) return false;
  if (s <= 1.0) return true;
  const double j = std::round(double(k) / s);
  // Check neighbouring j as well; rounding can land one off for large k.
  for (double jj = j - 1; jj <= j + 1; jj += 1.0) {
    if (std::abs(double(k) - s * jj) < 0.5) return true;
  }
  return false;
}

double condition_10_ratio(const WeightSequence& w, double s, long long k_max) {
  double num = 0.0, B = 0.0, worst = 0.0;
  for (long long k = 1; k <= k_max; ++k) {
    const double bk = w.weight(k);
    B += bk;
    if (bk != 0.0 && in_K_s(k, s)) num += bk;
    if (B > 0.0) worst = std::max(worst, num / B);
  }
  return worst;
}

Condition10Report check_condition_10(const WeightSequence& w, int s_max, long long k_max) {
  if (s_max < 2) throw ParamError("condition (10) check needs s_max >= 2");
  if (k_max < 1) throw ParamError("condition (10) check needs k_max >= 1");
  Condition10Report rep;
  const auto& chi = w.declared().chi;
  const int steps = (s_max - 2) * 20;
  for (int i = 0; i <= steps; ++i) {
    const double s = 2.0 + double(i) / 20.0;
    const double r = condition_10_ratio(w, s, k_max);
    rep.per_s.emplace_back(s, r);
    if (r > rep.worst_ratio) {
      rep.worst_ratio = r;
      rep.worst_s = s;
    }
    const bool fails = chi ? (r > *chi) : (r >= 1.0 - 1e-9);
    if (fails) rep.failing_s.push_back(s);
  }
  rep.pass = rep.failing_s.empty();
  return rep;
}

Condition11Report check_condition_11(const WeightSequence& w, long long k_max) {
  if (k_max < 16) throw ParamError("condition (11) check needs k_max >= 16");
  Condition11Report rep;
  const int imax = int(std::floor(std::log2(double(k_max))));
  std::vector<double> B(std::size_t(1) << imax, 0.0);  // B[j-1] = B_j
  {
    double s = 0.0, c = 0.0;
    for (std::size_t j = 1; j <= B.size(); ++j) {
      const double y = w.weight((long long)j) - c;
      const double t = s + y;
      c = (t - s) - y;
      s = t;
      B[j - 1] = s;
    }
  }
  // Least squares on the upper half of the dyadic grid.
  auto fit = [](const std::vector<std::pair<double, double>>& pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(pts.size());
    for (auto [x, y] : pts) {
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return std::make_pair(slope, (sy - slope * sx) / n);
  };
  const int ilo = std::max(2, imax / 2);
  std::vector<std::pair<double, double>> pts;
  for (int i = ilo; i <= imax; ++i) {
    const double k = std::ldexp(1.0, i);
    const double Bk = B[std::size_t(k) - 1];
    if (Bk > 0.0) pts.emplace_back(std::log(k), std::log(Bk));
  }
  if (pts.size() < 2) throw ParamError("weights vanish on the fitting range");
  const auto [slope, intercept] = fit(pts);
  rep.fitted_beta = slope;
  rep.fitted_theta = std::exp(intercept);
  rep.out_of_scope = rep.fitted_beta < 0.2;

  const auto& d = w.declared();
  rep.reference_beta = d.beta > 0.0 ? d.beta : rep.fitted_beta;
  rep.reference_theta = d.theta > 0.0 ? d.theta : rep.fitted_theta;
  rep.zeta = d.zeta ? *d.zeta : 1.0 - rep.reference_beta / 2.0;

  std::vector<std::pair<double, double>> rem;
  bool all_zero = true;
  for (int i = 1; i <= imax; ++i) {
    const std::size_t lo = (std::size_t(1) << (i - 1)) + 1, hi = std::size_t(1) << i;
    double r = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) {
      const double ref = rep.reference_theta * std::pow(double(j), rep.reference_beta);
      const double dev = std::abs(B[j - 1] - ref);
      if (dev > 1e-9 * std::max(1.0, B[j - 1])) r = std::max(r, dev);
    }
    if (r > 0.0) all_zero = false;
    if (i >= ilo && r > 0.0) rem.emplace_back(std::log(double(hi)), std::log(r));
  }
  if (all_zero) {
    rep.exact = true;
    rep.remainder_exponent = -std::numeric_limits<double>::infinity();
    rep.compliant = !rep.out_of_scope;
    return rep;
  }
  if (rem.size() < 2) {
    // Remainder only on the low blocks: bounded, exponent 0 at worst.
    rep.remainder_exponent = 0.0;
  } else {
    rep.remainder_exponent = fit(rem).first;
  }
  rep.compliant = !rep.out_of_scope && rep.remainder_exponent <= rep.reference_beta - rep.zeta + 1e-3;
  return rep;
}

}  // namespace mulpart
