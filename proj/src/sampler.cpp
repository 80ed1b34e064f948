#include "mulpart/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mulpart/asymptotics.hpp"
#include "mulpart/errors.hpp"

namespace mulpart {

namespace {

constexpr double kUnionBound = 1e-9;
constexpr double kTableTail = 1e-12;
constexpr std::size_t kMaxTableTerms = 1'000'000;

}  // namespace

// ---------------------------------------------------------------------------
// Partition

void Partition::add(long long k, long long r) {
  if (k < 1) throw ParamError("part sizes must be >= 1");
  if (r < 0) throw ParamError("counts must be >= 0");
  if (r == 0) return;
  counts_[k] += r;
  weight_ += k * r;
  parts_ += r;
}

long long Partition::count(long long k) const {
  const auto it = counts_.find(k);
  return it == counts_.end() ? 0 : it->second;
}

long long Partition::largest_part() const noexcept { return counts_.empty() ? 0 : counts_.rbegin()->first; }

std::vector<long long> Partition::parts() const {
  std::vector<long long> p;
  for (auto it = counts_.rbegin(); it != counts_.rend(); ++it)
    for (long long i = 0; i < it->second; ++i) p.push_back(it->first);
  return p;
}

bool Partition::consistent() const {
  long long w = 0, c = 0;
  for (auto [k, r] : counts_) {
    if (k < 1 || r < 1) return false;
    w += k * r;
    c += r;
  }
  return w == weight_ && c == parts_;
}

std::string Partition::to_json(std::uint64_t seed, std::uint64_t stream) const {
  std::ostringstream os;
  os << "{\"n\":" << weight_ << ",\"counts\":[";
  bool first = true;
  for (auto [k, r] : counts_) {
    os << (first ? "" : ",") << '[' << k << ',' << r << ']';
    first = false;
  }
  os << "],\"seed\":" << seed << ",\"stream\":" << stream << '}';
  return os.str();
}

// ---------------------------------------------------------------------------
// Count laws

CountLaw::CountLaw(const Ensemble& e, long long k, double x) {
  if (!(x >= 0.0) || !(x < e.rho())) throw DomainError("count law needs 0 <= x < rho");
  const double b = e.b(k);
  const double q = std::pow(x, double(k));
  if (b == 0.0 || q == 0.0) return;
  const auto& f = e.f();
  mean_ = b * q * f.eval(q).h;
  switch (f.kind()) {
    case SeriesKind::Geometric: {
      const double shape = f.power() * b;
      q_ = f.parameter() * q;
      shape_ = shape;
      kind_ = shape == 1.0 ? Kind::Geometric : Kind::NegativeBinomial;
      return;
    }
    case SeriesKind::Exponential:
      kind_ = Kind::Poisson;
      lambda_ = f.parameter() * b * q;
      p0_ = std::exp(-lambda_);
      return;
    case SeriesKind::Custom:
      break;
  }
  // Inverse CDF over c_j q^j / f(q)^b, extended until the tail is below 1e-12.
  kind_ = Kind::Table;
  const double log_total = b * f.log_f(q);
  for (std::size_t J = 16;; J *= 2) {
    if (J > kMaxTableTerms)
      throw TailError("count distribution for k = " + std::to_string(k) + " needs more than 1e6 terms");
    const auto c = f.power_coefficients(b, J);
    cdf_.assign(J + 1, 0.0);
    double acc = 0.0;
    for (std::size_t j = 0; j <= J; ++j) {
      if (c[j] > 0.0) acc += std::exp(std::log(c[j]) + double(j) * std::log(q) - log_total);
      cdf_[j] = acc;
    }
    if (acc >= 1.0 - kTableTail) break;
  }
}

long long CountLaw::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::Zero:
      return 0;
    case Kind::Geometric:
      return rng.geometric(q_);
    case Kind::NegativeBinomial:
      return rng.negative_binomial(shape_, q_);
    case Kind::Poisson: {
      if (lambda_ >= 30.0) return rng.poisson(lambda_);
      double u = rng.uniform();
      double p = p0_;
      long long j = 0;
      while (u > p) {
        u -= p;
        ++j;
        p *= lambda_ / double(j);
        if (p == 0.0) break;
      }
      return j;
    }
    case Kind::Table: {
      const double u = rng.uniform() * cdf_.back();
      return (long long)(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Grand canonical

GrandCanonicalSampler::GrandCanonicalSampler(const Ensemble& e, double x) : x_(x) {
  if (!(x >= 0.0) || !(x < e.rho())) throw DomainError("grand canonical sampler needs 0 <= x < rho");
  if (x == 0.0) return;
  // Scan b_k (f(x^k) - 1) until an envelope bound on the rest is negligible.
  std::vector<double> term;
  const double lx = std::log(x);
  double B = 0.0;
  for (long long k = 1;; ++k) {
    const double bk = e.b(k);
    B += bk;
    const double q = std::exp(double(k) * lx);
    const double fm1 = q > 0.0 ? e.f().f_minus_one(q) : 0.0;
    term.push_back(bk * fm1);
    if (q == 0.0) break;
    if (q < 0.5 && B > 0.0 && double(k) * B * fm1 / (1.0 - x) < 1e-3 * kUnionBound) break;
    if (k > 100'000'000) throw ConvergenceError("grand canonical truncation did not converge");
  }
  double suffix = 0.0;
  long long K = (long long)term.size();
  while (K > 0 && suffix + term[std::size_t(K - 1)] < kUnionBound) {
    suffix += term[std::size_t(K - 1)];
    --K;
  }
  k_star_ = K;
  for (long long k = 1; k <= K; ++k) {
    if (e.b(k) > 0.0) {
      ks_.push_back(k);
      laws_.emplace_back(e, k, x);
    }
  }
}

long long GrandCanonicalSampler::sample_count(long long k, RngStream& rng) const {
  const auto it = std::lower_bound(ks_.begin(), ks_.end(), k);
  if (it == ks_.end() || *it != k) return 0;
  return laws_[std::size_t(it - ks_.begin())].sample(rng);
}

Partition GrandCanonicalSampler::draw(RngStream& rng) const {
  Partition p;
  for (std::size_t i = 0; i < ks_.size(); ++i) p.add(ks_[i], laws_[i].sample(rng));
  return p;
}

bool GrandCanonicalSampler::draw_bounded(RngStream& rng, long long limit, Partition& out) const {
  out = Partition();
  long long w = 0;
  for (std::size_t i = ks_.size(); i-- > 0;) {
    const long long r = laws_[i].sample(rng);
    if (r == 0) continue;
    w += ks_[i] * r;
    if (w > limit) return false;
    out.add(ks_[i], r);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Small canonical by rejection

double rejection_gamma(double beta) { return (beta + 2.0) / (2.0 * beta + 2.0); }

long long default_budget(const Ensemble& e, long long n) {
  const double beta = std::isfinite(e.beta()) && e.beta() >= 0.0 ? e.beta() : 0.0;
  return 20 * (long long)std::ceil(std::pow(double(n), rejection_gamma(beta)));
}

namespace {

double tilt_for(const Ensemble& e, long long n) {
  if (n < 1) throw ParamError("small canonical sampling needs n >= 1");
  return solve_tilt(e, n).x;
}

}  // namespace

RejectionSampler::RejectionSampler(const Ensemble& e, long long n, long long budget)
    : n_(n), budget_(budget > 0 ? budget : default_budget(e, std::max(n, 1LL))), grand_(e, tilt_for(e, n)) {}

double RejectionSampler::acceptance_rate() const noexcept {
  return attempts_ > 0 ? double(accepted_) / double(attempts_) : 0.0;
}

Partition RejectionSampler::draw(RngStream& rng) {
  Partition p;
  for (long long a = 0; a < budget_; ++a) {
    ++attempts_;
    if (grand_.draw_bounded(rng, n_, p) && p.weight() == n_) {
      ++accepted_;
      return p;
    }
  }
  std::ostringstream os;
  os << "no partition of weight " << n_ << " after " << budget_ << " attempts (acceptance rate "
     << acceptance_rate() << " over " << attempts_ << " attempts so far)";
  throw BudgetExhausted(attempts_, budget_, acceptance_rate(), os.str());
}

// ---------------------------------------------------------------------------
// Small canonical from prefix tables

ExactSampler::ExactSampler(const Ensemble& e, CoefficientTable table) : e_(e), table_(std::move(table)) {
  if (!table_.has_prefix_tables()) throw TableError("exact sampler needs retained prefix tables");
  const long long N = table_.N_max();
  const long double s = table_.scale();
  w_.resize(std::size_t(N + 1));
  for (long long k = 1; k <= N; ++k) {
    const double bk = e_.b(k);
    if (bk == 0.0) continue;
    auto c = factor_coefficients(e_.f(), bk, std::size_t(N / k));
    const long double sk = std::pow(s, (long double)k);
    long double sp = 1.0L;
    for (auto& v : c) {
      v *= sp;
      sp *= sk;
    }
    w_[std::size_t(k)] = std::move(c);
  }
}

Partition ExactSampler::draw(long long n, RngStream& rng) const {
  if (n < 0) throw ParamError("n must be >= 0");
  if (n > table_.N_max())
    throw TableError("table covers n <= " + std::to_string(table_.N_max()) + ", asked for " + std::to_string(n));
  if (table_.a_is_zero(n)) throw DomainError("no partition of " + std::to_string(n) + " in this ensemble");
  Partition p;
  long long m = n;
  std::vector<long double> weights;
  for (long long k = n; k >= 1 && m > 0; --k) {
    const auto& w = w_[std::size_t(k)];
    if (w.empty()) continue;
    const long long J = m / k;
    weights.assign(std::size_t(J + 1), 0.0L);
    long double total = 0.0L;
    for (long long j = 0; j <= J; ++j) {
      const long double t = w[std::size_t(j)] * (long double)table_.prefix_scaled(k - 1, m - k * j);
      total += t;
      weights[std::size_t(j)] = total;
    }
    if (!(total > 0.0L)) throw TableError("prefix tables admit no completion at k = " + std::to_string(k));
    const long double u = (long double)rng.uniform() * total;
    long long j = 0;
    while (j < J && weights[std::size_t(j)] < u) ++j;
    p.add(k, j);
    m -= k * j;
  }
  if (m != 0 || p.weight() != n) throw TableError("exact sampler produced an inconsistent partition");
  return p;
}

// ---------------------------------------------------------------------------
// Free functions

long long sample_count(const Ensemble& e, long long k, double x, RngStream& rng) {
  return CountLaw(e, k, x).sample(rng);
}

Partition sample_grand(const Ensemble& e, double x, RngStream& rng) { return GrandCanonicalSampler(e, x).draw(rng); }

Partition sample_small_rejection(const Ensemble& e, long long n, RngStream& rng, long long budget) {
  if (n == 0) return Partition();
  RejectionSampler s(e, n, budget);
  return s.draw(rng);
}

Partition sample_small_exact(const Ensemble& e, long long n, RngStream& rng, const CoefficientTable& table) {
  if (n == 0) return Partition();
  return ExactSampler(e, table).draw(n, rng);
}

}  // namespace mulpart
