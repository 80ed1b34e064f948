#include "mulpart/partition_function.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "mulpart/asymptotics.hpp"
#include "mulpart/errors.hpp"

namespace mulpart {

namespace {

constexpr long long kMaxDenominator = 1'000'000;

// Continued-fraction recovery of p/q with q <= 1e6 such that double(p/q) == v.
std::optional<mpq_class> small_rational(double v) {
  if (!std::isfinite(v) || v < 0.0 || v > 1e15) return std::nullopt;
  if (v == std::floor(v)) return mpq_class(mpz_class(v));
  long double h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  long double x = v;
  for (int i = 0; i < 64; ++i) {
    const long double a = std::floor(x);
    const long double h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > kMaxDenominator) break;
    if (double(h2 / k2) == v) {
      mpq_class q{mpz_class(double(h2)), mpz_class(double(k2))};
      q.canonicalize();
      return q;
    }
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    const long double frac = x - a;
    if (frac == 0) break;
    x = 1 / frac;
  }
  return std::nullopt;
}

// Coefficients of f^b up to degree J, exactly. nullopt when f's parameters
// are not small rationals.
std::optional<std::vector<mpq_class>> exact_factor(const SeriesFunction& f, const mpq_class& b,
                                                   std::size_t J) {
  std::vector<mpq_class> c(J + 1);
  c[0] = 1;
  switch (f.kind()) {
    case SeriesKind::Geometric: {
      auto y = small_rational(f.parameter());
      auto p = small_rational(f.power());
      if (!y || !p) return std::nullopt;
      const mpq_class a = *p * b;
      for (std::size_t j = 1; j <= J; ++j) {
        c[j] = c[j - 1] * (a + mpq_class(long(j - 1))) / mpq_class(long(j)) * *y;
        c[j].canonicalize();
      }
      return c;
    }
    case SeriesKind::Exponential: {
      auto r = small_rational(f.parameter());
      if (!r) return std::nullopt;
      const mpq_class a = *r * b;
      for (std::size_t j = 1; j <= J; ++j) {
        c[j] = c[j - 1] * a / mpq_class(long(j));
        c[j].canonicalize();
      }
      return c;
    }
    case SeriesKind::Custom:
      break;
  }
  std::vector<double> gd;
  mpq_class a;
  if (f.is_finite_polynomial()) {
    auto p = small_rational(f.power());
    if (!p) return std::nullopt;
    a = *p * b;
    gd = f.base_coefficients();
  } else {
    if (f.power() != 1.0) return std::nullopt;
    a = b;
    gd = f.taylor(J);
  }
  std::vector<mpq_class> g;
  for (double v : gd) {
    auto q = small_rational(v);
    if (!q) return std::nullopt;
    g.push_back(*q);
  }
  // j c_j = sum_i (i (a + 1) - j) g_i c_{j-i}
  for (std::size_t j = 1; j <= J; ++j) {
    mpq_class acc = 0;
    for (std::size_t i = 1; i <= std::min(j, g.size() - 1); ++i) {
      if (sgn(g[i]) == 0) continue;
      acc += (mpq_class(long(i)) * (a + 1) - mpq_class(long(j))) * g[i] * c[j - i];
    }
    c[j] = acc / mpq_class(long(j));
    c[j].canonicalize();
    if (sgn(c[j]) < 0)
      throw NegativeCoefficientError("exact power coefficient " + std::to_string(j) + " is negative");
  }
  return c;
}

bool integer_geometric(const Ensemble& e, long long N) {
  const auto& f = e.f();
  if (f.kind() != SeriesKind::Geometric) return false;
  auto y = small_rational(f.parameter());
  auto p = small_rational(f.power());
  if (!y || !p || y->get_den() != 1) return false;
  for (long long k = 1; k <= N; ++k) {
    const double bk = e.b(k);
    if (bk == 0.0) continue;
    auto b = small_rational(bk);
    if (!b) return false;
    mpq_class a = *p * *b;
    a.canonicalize();
    if (a.get_den() != 1) return false;
  }
  return true;
}

long double log_of(const mpz_class& z) {
  if (sgn(z) == 0) return -INFINITY;
  long ex = 0;
  const double d = mpz_get_d_2exp(&ex, z.get_mpz_t());
  return std::log((long double)d) + (long double)ex * std::log(2.0L);
}

long double log_of(const mpq_class& q) {
  if (sgn(q) == 0) return -INFINITY;
  return log_of(mpz_class(q.get_num())) - log_of(mpz_class(q.get_den()));
}

long double log_of(long double v) { return v > 0 ? std::log(v) : -INFINITY; }

}  // namespace

struct CoefficientTable::Impl {
  long long N = 0;
  bool exact = false;
  bool integral = false;
  std::vector<mpz_class> az;
  std::vector<mpq_class> aq;
  std::vector<long double> af;
  std::vector<double> loga;

  double scale = 1.0;
  double log_scale = 0.0;
  bool tables = false;
  // rows[r] holds T_{row_k[r]}(m) s^m for m = row_k[r] + 1 .. N.
  std::vector<std::vector<double>> rows;
  std::vector<long long> row_k;
  std::vector<long long> src;  // src[k] = row index holding T_k, -1 for T_0

  template <class V>
  void snapshot(long long k, const std::vector<V>& row) {
    std::vector<double> r(std::size_t(N - k));
    for (long long m = k + 1; m <= N; ++m) {
      const long double l = log_of(row[std::size_t(m)]) + (long double)m * log_scale;
      r[std::size_t(m - k - 1)] = double(std::exp(l));
    }
    rows.push_back(std::move(r));
    row_k.push_back(k);
  }

  template <class V, class Factor>
  void run(const Ensemble& e, Factor&& factor, std::vector<V>& row) {
    row.assign(std::size_t(N + 1), V(0));
    row[0] = 1;
    src.assign(std::size_t(N + 1), -1);
    for (long long k = 1; k <= N; ++k) {
      const double bk = e.b(k);
      if (bk > 0.0) {
        factor(k, bk, row);
        if (tables) snapshot(k, row);
      }
      src[std::size_t(k)] = rows.empty() ? -1 : (long long)rows.size() - 1;
    }
  }
};

bool exactly_representable(const Ensemble& e, long long N) {
  const auto& f = e.f();
  switch (f.kind()) {
    case SeriesKind::Geometric:
      if (!small_rational(f.parameter()) || !small_rational(f.power())) return false;
      break;
    case SeriesKind::Exponential:
      if (!small_rational(f.parameter())) return false;
      break;
    case SeriesKind::Custom:
      if (f.is_finite_polynomial()) {
        if (!small_rational(f.power())) return false;
        for (double g : f.base_coefficients())
          if (!small_rational(g)) return false;
      } else {
        if (f.power() != 1.0) return false;
        for (double g : f.taylor(std::size_t(std::max<long long>(N, 1))))
          if (!small_rational(g)) return false;
      }
      break;
  }
  for (long long k = 1; k <= N; ++k) {
    const double bk = e.b(k);
    if (bk != 0.0 && !small_rational(bk)) return false;
  }
  return true;
}

std::vector<long double> factor_coefficients(const SeriesFunction& f, double b, std::size_t J) {
  std::vector<long double> c(J + 1, 0.0L);
  c[0] = 1.0L;
  switch (f.kind()) {
    case SeriesKind::Geometric: {
      const long double a = (long double)f.power() * b, y = f.parameter();
      for (std::size_t j = 1; j <= J; ++j) c[j] = c[j - 1] * (a + (long double)(j - 1)) / (long double)j * y;
      return c;
    }
    case SeriesKind::Exponential: {
      const long double a = (long double)f.parameter() * b;
      for (std::size_t j = 1; j <= J; ++j) c[j] = c[j - 1] * a / (long double)j;
      return c;
    }
    case SeriesKind::Custom:
      break;
  }
  const auto d = f.power_coefficients(b, J);
  std::copy(d.begin(), d.end(), c.begin());
  return c;
}

CoefficientTable CoefficientTable::build(const Ensemble& e, long long N, const CoefficientOptions& opt) {
  if (N < 0) throw ParamError("coefficient table needs N >= 0");
  auto impl = std::make_shared<Impl>();
  impl->N = N;
  impl->tables = opt.retain_tables && N <= kMaxTableN;

  if (impl->tables) {
    double s = opt.scale;
    if (!(s > 0.0)) {
      s = std::min(1.0, e.rho());
      if (N >= 1) {
        try {
          s = solve_tilt(e, N).x;
        } catch (const Error&) {
        }
      }
    }
    impl->scale = s;
    impl->log_scale = std::log(s);
  }

  const bool representable = opt.mode != CoefficientMode::Float && exactly_representable(e, N);
  if (opt.mode == CoefficientMode::Exact && !representable)
    throw ParamError("exact coefficients need rational f parameters and rational b_k");
  const bool integral = representable && integer_geometric(e, N);
  const bool exact =
      representable && (integral || opt.mode == CoefficientMode::Exact || N <= kAutoRationalN);

  if (exact && integral) {
    impl->exact = impl->integral = true;
    const mpz_class y(e.f().parameter());
    const auto p = *small_rational(e.f().power());
    impl->run(
        e,
        [&](long long k, double bk, std::vector<mpz_class>& row) {
          mpq_class a = p * *small_rational(bk);
          a.canonicalize();
          const long reps = a.get_num().get_si();
          // Multiply by 1/(1 - y x^k), reps times.
          for (long r = 0; r < reps; ++r) {
            for (long long m = k; m <= N; ++m) {
              if (y == 1) row[std::size_t(m)] += row[std::size_t(m - k)];
              else row[std::size_t(m)] += y * row[std::size_t(m - k)];
            }
          }
        },
        impl->az);
  } else if (exact) {
    impl->exact = true;
    impl->run(
        e,
        [&](long long k, double bk, std::vector<mpq_class>& row) {
          const auto w = *exact_factor(e.f(), *small_rational(bk), std::size_t(N / k));
          for (long long m = N; m >= k; --m) {
            mpq_class acc = 0;
            for (long long j = 1; j * k <= m; ++j) {
              if (sgn(w[std::size_t(j)]) != 0) acc += w[std::size_t(j)] * row[std::size_t(m - j * k)];
            }
            row[std::size_t(m)] += acc;
          }
        },
        impl->aq);
  } else {
    impl->run(
        e,
        [&](long long k, double bk, std::vector<long double>& row) {
          const auto w = factor_coefficients(e.f(), bk, std::size_t(N / k));
          for (long long m = N; m >= k; --m) {
            long double acc = 0;
            for (long long j = 1; j * k <= m; ++j) acc += w[std::size_t(j)] * row[std::size_t(m - j * k)];
            row[std::size_t(m)] += acc;
          }
        },
        impl->af);
  }

  impl->loga.resize(std::size_t(N + 1));
  for (long long m = 0; m <= N; ++m) {
    const auto i = std::size_t(m);
    impl->loga[i] = double(impl->integral ? log_of(impl->az[i])
                           : impl->exact  ? log_of(impl->aq[i])
                                          : log_of(impl->af[i]));
  }
  CoefficientTable t;
  t.impl_ = std::move(impl);
  return t;
}

long long CoefficientTable::N_max() const noexcept { return impl_->N; }
bool CoefficientTable::exact() const noexcept { return impl_->exact; }
bool CoefficientTable::integral() const noexcept { return impl_->integral; }
bool CoefficientTable::has_prefix_tables() const noexcept { return impl_->tables; }
double CoefficientTable::scale() const noexcept { return impl_->scale; }

double CoefficientTable::log_a(long long m) const {
  if (m < 0 || m > impl_->N) throw TruncationError("coefficient index " + std::to_string(m) + " beyond table");
  return impl_->loga[std::size_t(m)];
}

double CoefficientTable::a(long long m) const { return std::exp(log_a(m)); }

bool CoefficientTable::a_is_zero(long long m) const { return std::isinf(log_a(m)); }

std::string CoefficientTable::a_string(long long m) const {
  log_a(m);  // bounds check
  const auto i = std::size_t(m);
  if (impl_->integral) return impl_->az[i].get_str();
  if (impl_->exact) return impl_->aq[i].get_str();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Lg", impl_->af[i]);
  return buf;
}

double CoefficientTable::prefix_scaled(long long k, long long m) const {
  if (!impl_->tables) throw TableError("prefix tables were not retained");
  if (m < 0 || m > impl_->N) throw TableError("prefix table index out of range");
  if (k < 0) throw TableError("prefix table level out of range");
  k = std::min(k, impl_->N);
  const long long r = impl_->src[std::size_t(k)];
  if (r < 0) return m == 0 ? 1.0 : 0.0;
  const long long kr = impl_->row_k[std::size_t(r)];
  // T_k(m) = a_m for m <= k (later factors start at degree k + 1).
  if (m <= kr) return std::exp(impl_->loga[std::size_t(m)] + double(m) * impl_->log_scale);
  return impl_->rows[std::size_t(r)][std::size_t(m - kr - 1)];
}

double log_F(const Ensemble& e, double x) {
  if (!(x >= 0.0) || !(x < e.rho())) throw DomainError("log_F needs 0 <= x < rho");
  if (x == 0.0) return 0.0;
  const double lx = std::log(x);
  const double inv_gap = 1.0 / (1.0 - x);
  double s = 0.0, B = 0.0;
  for (long long k = 1; k < 200'000'000; ++k) {
    const double bk = e.b(k);
    B += bk;
    const double q = std::exp(double(k) * lx);
    const double lf = e.f().log_f(q);
    if (bk > 0.0) s += bk * lf;
    // log f(q) <= q h(q) for series with nonnegative coefficients.
    const double env = B * std::max(lf, q * e.f().eval(q).h) * inv_gap;
    if (q < 0.5 && B > 0.0 && env < 1e-16 * std::max(1.0, s)) break;
    if (q == 0.0) break;
  }
  return s;
}

double point_mass(const Ensemble& e, double x, long long m, const CoefficientTable& table) {
  if (m < 0) throw ParamError("point_mass needs m >= 0");
  if (m > table.N_max())
    throw TruncationError("point_mass index " + std::to_string(m) + " beyond table N = " +
                          std::to_string(table.N_max()));
  if (!(x > 0.0) || !(x < e.rho())) {
    if (x == 0.0) return m == 0 ? 1.0 : 0.0;
    throw DomainError("point_mass needs 0 <= x < rho");
  }
  const double la = table.log_a(m);
  if (std::isinf(la)) return 0.0;
  return std::exp(la + double(m) * std::log(x) - log_F(e, x));
}

NormalizationCheck normalization_check(const Ensemble& e, double x, const CoefficientTable& table) {
  NormalizationCheck c;
  const long long N = table.N_max();
  const double lF = log_F(e, x);
  for (long long m = 0; m <= N; ++m) {
    const double la = table.log_a(m);
    if (!std::isinf(la)) c.sum += std::exp(la + double(m) * std::log(x) - lF);
  }
  // P(N > M) <= F(x') / F(x) (x / x')^{M+1} for x < x' < rho.
  const double rho = e.rho();
  double best = 1.0;
  std::vector<double> cand;
  for (int i = 1; i <= 16; ++i) cand.push_back(x + (rho - x) * (1.0 - std::pow(0.75, i)));
  // The optimal x' has E_{x'} N close to N.
  try {
    if (N >= 1) cand.push_back(solve_tilt(e, N).x);
  } catch (const Error&) {
  }
  for (double xp : cand) {
    if (!(xp > x) || !(xp < rho)) continue;
    const double lb = log_F(e, xp) - lF + double(N + 1) * (std::log(x) - std::log(xp));
    best = std::min(best, std::exp(lb));
  }
  c.tail_bound = best;
  if (c.tail_bound > 1e-6)
    throw TruncationError("probability beyond N = " + std::to_string(N) + " may be " +
                          std::to_string(c.tail_bound));
  return c;
}

std::vector<LocalLimitPoint> local_limit_probe(const Ensemble& e, double x,
                                               const std::vector<double>& u_grid,
                                               const CoefficientTable& table) {
  const Moments mo = moments(e, x);
  const double sd = std::sqrt(mo.var);
  const double lF = log_F(e, x);
  std::vector<LocalLimitPoint> out;
  for (double u : u_grid) {
    LocalLimitPoint p;
    p.u = u;
    p.m = std::llround(mo.mean + u * sd);
    if (p.m < 0) p.m = 0;
    if (p.m > table.N_max())
      throw TruncationError("local limit probe needs a_m for m = " + std::to_string(p.m));
    const double la = table.log_a(p.m);
    p.value = std::isinf(la) ? 0.0 : sd * std::exp(la + double(p.m) * std::log(x) - lF);
    p.gaussian = std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
    out.push_back(p);
  }
  return out;
}

std::vector<LocalLimitPoint> local_limit_probe(const Ensemble& e, double x,
                                               const std::vector<double>& u_grid) {
  const Moments mo = moments(e, x);
  const double sd = std::sqrt(mo.var);
  double umax = 0.0;
  for (double u : u_grid) umax = std::max(umax, u);
  const long long N = std::llround(mo.mean + umax * sd) + 1;
  CoefficientOptions opt;
  opt.retain_tables = false;
  return local_limit_probe(e, x, u_grid, CoefficientTable::build(e, std::max(N, 0LL), opt));
}

}  // namespace mulpart
