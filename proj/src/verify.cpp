#include "mulpart/verify.hpp"

#include <gmpxx.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"
#include "mulpart/asymptotics.hpp"
#include "mulpart/catalog.hpp"
#include "mulpart/diagnostics.hpp"
#include "mulpart/errors.hpp"
#include "mulpart/partition_function.hpp"
#include "mulpart/sampler.hpp"

namespace mulpart::verify {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// Euler's pentagonal recurrence.
std::vector<mpz_class> pentagonal(int N) {
  std::vector<mpz_class> p(std::size_t(N + 1));
  p[0] = 1;
  for (int n = 1; n <= N; ++n) {
    mpz_class s = 0;
    for (int k = 1;; ++k) {
      const int g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
      if (g1 > n) break;
      const int sign = (k % 2) ? 1 : -1;
      s += sign * p[std::size_t(n - g1)];
      if (g2 <= n) s += sign * p[std::size_t(n - g2)];
    }
    p[std::size_t(n)] = s;
  }
  return p;
}

long long enumerate_count(int n, int max_part) {
  if (n == 0) return 1;
  long long c = 0;
  for (int k = std::min(n, max_part); k >= 1; --k) c += enumerate_count(n - k, k);
  return c;
}

void enumerate(int n, int max_part, Partition cur, std::vector<Partition>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int k = std::min(n, max_part); k >= 1; --k) {
    Partition next = cur;
    next.add(k, 1);
    enumerate(n - k, k, next, out);
  }
}

double li2_series(double y) {
  long double s = 0.0L, p = 1.0L;
  for (int k = 1; k < 400; ++k) {
    p *= y;
    s += p / ((long double)k * k);
  }
  return double(s);
}

double chi_square_p(double chi, int dof) {
  boost::math::chi_squared d(dof);
  return boost::math::cdf(boost::math::complement(d, chi));
}

// Goodness of fit of draw counts against cell probabilities.
double gof_p(const std::map<Partition, long long>& counts, const std::map<Partition, double>& probs, long long M) {
  double chi = 0.0;
  for (const auto& [p, pr] : probs) {
    const auto it = counts.find(p);
    const double o = it == counts.end() ? 0.0 : double(it->second);
    const double ex = pr * double(M);
    chi += (o - ex) * (o - ex) / ex;
  }
  for (const auto& [p, c] : counts)
    if (!probs.count(p)) return 0.0;  // a partition outside the support
  return chi_square_p(chi, int(probs.size()) - 1);
}

// Two-sample homogeneity test on integer-valued statistics; sparse bins merged.
double two_sample_p(const std::vector<long long>& a, const std::vector<long long>& b) {
  std::map<long long, std::pair<double, double>> bins;
  for (auto v : a) bins[v].first += 1.0;
  for (auto v : b) bins[v].second += 1.0;
  const double na = double(a.size()), nb = double(b.size()), nt = na + nb;
  std::vector<std::pair<double, double>> merged;
  std::pair<double, double> acc{0.0, 0.0};
  for (const auto& [k, c] : bins) {
    acc.first += c.first;
    acc.second += c.second;
    if ((acc.first + acc.second) * std::min(na, nb) / nt >= 10.0) {
      merged.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.first + acc.second > 0.0) {
    if (merged.empty()) merged.push_back(acc);
    else {
      merged.back().first += acc.first;
      merged.back().second += acc.second;
    }
  }
  if (merged.size() < 2) return 1.0;
  double chi = 0.0;
  for (const auto& [oa, ob] : merged) {
    const double row = oa + ob;
    const double ea = row * na / nt, eb = row * nb / nt;
    chi += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  return chi_square_p(chi, int(merged.size()) - 1);
}

Ensemble uniform() { return catalog::make("uniform"); }

Result start(int id, const char* suite) {
  Result r;
  r.id = id;
  r.suite = suite;
  return r;
}

// ---------------------------------------------------------------------------

Result coefficients(const Options&) {
  Result r = start(1, "coefficients");
  Timer tm;
  const auto t = CoefficientTable::build(uniform(), 500);
  const auto p = pentagonal(500);
  int bad = -1;
  for (int m = 0; m <= 500 && bad < 0; ++m)
    if (t.a_string(m) != p[std::size_t(m)].get_str()) bad = m;
  for (int m = 0; m <= 30 && bad < 0; ++m)
    if (t.a_string(m) != std::to_string(enumerate_count(m, m))) bad = m;
  r.seconds = tm.seconds();
  r.passed = t.exact() && bad < 0 && r.seconds < 5.0;
  r.detail = bad < 0 ? fmt("a_n = p(n) for n <= 500, p(500) = %s", t.a_string(500).c_str())
                     : fmt("mismatch at n = %d", bad);
  return r;
}

Result omega_suite(const Options&) {
  Result r = start(2, "omega");
  Timer tm;
  const double a = omega(uniform()), b = omega(catalog::make("weighted(y=0.5)"));
  const double da = std::abs(a - kPi * kPi / 6.0), db = std::abs(b - li2_series(0.5));
  r.passed = da <= 1e-8 && db <= 1e-8;
  r.detail = fmt("|omega(uniform) - pi^2/6| = %.2e, |omega(weighted(0.5)) - Li2(0.5)| = %.2e", da, db);
  r.seconds = tm.seconds();
  return r;
}

Result shape_suite(const Options&) {
  Result r = start(3, "shape");
  Timer tm;
  const std::vector<double> grid = {0.1, 0.5, 1.0, 2.0, 4.0};
  const Ensemble u = uniform(), g = catalog::make("gibbs(1,1)");
  const double om_u = omega(u), om_g = omega(g);
  const double c = kPi / std::sqrt(6.0);
  double eu = 0.0, eg = 0.0, ec = 0.0;
  for (double t : grid) {
    const double pu = limit_shape(u, t, om_u);
    eu = std::max(eu, std::abs(pu + 6.0 / (kPi * kPi) * std::log(1.0 - std::exp(-t))));
    eg = std::max(eg, std::abs(limit_shape(g, t, om_g) - std::exp(-t)));
    const auto [s, psi] = catalog::symmetric_rescale(t, pu, om_u);
    ec = std::max(ec, std::abs(std::exp(-c * psi) + std::exp(-c * s) - 1.0));
  }
  r.passed = eu < 1e-6 && eg < 1e-6 && ec < 1e-6;
  r.detail = fmt("max errors: uniform %.2e, gibbs(1,1) %.2e, symmetric curve %.2e", eu, eg, ec);
  r.seconds = tm.seconds();
  return r;
}

Result tilt_suite(const Options& opt) {
  Result r = start(4, "tilt");
  Timer tm;
  std::vector<std::pair<std::string, Ensemble>> list;
  if (opt.ensemble) {
    list.emplace_back(opt.ensemble->name().empty() ? "config" : opt.ensemble->name(), *opt.ensemble);
  } else {
    for (const char* n : {"uniform", "weighted(y=0.5)", "restricted(odds)", "gibbs(1,1)", "gibbs(1,0.5)",
                          "gibbs(2,2)", "ordered_lists"})
      list.emplace_back(n, catalog::make(n));
  }
  r.passed = true;
  double worst_res = 0.0, worst_time = 0.0, lo = 1e9, hi = 0.0;
  std::string failures;
  for (const auto& [name, e] : list) {
    if (!is_ergodic(e.regime())) {
      failures += " " + name + " is not ergodic;";
      r.passed = false;
      continue;
    }
    const double om = omega(e);
    for (long long n : {100LL, 10'000LL, 1'000'000LL}) {
      Timer one;
      TiltSolution s;
      try {
        s = solve_tilt(e, n);
      } catch (const Error& ex) {
        failures += " " + name + ": " + ex.what() + ";";
        r.passed = false;
        continue;
      }
      const double secs = one.seconds();
      worst_time = std::max(worst_time, secs);
      worst_res = std::max(worst_res, s.residual / double(n));
      if (s.residual > 1e-10 * double(n) || secs >= 1.0) {
        failures += fmt(" %s n=%lld residual %.3g time %.3fs;", name.c_str(), n, s.residual, secs);
        r.passed = false;
      }
      if (n == 1'000'000) {
        const double ratio = s.tau * std::pow(double(n) / (om * e.theta()), 1.0 / (e.beta() + 1.0));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        if (ratio < 0.95 || ratio > 1.05) {
          failures += fmt(" %s tau ratio %.4f;", name.c_str(), ratio);
          r.passed = false;
        }
      }
    }
  }
  r.detail = fmt("%zu ensembles, worst residual/n %.2e, slowest solve %.3fs, tau ratio in [%.4f, %.4f]",
                 list.size(), worst_res, worst_time, lo, hi) + failures;
  r.seconds = tm.seconds();
  return r;
}

Result moments_suite(const Options& opt) {
  Result r = start(5, "moments");
  Timer tm;
  const Ensemble e = uniform();
  const double x = 0.9;
  const GrandCanonicalSampler g(e, x);
  RngStream rng(opt.seed, 0);
  const long long M = 10'000;
  std::vector<double> w(static_cast<std::size_t>(M));
  for (auto& v : w) v = double(g.draw(rng).weight());
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= double(M);
  double m2 = 0.0, m4 = 0.0;
  for (double v : w) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= double(M - 1);
  m4 /= double(M);
  const Moments mo = moments(e, x);
  const double se_mean = std::sqrt(mo.var / double(M));
  const double se_var = std::sqrt((m4 - m2 * m2) / double(M));
  const double zm = (mean - mo.mean) / se_mean, zv = (m2 - mo.var) / se_var;
  r.seconds = tm.seconds();
  r.passed = std::abs(zm) <= 3.0 && std::abs(zv) <= 3.0 && r.seconds < 10.0;
  r.detail = fmt("mean %.4f vs %.4f (z = %.2f), variance %.2f vs %.2f (z = %.2f)", mean, mo.mean, zm, m2, mo.var, zv);
  return r;
}

Result small_canonical_suite(const Options& opt) {
  Result r = start(6, "small-canonical");
  Timer tm;
  const long long M = 70'000;
  RngStream rng(opt.seed, 1);
  std::vector<Partition> all;
  enumerate(5, 5, Partition(), all);

  // uniform: every partition of 5 equally likely
  const Ensemble u = uniform();
  std::map<Partition, double> pu;
  for (const auto& p : all) pu[p] = 1.0 / double(all.size());
  const ExactSampler eu(u, CoefficientTable::build(u, 5));
  RejectionSampler ru(u, 5, 1'000'000);
  std::map<Partition, long long> ce, cr;
  for (long long i = 0; i < M; ++i) ++ce[eu.draw(5, rng)];
  for (long long i = 0; i < M; ++i) ++cr[ru.draw(rng)];
  const double p1 = gof_p(ce, pu, M), p2 = gof_p(cr, pu, M);

  // weighted(2): y^{#parts} over the enumeration
  const Ensemble wy = catalog::make("weighted(y=2)");
  std::map<Partition, double> pw;
  double z = 0.0;
  for (const auto& p : all) z += std::pow(2.0, double(p.num_parts()));
  for (const auto& p : all) pw[p] = std::pow(2.0, double(p.num_parts())) / z;
  const ExactSampler ew(wy, CoefficientTable::build(wy, 5));
  RejectionSampler rw(wy, 5, 1'000'000);
  std::map<Partition, long long> we, wr;
  for (long long i = 0; i < M; ++i) ++we[ew.draw(5, rng)];
  for (long long i = 0; i < M; ++i) ++wr[rw.draw(rng)];
  const double p3 = gof_p(we, pw, M), p4 = gof_p(wr, pw, M);

  // exact vs rejection on a larger case: number of parts, uniform n = 30
  const long long M2 = 20'000;
  const ExactSampler e30(u, CoefficientTable::build(u, 30));
  RejectionSampler r30(u, 30, 1'000'000);
  std::vector<long long> a, b;
  for (long long i = 0; i < M2; ++i) a.push_back(e30.draw(30, rng).num_parts());
  for (long long i = 0; i < M2; ++i) b.push_back(r30.draw(rng).num_parts());
  const double p5 = two_sample_p(a, b);

  r.passed = p1 > 0.01 && p2 > 0.01 && p3 > 0.01 && p4 > 0.01 && p5 > 0.01;
  r.detail = fmt("chi-square p: uniform exact %.3f, rejection %.3f; weighted(2) exact %.3f, rejection %.3f; "
                 "two-sample (n = 30, parts) %.3f",
                 p1, p2, p3, p4, p5);
  r.seconds = tm.seconds();
  return r;
}

Result local_limit_suite(const Options&) {
  Result r = start(7, "local-limit");
  Timer tm;
  const auto pts = local_limit_probe(uniform(), 0.99, {-1.0, 0.0, 1.0});
  r.passed = true;
  std::string d;
  for (const auto& p : pts) {
    const double rel = p.value / p.gaussian - 1.0;
    if (std::abs(rel) > 0.1) r.passed = false;
    d += fmt(" u=%g: %.5f vs %.5f (%+.2f%%);", p.u, p.value, p.gaussian, 100.0 * rel);
  }
  r.seconds = tm.seconds();
  if (r.seconds >= 60.0) r.passed = false;
  r.detail = "x = 0.99," + d;
  return r;
}

Result concentration_suite(const Options& opt) {
  Result r = start(8, "concentration");
  Timer tm;
  ConcentrationOptions co;
  co.seed = opt.seed;
  co.threads = opt.threads;
  co.eps = opt.eps;
  co.hit_threshold = opt.hit_threshold;
  const int M = opt.replicas.value_or(100);
  std::vector<std::tuple<std::string, Ensemble, long long>> runs;
  if (opt.ensemble) {
    runs.emplace_back(opt.ensemble->name(), *opt.ensemble, opt.n.value_or(10'000));
  } else {
    runs.emplace_back("uniform", uniform(), opt.n.value_or(40'000));
    runs.emplace_back("gibbs(1,1)", catalog::make("gibbs(1,1)"), opt.n.value_or(10'000));
  }
  r.passed = true;
  for (const auto& [name, e, n] : runs) {
    const auto rep = concentration_experiment(e, n, M, co);
    std::string worst;
    double wmin = 1.0;
    for (std::size_t j = 0; j < rep.grid.size(); ++j) {
      if (rep.hit_fraction[j] < wmin) wmin = rep.hit_fraction[j];
      if (rep.hit_fraction[j] < rep.hit_threshold) worst += fmt(" t=%g:%.2f", rep.grid[j], rep.hit_fraction[j]);
    }
    if (!rep.passed()) r.passed = false;
    r.detail += fmt("%s n=%lld M=%d min hit %.2f, median sup %.4f%s%s; ", name.c_str(), n, M, wmin, rep.sup_median,
                    worst.empty() ? "" : ", below threshold:", worst.c_str());
  }
  r.seconds = tm.seconds();
  if (r.seconds >= 300.0) r.passed = false;
  return r;
}

Result nonergodic_suite(const Options&) {
  Result r = start(9, "nonergodic");
  Timer tm;
  const Ensemble e = catalog::make("weighted(y=2)");
  const double rho = e.rho();
  const auto rep = variance_ratio_probe(e, {rho * (1.0 - 1e-4)});
  const double ratio = rep.points.front().second;
  r.passed = std::abs(ratio / 2.0 - 1.0) <= 0.05;
  r.detail = fmt("E N^2 / (E N)^2 = %.6f at rho - x = 1e-4 rho (limit %.1f)", ratio, rep.expected_limit);
  r.seconds = tm.seconds();
  return r;
}

Result degenerate_suite(const Options& opt) {
  Result r = start(10, "degenerate");
  Timer tm;
  const Ensemble e = catalog::make("weighted(y=2)");
  const auto small = degenerate_shape_probe(e, 200, 200, opt.seed, opt.threads);
  const auto large = degenerate_shape_probe(e, 2000, 200, opt.seed, opt.threads);
  r.passed = large.mean < 0.05 && large.mean < small.mean;
  r.detail = fmt("mean of sum_{k>=2} k R_k / n: n=200 %.5f, n=2000 %.5f", small.mean, large.mean);
  r.seconds = tm.seconds();
  return r;
}

Result budget_floor_suite(const Options&) {
  Result r = start(11, "budget-floor");
  Timer tm;
  const Ensemble e = uniform();
  const double gamma = rejection_gamma(e.beta()) + 0.1;
  const auto table = CoefficientTable::build(e, 1000, {CoefficientMode::Auto, false});
  r.passed = true;
  for (long long n : {100LL, 500LL, 1000LL}) {
    const double x = solve_tilt(e, n).x;
    const double pm = point_mass(e, x, n, table);
    const double floor = std::pow(double(n), -gamma);
    if (!(pm >= floor)) r.passed = false;
    r.detail += fmt("n=%lld: %.5f vs n^-%.2f = %.5f; ", n, pm, gamma, floor);
  }
  r.seconds = tm.seconds();
  return r;
}

Result condition10_suite(const Options&) {
  Result r = start(12, "condition-10");
  Timer tm;
  const auto c = check_condition_10(WeightSequence::constant(), 10, 10'000);
  const auto ev = check_condition_10(WeightSequence::residues(2, {0}), 10, 10'000);
  bool fails_at_2 = false;
  for (double s : ev.failing_s)
    if (std::abs(s - 2.0) < 1e-9) fails_at_2 = true;
  r.passed = c.worst_ratio <= 0.51 && fails_at_2 && !ev.pass;
  r.detail = fmt("constant worst ratio %.4f at s = %.2f; evens %s at s = 2 (ratio %.4f)", c.worst_ratio, c.worst_s,
                 fails_at_2 ? "fails" : "passes", condition_10_ratio(WeightSequence::residues(2, {0}), 2.0, 10'000));
  r.seconds = tm.seconds();
  return r;
}

using SuiteFn = std::function<Result(const Options&)>;

const std::vector<std::pair<std::string, SuiteFn>>& table() {
  static const std::vector<std::pair<std::string, SuiteFn>> t = {
      {"coefficients", coefficients},       {"omega", omega_suite},
      {"shape", shape_suite},               {"tilt", tilt_suite},
      {"moments", moments_suite},           {"small-canonical", small_canonical_suite},
      {"local-limit", local_limit_suite},   {"concentration", concentration_suite},
      {"nonergodic", nonergodic_suite},     {"degenerate", degenerate_suite},
      {"budget-floor", budget_floor_suite}, {"condition-10", condition10_suite},
  };
  return t;
}

}  // namespace

std::vector<std::string> suites() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : table()) out.push_back(name);
  return out;
}

std::vector<Result> run(const std::string& suite, const Options& opt) {
  std::vector<Result> out;
  for (const auto& [name, fn] : table()) {
    if (suite != "all" && suite != name) continue;
    try {
      out.push_back(fn(opt));
    } catch (const Error& e) {
      Result r = start(0, name.c_str());
      for (std::size_t i = 0; i < table().size(); ++i)
        if (table()[i].first == name) r.id = int(i) + 1;
      r.detail = std::string("error: ") + e.what();
      out.push_back(r);
    }
  }
  if (out.empty()) throw UnknownNameError("unknown verify suite '" + suite + "'");
  return out;
}

std::string to_json(const std::vector<Result>& results) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  bool all = true;
  for (const auto& r : results) {
    j.push_back({{"id", r.id}, {"suite", r.suite}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
    all = all && r.passed;
  }
  nlohmann::ordered_json doc;
  doc["passed"] = all;
  doc["results"] = j;
  return doc.dump(2);
}

}  // namespace mulpart::verify
