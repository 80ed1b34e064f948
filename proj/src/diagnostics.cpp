#include "mulpart/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <memory>
#include <cstdio>
#include <thread>

#include "mulpart/asymptotics.hpp"
#include "json.hpp"
#include "mulpart/errors.hpp"

namespace mulpart {

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * double(v.size() - 1);
  const std::size_t i = std::size_t(pos);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (pos - double(i)) * (v[i + 1] - v[i]);
}

// Runs body(i) for i in [0, count) on a small pool; the first exception wins.
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
  if (threads <= 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(count, 1));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

long long young_function(const Partition& p, double t) {
  long long c = 0;
  const auto& counts = p.counts();
  for (auto it = counts.rbegin(); it != counts.rend() && double(it->first) > t; ++it) c += it->second;
  return c;
}

std::vector<double> scaled_diagram(const Partition& p, double alpha, double normalizer,
                                   const std::vector<double>& grid) {
  if (!(alpha > 0.0) || !(normalizer > 0.0)) throw ParamError("alpha and normalizer must be > 0");
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(alpha / normalizer * double(young_function(p, alpha * t)));
  return out;
}

// ---------------------------------------------------------------------------

bool ConcentrationReport::passed() const {
  return std::all_of(hit_fraction.begin(), hit_fraction.end(), [&](double h) { return h >= hit_threshold; });
}

std::string ConcentrationReport::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["M"] = M;
  j["eps"] = eps;
  j["hit_threshold"] = hit_threshold;
  j["seed"] = seed;
  j["alpha"] = alpha;
  j["grid"] = grid;
  j["phi"] = phi;
  j["steep"] = steep;
  j["hit_fraction"] = hit_fraction;
  j["sup_distance"] = {{"q10", sup_q10}, {"median", sup_median}, {"q90", sup_q90}};
  j["passed"] = passed();
  return j.dump(2);
}

std::string ConcentrationReport::sup_csv() const {
  std::string s = "replica,sup_distance\n";
  char buf[64];
  for (std::size_t i = 0; i < sup_distance.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, sup_distance[i]);
    s += buf;
  }
  return s;
}

ConcentrationReport concentration_experiment(const Ensemble& e, long long n, int M, const ConcentrationOptions& opt) {
  if (!is_ergodic(e.regime()))
    throw RegimeError("concentration experiment needs an ergodic ensemble; regime is " + to_string(e.regime()));
  if (n < 1 || M < 1) throw ParamError("concentration experiment needs n >= 1 and M >= 1");
  ConcentrationReport r;
  r.n = n;
  r.M = M;
  r.eps = opt.eps;
  r.hit_threshold = opt.hit_threshold;
  r.seed = opt.seed;
  r.grid = opt.grid;
  if (r.grid.empty())
    for (int i = 1; i <= 12; ++i) r.grid.push_back(0.25 * i);

  const double om = omega(e);
  for (double t : r.grid) r.phi.push_back(limit_shape(e, t, om));
  // Steepness: central difference of phi times the local grid spacing.
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const double t = r.grid[i];
    double spacing = 0.0;
    if (i + 1 < r.grid.size()) spacing = r.grid[i + 1] - t;
    else if (i > 0) spacing = t - r.grid[i - 1];
    const double h = std::min(1e-3, 0.5 * t);
    double slope = 0.0;
    if (h > 0.0) slope = (limit_shape(e, t + h, om) - limit_shape(e, t - h, om)) / (2.0 * h);
    r.steep.push_back(!(std::abs(slope) * spacing < opt.eps / 4.0));
  }

  SampleMode mode = opt.mode;
  if (mode == SampleMode::Auto) mode = n <= kAutoExactN ? SampleMode::Exact : SampleMode::Rejection;
  std::unique_ptr<ExactSampler> exact;
  if (mode == SampleMode::Exact) exact = std::make_unique<ExactSampler>(e, CoefficientTable::build(e, n));
  const TiltSolution tilt = solve_tilt(e, n);
  r.alpha = 1.0 / (1.0 - tilt.x);

  std::vector<std::vector<double>> scaled(static_cast<std::size_t>(M));
  parallel_for(M, opt.threads, [&](int i) {
    RngStream rng(opt.seed, std::uint64_t(i));
    Partition p;
    if (exact) {
      p = exact->draw(n, rng);
    } else {
      RejectionSampler s(e, n, opt.budget);
      p = s.draw(rng);
    }
    // Area under the diagram is the weight.
    if (!p.consistent() || p.weight() != n) throw Error(ErrorCode::Internal, "sampled partition has the wrong weight");
    scaled[std::size_t(i)] = scaled_diagram(p, r.alpha, double(n), r.grid);
  });

  r.hit_fraction.assign(r.grid.size(), 0.0);
  for (int i = 0; i < M; ++i) {
    double sup = 0.0;
    for (std::size_t j = 0; j < r.grid.size(); ++j) {
      const double d = std::abs(scaled[std::size_t(i)][j] - r.phi[j]);
      sup = std::max(sup, d);
      if (d < opt.eps) r.hit_fraction[j] += 1.0;
    }
    r.sup_distance.push_back(sup);
  }
  for (auto& h : r.hit_fraction) h /= double(M);
  r.sup_q10 = quantile(r.sup_distance, 0.1);
  r.sup_median = quantile(r.sup_distance, 0.5);
  r.sup_q90 = quantile(r.sup_distance, 0.9);
  return r;
}

// ---------------------------------------------------------------------------

VarianceRatioReport variance_ratio_probe(const Ensemble& e, const std::vector<double>& x_grid) {
  const auto sing = e.f().singularity();
  if (!(e.f().radius() < 1.0) || sing.kind != SingularityKind::Pole)
    throw RegimeError("variance ratio probe needs f with a pole inside the unit disc; regime is " +
                      to_string(e.regime()));
  VarianceRatioReport r;
  r.expected_limit = (sing.order + 1.0) / sing.order;
  r.nonergodic = !x_grid.empty();
  for (double x : x_grid) {
    const Moments mo = moments(e, x);
    const double ratio = (mo.var + mo.mean * mo.mean) / (mo.mean * mo.mean);
    r.points.emplace_back(x, ratio);
    if (!(ratio - 1.0 > 0.5)) r.nonergodic = false;
  }
  return r;
}

double degenerate_statistic(const Partition& p) {
  if (p.weight() == 0) return 0.0;
  return double(p.weight() - p.count(1)) / double(p.weight());
}

DegenerateShapeReport degenerate_shape_probe(const Ensemble& e, long long n, int M, std::uint64_t seed, int threads) {
  if (e.regime() != Regime::NonergodicGrandCanonical)
    throw RegimeError("degenerate shape probe needs regime NonergodicGrandCanonical; regime is " +
                      to_string(e.regime()));
  if (n < 1 || M < 1) throw ParamError("degenerate shape probe needs n >= 1 and M >= 1");
  DegenerateShapeReport r;
  r.n = n;
  r.M = M;
  r.conjectural = e.weights().min_weight(n) <= 0.0;
  const ExactSampler sampler(e, CoefficientTable::build(e, n));
  r.values.assign(std::size_t(M), 0.0);
  parallel_for(M, threads, [&](int i) {
    RngStream rng(seed, std::uint64_t(i));
    r.values[std::size_t(i)] = degenerate_statistic(sampler.draw(n, rng));
  });
  double s = 0.0;
  for (double v : r.values) s += v;
  r.mean = s / M;
  r.q10 = quantile(r.values, 0.1);
  r.median = quantile(r.values, 0.5);
  r.q90 = quantile(r.values, 0.9);
  return r;
}

}  // namespace mulpart
