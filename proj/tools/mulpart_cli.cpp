// mulpart command line. Talks to the library only through mulpart.h.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mulpart/mulpart.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kRegime = 2, kBudget = 3, kNumerical = 4, kVerifyFailed = 5 };

struct Failure {
  int code;
  std::string message;
};

int exit_code(mulpart_status s) {
  switch (s) {
    case MULPART_OK: return kOk;
    case MULPART_ERR_DOMAIN:
    case MULPART_ERR_REGIME: return kRegime;
    case MULPART_ERR_BUDGET: return kBudget;
    case MULPART_ERR_NEGATIVE_COEFFICIENT:
    case MULPART_ERR_QUADRATURE:
    case MULPART_ERR_CONVERGENCE:
    case MULPART_ERR_TRUNCATION:
    case MULPART_ERR_TAIL:
    case MULPART_ERR_TABLE:
    case MULPART_ERR_FIT_UNSTABLE:
    case MULPART_ERR_INTERNAL: return kNumerical;
    default: return kUsage;
  }
}

void check(mulpart_status s) {
  if (s != MULPART_OK)
    throw Failure{exit_code(s), std::string(mulpart_status_name(s)) + ": " + mulpart_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { if (p) Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Ensemble = Handle<mulpart_ensemble, mulpart_ensemble_free>;
using Table = Handle<mulpart_table, mulpart_table_free>;
using Rng = Handle<mulpart_rng, mulpart_rng_free>;
using Part = Handle<mulpart_partition, mulpart_partition_free>;
using Rejection = Handle<mulpart_rejection, mulpart_rejection_free>;
using Exact = Handle<mulpart_exact, mulpart_exact_free>;
using CString = Handle<char, mulpart_string_free>;

// stdout or a file, opened lazily so failed commands leave no output file.
class Output {
 public:
  explicit Output(std::string path) : path_(std::move(path)) {}
  std::ostream& stream() {
    if (path_.empty() || path_ == "-") return std::cout;
    if (!file_.is_open()) {
      file_.open(path_, std::ios::binary);
      if (!file_) throw Failure{kUsage, "cannot write " + path_};
    }
    return file_;
  }

 private:
  std::string path_;
  std::ofstream file_;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

mulpart_coeff_mode coeff_mode(bool exact, bool flt, const Ensemble& e) {
  if (exact && flt) throw Failure{kUsage, "--exact and --float are exclusive"};
  if (exact) return MULPART_COEFF_EXACT;
  if (flt) return MULPART_COEFF_FLOAT;
  mulpart_coeff_mode m = MULPART_COEFF_AUTO;
  check(mulpart_ensemble_numerics(e.get(), nullptr, nullptr, nullptr, &m));
  return m;
}

void load(Ensemble& e, const std::string& name) { check(mulpart_ensemble_create(name.c_str(), e.out())); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiplicative partition ensembles: limit shapes, tilts, coefficients and samplers"};
  app.require_subcommand(1);
  std::string ensemble = "uniform", out = "-";
  std::uint64_t seed = 1;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--ensemble,-e", ensemble, "catalog name such as weighted(y=2), or a JSON config path");
    c->add_option("--out,-o", out, "output path ('-' for stdout)");
  };

  double tmax = 5.0;
  int grid = 500;
  auto* shape = app.add_subcommand("shape", "limit shape curve as CSV (t,phi)");
  add_common(shape);
  shape->add_option("--tmax", tmax)->check(CLI::PositiveNumber);
  shape->add_option("--grid", grid)->check(CLI::Range(1, 10'000'000));

  long long n = 0, count = 1;
  double x = -1.0;
  std::string mode = "small-exact";
  long long budget = 0;
  bool exact = false, flt = false;
  auto* sample = app.add_subcommand("sample", "partitions as JSON lines");
  add_common(sample);
  sample->add_option("--mode", mode)->check(CLI::IsMember({"grand", "small-rejection", "small-exact"}));
  sample->add_option("--n", n);
  sample->add_option("--x", x);
  sample->add_option("--count", count)->check(CLI::NonNegativeNumber);
  sample->add_option("--seed", seed);
  sample->add_option("--budget", budget, "rejection attempts per draw (default 20 ceil(n^gamma))");
  sample->add_flag("--exact", exact);
  sample->add_flag("--float", flt);

  auto* tilt = app.add_subcommand("tilt", "solve E_x N = n");
  add_common(tilt);
  tilt->add_option("--n", n)->required();

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "run acceptance suites, JSON report");
  verify->add_option("suite,--suite", suite);
  verify->add_option("--ensemble,-e", ensemble, "run concentration/tilt on this ensemble instead");
  verify->add_option("--out,-o", out);
  verify->add_option("--seed", seed);
  verify->add_option("--n", n, "concentration size");

  auto* coeffs = app.add_subcommand("coeffs", "Taylor coefficients a_0..a_N as CSV rows m,a_m");
  add_common(coeffs);
  coeffs->add_option("--n,-N", n)->required();
  coeffs->add_flag("--exact", exact);
  coeffs->add_flag("--float", flt);

  int replicas = 100;
  double eps = 0.0, threshold = 0.0;
  std::string csv;
  auto* conc = app.add_subcommand("concentration", "scaled Young diagrams against the limit shape");
  add_common(conc);
  conc->add_option("--n", n)->required();
  conc->add_option("--count", replicas)->check(CLI::PositiveNumber);
  conc->add_option("--seed", seed);
  conc->add_option("--eps", eps);
  conc->add_option("--threshold", threshold);
  conc->add_option("--csv", csv, "per-replica sup distances");

  std::vector<double> xs;
  auto* vr = app.add_subcommand("variance-ratio", "E N^2 / (E N)^2 near the pole");
  add_common(vr);
  vr->add_option("--x", xs)->required();

  auto* deg = app.add_subcommand("degenerate", "sum_{k>=2} k R_k / n under the exact sampler");
  add_common(deg);
  deg->add_option("--n", n)->required();
  deg->add_option("--count", replicas)->check(CLI::PositiveNumber);
  deg->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    Output o(out);
    Ensemble e;
    if (!(verify->parsed() && verify->count("--ensemble") == 0)) load(e, ensemble);

    if (shape->parsed()) {
      std::vector<double> t(static_cast<std::size_t>(grid)), phi(static_cast<std::size_t>(grid));
      check(mulpart_shape_curve(e.get(), tmax, grid, t.data(), phi.data()));
      auto& s = o.stream();
      s << "t,phi\n";
      for (int i = 0; i < grid; ++i) s << num(t[i]) << ',' << num(phi[i]) << '\n';
    } else if (sample->parsed()) {
      if (mode == "grand") {
        if (sample->count("--x") == 0) throw Failure{kUsage, "--mode grand requires --x"};
      } else if (n < 1) {
        throw Failure{kUsage, "--mode " + mode + " requires --n >= 1"};
      }
      Rejection rej;
      Exact ex;
      Table table;
      if (mode == "small-rejection") check(mulpart_rejection_create(e.get(), n, budget, rej.out()));
      if (mode == "small-exact") {
        check(mulpart_table_build(e.get(), n, coeff_mode(exact, flt, e), 1, table.out()));
        check(mulpart_exact_create(e.get(), table.get(), ex.out()));
      }
      std::string lines;
      for (long long i = 0; i < count; ++i) {
        Rng rng;
        check(mulpart_rng_create(seed, std::uint64_t(i), rng.out()));
        Part p;
        if (mode == "grand") check(mulpart_sample_grand(e.get(), x, rng.get(), p.out()));
        else if (mode == "small-rejection") check(mulpart_rejection_draw(rej.get(), rng.get(), p.out()));
        else check(mulpart_exact_draw(ex.get(), n, rng.get(), p.out()));
        CString js;
        check(mulpart_partition_json(p.get(), seed, std::uint64_t(i), js.out()));
        lines += js.get();
        lines += '\n';
      }
      o.stream() << lines;
    } else if (tilt->parsed()) {
      if (n < 1) throw Failure{kUsage, "--n must be >= 1"};
      mulpart_tilt t{};
      check(mulpart_solve_tilt(e.get(), n, &t));
      auto& s = o.stream();
      s << "n " << n << "\nx_n " << num(t.x) << "\ntau_n " << num(t.tau) << "\nalpha " << num(t.alpha)
        << "\nmean " << num(t.mean) << "\nvariance " << num(t.variance) << "\nresidual " << num(t.residual)
        << "\niterations " << t.iterations << '\n';
    } else if (verify->parsed()) {
      CString report;
      int passed = 0;
      check(mulpart_verify(suite.c_str(), e.get(), seed, n, report.out(), &passed));
      o.stream() << report.get() << '\n';
      return passed ? kOk : kVerifyFailed;
    } else if (coeffs->parsed()) {
      if (n < 0) throw Failure{kUsage, "--n must be >= 0"};
      Table table;
      check(mulpart_table_build(e.get(), n, coeff_mode(exact, flt, e), 0, table.out()));
      std::string rows;
      for (long long m = 0; m <= n; ++m) {
        CString a;
        check(mulpart_table_coefficient(table.get(), m, a.out()));
        rows += std::to_string(m) + "," + a.get() + "\n";
      }
      o.stream() << rows;
    } else if (conc->parsed()) {
      CString report, sup;
      check(mulpart_concentration(e.get(), n, replicas, seed, eps, threshold, report.out(), sup.out()));
      o.stream() << report.get() << '\n';
      if (!csv.empty()) {
        std::ofstream c(csv, std::ios::binary);
        if (!c) throw Failure{kUsage, "cannot write " + csv};
        c << sup.get();
      }
    } else if (vr->parsed()) {
      CString report;
      check(mulpart_variance_ratio(e.get(), xs.data(), xs.size(), report.out()));
      o.stream() << report.get() << '\n';
    } else if (deg->parsed()) {
      CString report;
      check(mulpart_degenerate_shape(e.get(), n, replicas, seed, report.out()));
      o.stream() << report.get() << '\n';
    }
  } catch (const Failure& f) {
    std::cerr << "mulpart: " << f.message << '\n';
    return f.code;
  }
  return kOk;
}
