#include "mulpart/catalog.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/constants/constants.hpp>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "mulpart/errors.hpp"

namespace mulpart::catalog {

namespace {

using boost::math::constants::pi;

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

double to_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ParamError(what + ": '" + s + "' is not a number");
  return v;
}

// Looks up `key`, falling back to the positional argument at `pos`.
std::optional<std::string> arg(const Spec& s, const std::string& key, std::size_t pos) {
  std::size_t positional = 0;
  for (const auto& [k, v] : s.args) {
    if (k == key) return v;
    if (k.empty() && positional++ == pos) return v;
  }
  return std::nullopt;
}

double number_arg(const Spec& s, const std::string& key, std::size_t pos, double fallback) {
  const auto v = arg(s, key, pos);
  return v ? to_number(*v, s.name + " " + key) : fallback;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Spec parse(const std::string& text) {
  Spec s;
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos) {
    s.name = t;
  } else {
    if (t.back() != ')') throw ParamError("unbalanced parentheses in '" + text + "'");
    s.name = trim(t.substr(0, open));
    const std::string body = t.substr(open + 1, t.size() - open - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) s.args.emplace_back("", item);
      else s.args.emplace_back(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
    }
  }
  std::transform(s.name.begin(), s.name.end(), s.name.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> names() {
  return {"uniform", "weighted", "restricted", "gibbs", "ordered_lists", "ewens"};
}

Entry entry(const std::string& text) {
  const Spec s = parse(text);

  if (s.name == "uniform") {
    Ensemble e(SeriesFunction::geometric(1.0), WeightSequence::constant(), "uniform");
    return {"uniform", e, Regime::ErgodicPoleAtOne, 1.0, pi<double>() * pi<double>() / 6.0, true, ""};
  }
  if (s.name == "weighted") {
    const double y = number_arg(s, "y", 0, 1.0);
    if (!(y > 0.0)) throw ParamError("weighted needs y > 0");
    const std::string name = "weighted(y=" + fmt(y) + ")";
    Ensemble e(SeriesFunction::geometric(y), WeightSequence::constant(), name);
    const Regime r = y < 1.0 ? Regime::ErgodicSupercritical
                     : y == 1.0 ? Regime::ErgodicPoleAtOne
                                : Regime::NonergodicGrandCanonical;
    std::optional<double> om;
    if (y <= 1.0) om = dilog(y);
    return {name, e, r, 1.0, om, y <= 1.0, ""};
  }
  if (s.name == "restricted") {
    if (s.args.empty()) throw ParamError("restricted needs a part set");
    WeightSequence w = WeightSequence::constant();
    std::string label;
    const auto first = s.args.front();
    if (first.first.empty() && (first.second == "evens" || first.second == "odds")) {
      w = WeightSequence::residues(2, {first.second == "evens" ? 0 : 1});
      label = first.second;
    } else if (arg(s, "mod", 99) || arg(s, "res", 99)) {
      const auto m = arg(s, "mod", 99), r = arg(s, "res", 99);
      if (!m || !r) throw ParamError("restricted needs both mod and res");
      const long long mod = (long long)to_number(*m, "restricted mod");
      std::vector<long long> res;
      std::stringstream rs(*r);
      std::string item;
      while (std::getline(rs, item, '|')) res.push_back((long long)to_number(trim(item), "restricted res"));
      if (res.empty()) throw ParamError("restricted residue set is empty");
      w = WeightSequence::residues(mod, res);
      label = "mod=" + *m + ",res=" + *r;
    } else {
      std::vector<long long> members;
      for (const auto& [k, v] : s.args) {
        if (!k.empty()) throw ParamError("restricted: unknown key '" + k + "'");
        members.push_back((long long)to_number(v, "restricted member"));
      }
      w = WeightSequence::members(members);
      for (std::size_t i = 0; i < members.size(); ++i) label += (i ? "," : "") + std::to_string(members[i]);
    }
    const std::string name = "restricted(" + label + ")";
    Ensemble e(SeriesFunction::geometric(1.0), w, name);
    // Without 1 in the set b_1 = 0 and the normalization does not apply.
    const Regime r = e.normalized() && e.beta() > 0.0 ? Regime::ErgodicPoleAtOne : Regime::OutOfScope;
    return {name, e, r, e.beta(), std::nullopt, false, "no closed-form shape"};
  }
  if (s.name == "gibbs" || s.name == "ordered_lists") {
    const bool lists = s.name == "ordered_lists";
    const double theta = lists ? 1.0 : number_arg(s, "theta", 0, 1.0);
    const double beta = lists ? 1.0 : number_arg(s, "beta", 1, 1.0);
    if (!(theta > 0.0)) throw ParamError("gibbs needs theta > 0");
    if (!(beta > 0.0)) throw ParamError("gibbs needs beta > 0");
    const std::string name = lists ? "ordered_lists" : "gibbs(theta=" + fmt(theta) + ",beta=" + fmt(beta) + ")";
    Ensemble e(SeriesFunction::exponential(), WeightSequence::power_density(theta, beta), name);
    const double om = theta * beta * boost::math::tgamma(beta + 1.0);
    return {name, e, Regime::ErgodicSupercritical, beta, om, true,
            theta != 1.0 ? "b_1 = theta is traded into f = exp(theta z)" : ""};
  }
  if (s.name == "ewens") {
    const double theta = number_arg(s, "theta", 0, 1.0);
    if (!(theta > 0.0)) throw ParamError("ewens needs theta > 0");
    const std::string name = "ewens(theta=" + fmt(theta) + ")";
    Ensemble e(SeriesFunction::exponential(), WeightSequence::power_density(theta, 0.0), name);
    return {name, e, Regime::OutOfScope, 0.0, std::nullopt, false, "beta = 0: B_k grows like log k"};
  }
  throw UnknownNameError("unknown ensemble '" + s.name + "'");
}

Ensemble make(const std::string& text) { return entry(text).ensemble; }

std::optional<double> reference_shape(const std::string& text, double t) {
  if (!(t >= 0.0)) throw DomainError("reference shape needs t >= 0");
  const Spec s = parse(text);
  const Entry en = entry(text);
  if (!en.closed_shape) return std::nullopt;
  if (s.name == "uniform" || s.name == "weighted") {
    const double y = s.name == "uniform" ? 1.0 : number_arg(s, "y", 0, 1.0);
    if (t == 0.0 && y == 1.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-y * std::exp(-t)) / dilog(y);
  }
  const double beta = en.beta;
  // (Gamma(beta+1, t) - t^beta e^{-t}) / (beta Gamma(beta+1))
  const double g = boost::math::tgamma(beta + 1.0);
  const double upper = boost::math::gamma_q(beta + 1.0, t);
  return (upper * g - std::pow(t, beta) * std::exp(-t)) / (beta * g);
}

std::optional<double> reference_alpha(const std::string& text, long long n) {
  const Spec s = parse(text);
  const Entry en = entry(text);
  const double nd = double(n);
  if (s.name == "uniform") return std::sqrt(6.0 * nd) / pi<double>();
  if (s.name == "weighted") {
    const double y = number_arg(s, "y", 0, 1.0);
    if (y > 1.0) return std::nullopt;
    return std::sqrt(nd / dilog(y));
  }
  if (s.name == "gibbs" || s.name == "ordered_lists") {
    const double theta = s.name == "gibbs" ? number_arg(s, "theta", 0, 1.0) : 1.0;
    const double beta = en.beta;
    return std::pow(theta * boost::math::tgamma(beta + 1.0), -1.0 / (beta + 1.0)) * std::pow(nd, 1.0 / (beta + 1.0));
  }
  return std::nullopt;
}

double dilog(double y) {
  if (!(y <= 1.0)) throw DomainError("dilog implemented for y <= 1");
  const double p2 = pi<double>() * pi<double>();
  if (y == 1.0) return p2 / 6.0;
  if (y == 0.0) return 0.0;
  if (y < -1.0) {
    // Li2(y) = -pi^2/6 - ln^2(-y)/2 - Li2(1/y)
    const double l = std::log(-y);
    return -p2 / 6.0 - 0.5 * l * l - dilog(1.0 / y);
  }
  if (y > 0.5) {
    // Li2(y) = pi^2/6 - ln y ln(1-y) - Li2(1-y)
    return p2 / 6.0 - std::log(y) * std::log1p(-y) - dilog(1.0 - y);
  }
  if (y < -0.5) {
    // Li2(y) = Li2(y^2)/2 - Li2(-y)
    return 0.5 * dilog(y * y) - dilog(-y);
  }
  double sum = 0.0, p = 1.0;
  for (int k = 1; k < 200; ++k) {
    p *= y;
    const double term = p / (double(k) * double(k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

std::pair<double, double> symmetric_rescale(double t, double phi, double omega) {
  if (!(omega > 0.0)) throw ParamError("omega must be > 0");
  const double r = std::sqrt(omega);
  return {t / r, phi * r};
}

}  // namespace mulpart::catalog
