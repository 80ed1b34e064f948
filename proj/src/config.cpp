#include "mulpart/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mulpart/catalog.hpp"
#include "mulpart/errors.hpp"

namespace mulpart {

namespace {

using json = nlohmann::json;

struct Ctx {
  std::string origin;
  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    throw ConfigError(origin + ": " + field + ": " + msg);
  }
};

const json& require(const Ctx& c, const json& j, const std::string& ptr, const char* key) {
  if (!j.is_object() || !j.contains(key)) c.fail(ptr + "/" + key, "missing");
  return j.at(key);
}

double number(const Ctx& c, const json& j, const std::string& ptr) {
  if (!j.is_number()) c.fail(ptr, "expected a number");
  return j.get<double>();
}

double number_or(const Ctx& c, const json& obj, const std::string& ptr, const char* key, double fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return number(c, obj.at(key), ptr + "/" + key);
}

template <class T>
std::vector<T> list(const Ctx& c, const json& j, const std::string& ptr) {
  if (!j.is_array()) c.fail(ptr, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) c.fail(ptr + "/" + std::to_string(i), "expected a number");
    out.push_back(j[i].get<T>());
  }
  return out;
}

SeriesFunction parse_f(const Ctx& c, const json& f) {
  const std::string ptr = "/f";
  if (!f.is_object()) c.fail(ptr, "expected an object");
  const json& kind = require(c, f, ptr, "kind");
  if (!kind.is_string()) c.fail(ptr + "/kind", "expected a string");
  const std::string k = kind.get<std::string>();
  const json params = f.value("params", json::object());
  const std::string pp = ptr + "/params";
  if (k == "geometric")
    return SeriesFunction::geometric(number_or(c, params, pp, "y", 1.0), number_or(c, params, pp, "power", 1.0));
  if (k == "exponential") return SeriesFunction::exponential(number_or(c, params, pp, "rate", 1.0));
  if (k == "custom") return SeriesFunction::custom(list<double>(c, require(c, f, ptr, "coefficients"), ptr + "/coefficients"));
  c.fail(ptr + "/kind", "unknown kind '" + k + "' (geometric, exponential, custom)");
}

WeightSequence parse_weights(const Ctx& c, const json& w) {
  const std::string ptr = "/weights";
  if (!w.is_object()) c.fail(ptr, "expected an object");
  const json& rule = require(c, w, ptr, "rule");
  if (!rule.is_string()) c.fail(ptr + "/rule", "expected a string");
  const std::string r = rule.get<std::string>();
  const json params = w.value("params", json::object());
  const std::string pp = ptr + "/params";
  if (r == "constant") return WeightSequence::constant(number_or(c, params, pp, "value", 1.0));
  if (r == "residues") {
    const long long mod = (long long)number(c, require(c, params, pp, "modulus"), pp + "/modulus");
    return WeightSequence::residues(mod, list<long long>(c, require(c, params, pp, "residues"), pp + "/residues"));
  }
  if (r == "members") return WeightSequence::members(list<long long>(c, require(c, params, pp, "members"), pp + "/members"));
  if (r == "power_law" || r == "power_density") {
    const double theta = number(c, require(c, params, pp, "theta"), pp + "/theta");
    const double beta = number(c, require(c, params, pp, "beta"), pp + "/beta");
    return r == "power_law" ? WeightSequence::power_law(theta, beta) : WeightSequence::power_density(theta, beta);
  }
  if (r == "explicit") return WeightSequence::explicit_periodic(list<double>(c, require(c, params, pp, "values"), pp + "/values"));
  c.fail(ptr + "/rule", "unknown rule '" + r + "' (constant, residues, members, power_law, power_density, explicit)");
}

Numerics parse_numerics(const Ctx& c, const json& doc) {
  Numerics n;
  if (!doc.contains("numerics")) return n;
  const json& j = doc.at("numerics");
  const std::string ptr = "/numerics";
  if (!j.is_object()) c.fail(ptr, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = it.key(), p = ptr + "/" + key;
    if (key == "tilt_tolerance") n.tilt.rel_tolerance = number(c, *it, p);
    else if (key == "tilt_max_iterations") n.tilt.max_iterations = int(number(c, *it, p));
    else if (key == "eps") n.eps = number(c, *it, p);
    else if (key == "hit_threshold") n.hit_threshold = number(c, *it, p);
    else if (key == "budget") n.budget = (long long)number(c, *it, p);
    else if (key == "coefficients") {
      const std::string m = it->is_string() ? it->get<std::string>() : "";
      if (m == "auto") n.coefficients = CoefficientMode::Auto;
      else if (m == "exact") n.coefficients = CoefficientMode::Exact;
      else if (m == "float") n.coefficients = CoefficientMode::Float;
      else c.fail(p, "expected \"auto\", \"exact\" or \"float\"");
    } else {
      c.fail(p, "unknown numerics key");
    }
  }
  if (!(n.tilt.rel_tolerance > 0.0)) c.fail(ptr + "/tilt_tolerance", "must be > 0");
  if (!(n.eps > 0.0)) c.fail(ptr + "/eps", "must be > 0");
  if (!(n.hit_threshold >= 0.0 && n.hit_threshold <= 1.0)) c.fail(ptr + "/hit_threshold", "must be in [0, 1]");
  return n;
}

std::string catalog_text(const Ctx& c, const json& doc) {
  const json& name = doc.at("catalog");
  if (!name.is_string()) c.fail("/catalog", "expected a string");
  std::string text = name.get<std::string>();
  if (doc.contains("params")) {
    const json& p = doc.at("params");
    if (!p.is_object()) c.fail("/params", "expected an object");
    std::string args;
    for (auto it = p.begin(); it != p.end(); ++it) {
      std::string v;
      if (it->is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << it->get<double>();
        v = os.str();
      } else if (it->is_string()) {
        v = it->get<std::string>();
      } else {
        c.fail("/params/" + it.key(), "expected a number or string");
      }
      args += (args.empty() ? "" : ",") + it.key() + "=" + v;
    }
    if (!args.empty()) text += "(" + args + ")";
  }
  return text;
}

}  // namespace

EnsembleConfig parse_config(const std::string& text, const std::string& origin) {
  const Ctx c{origin};
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line/column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON");
  }
  if (!doc.is_object()) c.fail("/", "expected an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    static const char* known[] = {"catalog", "params", "f", "weights", "declared", "numerics", "name"};
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
      c.fail("/" + it.key(), "unknown field");
  }
  Numerics num = parse_numerics(c, doc);

  try {
    if (doc.contains("catalog")) {
      if (doc.contains("f") || doc.contains("weights")) c.fail("/catalog", "catalog and explicit f/weights are exclusive");
      const std::string name = catalog_text(c, doc);
      const auto en = catalog::entry(name);
      return {en.ensemble, en.name, num};
    }
    const SeriesFunction f = parse_f(c, require(c, doc, "", "f"));
    WeightSequence w = parse_weights(c, require(c, doc, "", "weights"));
    if (doc.contains("declared")) {
      const json& d = doc.at("declared");
      if (!d.is_object()) c.fail("/declared", "expected an object");
      DeclaredGrowth g = w.declared();
      g.beta = number_or(c, d, "/declared", "beta", g.beta);
      g.theta = number_or(c, d, "/declared", "theta", g.theta);
      if (d.contains("zeta")) g.zeta = number(c, d.at("zeta"), "/declared/zeta");
      if (d.contains("chi")) g.chi = number(c, d.at("chi"), "/declared/chi");
      w = w.with_declared(g);
    }
    std::string name = doc.value("name", std::string("custom"));
    return {Ensemble(f, w, name), name, num};
  } catch (const ConfigError&) {
    throw;
  } catch (const UnknownNameError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

EnsembleConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

EnsembleConfig resolve_ensemble(const std::string& name_or_path) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(name_or_path, ec)) return load_config(name_or_path);
  if (name_or_path.size() > 5 && name_or_path.ends_with(".json")) throw IoError("cannot read " + name_or_path);
  const auto en = catalog::entry(name_or_path);
  return {en.ensemble, en.name, Numerics{}};
}

}  // namespace mulpart
