#include <mmjump/model_io.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <mmjump/errors.hpp>
#include <mmjump/format.hpp>

namespace mmjump {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ModelError(path + ": " + what); }

const json& member(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

double nonnegative(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (x < 0.0) fail(path, "must be >= 0, got " + format_double(x));
  return x;
}

double optional_nonnegative(const json& obj, const std::string& key, const std::string& path, double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return nonnegative(*it, join(path, key));
}

const json& array(const json& v, const std::string& path, std::size_t expected = 0) {
  if (!v.is_array()) fail(path, "expected an array");
  if (expected > 0 && v.size() != expected) {
    fail(path, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
  }
  return v;
}

// A number is broadcast to all coordinates; an array must have dim entries.
Point vector_field(const json& v, std::size_t dim, const std::string& path) {
  if (v.is_number()) return Point(dim, number(v, path));
  array(v, path, dim);
  Point out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = number(v[i], index(path, i));
  return out;
}

Marginal parse_marginal(const json& obj, const std::string& path) {
  const json& fam = member(obj, "family", path);
  if (!fam.is_string()) fail(join(path, "family"), "expected a string");
  const std::string f = fam.get<std::string>();
  if (f == "point") return PointMass{number(member(obj, "v0", path), join(path, "v0"))};
  if (f == "gauss") {
    const double sd = number(member(obj, "sd", path), join(path, "sd"));
    if (!(sd > 0.0)) fail(join(path, "sd"), "must be > 0");
    return Gaussian{number(member(obj, "mean", path), join(path, "mean")), sd};
  }
  if (f == "uniform") {
    const double lo = number(member(obj, "lo", path), join(path, "lo"));
    const double hi = number(member(obj, "hi", path), join(path, "hi"));
    if (!(lo < hi)) fail(path, "uniform needs lo < hi");
    return Uniform{lo, hi};
  }
  fail(join(path, "family"), "unknown family '" + f + "' (point, gauss, uniform)");
}

JumpComponent parse_component(const json& obj, std::size_t dim, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  JumpComponent c;
  if (obj.contains("marginals")) {
    const json& ms = array(obj["marginals"], join(path, "marginals"), dim);
    for (std::size_t i = 0; i < dim; ++i) c.marginals.push_back(parse_marginal(ms[i], index(join(path, "marginals"), i)));
  } else {
    if (dim != 1) fail(path, "components of a model with dim > 1 need \"marginals\"");
    c.marginals.push_back(parse_marginal(obj, path));
  }
  c.rate = nonnegative(member(obj, "rate", path), join(path, "rate"));
  c.kappa = optional_nonnegative(obj, "kappa", path, 0.0);
  c.ucap = optional_nonnegative(obj, "ucap", path, c.kappa > 0.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0);
  if (std::isnan(c.ucap)) fail(join(path, "ucap"), "required when kappa > 0");
  c.validate(path);
  return c;
}

SaturatingTerm parse_term(const json& obj, std::size_t dim, const std::string& path) {
  SaturatingTerm t;
  t.offset = vector_field(member(obj, "offset", path), dim, join(path, "offset"));
  t.slope = obj.contains("slope") ? vector_field(obj["slope"], dim, join(path, "slope")) : Point(dim, 0.0);
  if (obj.contains("cap")) {
    t.cap = vector_field(obj["cap"], dim, join(path, "cap"));
    for (std::size_t i = 0; i < dim; ++i) {
      if (t.cap[i] < 0.0) fail(join(path, "cap"), "must be >= 0");
    }
  } else {
    t.cap = Point(dim, std::numeric_limits<double>::infinity());
  }
  return t;
}

Displacement parse_displacement(const json& v, std::size_t dim, const std::string& path) {
  if (v.is_number() || v.is_array()) return Displacement::constant(vector_field(v, dim, path));
  if (!v.is_object()) fail(path, "expected a number, an array, or an object");
  if (v.contains("terms")) {
    const json& ts = array(v["terms"], join(path, "terms"));
    Displacement d;
    for (std::size_t k = 0; k < ts.size(); ++k) d.terms.push_back(parse_term(ts[k], dim, index(join(path, "terms"), k)));
    if (d.terms.empty()) d = Displacement::constant(Point(dim, 0.0));
    return d;
  }
  return Displacement{{parse_term(v, dim, path)}};
}

template <class J>
J scalar_or_vector(const Point& p) {
  if (p.size() == 1) return J(p[0]);
  return J(p);
}

template <class J>
J term_to_json(const SaturatingTerm& t) {
  J out;
  out["offset"] = scalar_or_vector<J>(t.offset);
  bool has_slope = false;
  for (double s : t.slope) has_slope = has_slope || s != 0.0;
  if (!has_slope) return out;
  out["slope"] = scalar_or_vector<J>(t.slope);
  bool finite = true;
  for (double c : t.cap) finite = finite && std::isfinite(c);
  if (finite) {
    out["cap"] = scalar_or_vector<J>(t.cap);
  } else {
    for (double c : t.cap) {
      if (std::isfinite(c)) throw ValidationError("cannot serialize a displacement mixing finite and infinite caps");
    }
  }
  return out;
}

ordered_json marginal_to_json(const Marginal& m) {
  ordered_json out;
  if (const auto* p = std::get_if<PointMass>(&m)) {
    out["family"] = "point";
    out["v0"] = p->v0;
  } else if (const auto* g = std::get_if<Gaussian>(&m)) {
    out["family"] = "gauss";
    out["mean"] = g->mean;
    out["sd"] = g->sd;
  } else {
    const auto& u = std::get<Uniform>(m);
    out["family"] = "uniform";
    out["lo"] = u.lo;
    out["hi"] = u.hi;
  }
  return out;
}

}  // namespace

ModelFile parse_model(const json& doc) {
  if (!doc.is_object()) fail("(root)", "expected an object");
  const json& schema = member(doc, "schema", "");
  if (!schema.is_string() || schema.get<std::string>() != kModelSchema) {
    fail("schema", "expected \"" + std::string(kModelSchema) + "\"");
  }
  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail("name", "expected a string");
    name = doc["name"].get<std::string>();
  }
  std::size_t dim = 1;
  if (doc.contains("dim")) {
    if (!doc["dim"].is_number_unsigned() || doc["dim"].get<std::size_t>() == 0) fail("dim", "expected an integer >= 1");
    dim = doc["dim"].get<std::size_t>();
  }

  const json& sw = member(doc, "switching", "");
  SwitchSpec spec;
  const json& q = array(member(sw, "q", "switching"), "switching.q");
  const std::size_t n = q.size();
  if (n == 0) fail("switching.q", "at least one state required");
  for (std::size_t i = 0; i < n; ++i) spec.q.push_back(nonnegative(q[i], index("switching.q", i)));
  if (sw.contains("states")) {
    const json& st = array(sw["states"], "switching.states", n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!st[i].is_string()) fail(index("switching.states", i), "expected a string");
      spec.states.push_back(st[i].get<std::string>());
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) spec.states.push_back(std::to_string(i));
  }
  const json& P = array(member(sw, "P", "switching"), "switching.P", n);
  spec.P.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row = index("switching.P", i);
    array(P[i], row, n);
    for (std::size_t j = 0; j < n; ++j) {
      const double p = number(P[i][j], index(row, j));
      if (p < 0.0 || p > 1.0) fail(index(row, j), "must lie in [0, 1]");
      spec.P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p;
    }
  }

  const json& jumps = array(member(doc, "jumps", ""), "jumps", n);
  const json& drift = member(doc, "drift", "");
  const json& rho = array(member(drift, "rho", "drift"), "drift.rho", n);
  const json& d = array(member(drift, "d", "drift"), "drift.d", n);
  std::vector<StateKernel> states(n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::string jp = index("jumps", x);
    const json& comps = array(jumps[x], jp);
    for (std::size_t k = 0; k < comps.size(); ++k) states[x].components.push_back(parse_component(comps[k], dim, index(jp, k)));
    states[x].rho = nonnegative(rho[x], index("drift.rho", x));
    states[x].displacement = parse_displacement(d[x], dim, index("drift.d", x));
  }
  std::optional<double> L;
  if (doc.contains("L")) {
    L = number(doc["L"], "L");
    if (!(*L > 0.0)) fail("L", "must be > 0");
  }
  return ModelFile{std::move(name), std::move(spec), JumpModel(dim, std::move(states), L)};
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError(path.string() + ": " + e.what());
  }
  try {
    return parse_model(doc);
  } catch (const ModelError& e) {
    throw ModelError(path.string() + ": " + e.what());
  }
}

ordered_json model_to_json(const std::string& name, const SwitchSpec& switching, const JumpModel& model) {
  ordered_json out;
  out["schema"] = kModelSchema;
  out["name"] = name;
  out["dim"] = model.dim();
  const std::size_t n = switching.size();
  ordered_json P = ordered_json::array();
  for (std::size_t i = 0; i < n; ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(switching.P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    P.push_back(std::move(row));
  }
  out["switching"] = {{"states", switching.states}, {"q", switching.q}, {"P", std::move(P)}};

  ordered_json jumps = ordered_json::array();
  ordered_json rho = ordered_json::array();
  ordered_json disp = ordered_json::array();
  for (const auto& s : model.states()) {
    ordered_json comps = ordered_json::array();
    for (const auto& c : s.components) {
      ordered_json j;
      if (c.dim() == 1) {
        j = marginal_to_json(c.marginals[0]);
      } else {
        ordered_json ms = ordered_json::array();
        for (const auto& m : c.marginals) ms.push_back(marginal_to_json(m));
        j["marginals"] = std::move(ms);
      }
      j["rate"] = c.rate;
      if (c.kappa > 0.0) {
        j["kappa"] = c.kappa;
        j["ucap"] = c.ucap;
      }
      comps.push_back(std::move(j));
    }
    jumps.push_back(std::move(comps));
    rho.push_back(s.rho);
    if (s.displacement.terms.size() == 1) {
      disp.push_back(term_to_json<ordered_json>(s.displacement.terms[0]));
    } else {
      ordered_json terms = ordered_json::array();
      for (const auto& t : s.displacement.terms) terms.push_back(term_to_json<ordered_json>(t));
      disp.push_back({{"terms", std::move(terms)}});
    }
  }
  out["jumps"] = std::move(jumps);
  out["drift"] = {{"rho", std::move(rho)}, {"d", std::move(disp)}};
  if (model.growth_bound()) out["L"] = *model.growth_bound();
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace mmjump
