#include "galmod/json_io.hpp"

#include <json.hpp>

#include "galmod/errors.hpp"

namespace galmod {

namespace {

using Json = nlohmann::ordered_json;

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const Json& field(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing field");
  return *it;
}

long long as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

unsigned as_unsigned(const Json& j, const std::string& path) {
  const long long v = as_int(j, path);
  if (v < 0 || v > std::numeric_limits<int>::max()) fail(path, "expected a nonnegative integer");
  return static_cast<unsigned>(v);
}

bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

Vec as_vector(const Json& j, const std::string& path, unsigned p, std::size_t len) {
  if (!j.is_array()) fail(path, "expected an array");
  if (j.size() != len) {
    fail(path, "expected " + std::to_string(len) + " entries, got " + std::to_string(j.size()));
  }
  Vec out(len);
  for (std::size_t k = 0; k < len; ++k) {
    const std::string at = path + "[" + std::to_string(k) + "]";
    const long long v = as_int(j[k], at);
    if (v < 0 || v >= static_cast<long long>(p)) fail(at, "entry outside [0, p)");
    out[k] = static_cast<Scalar>(v);
  }
  return out;
}

FpMatrix as_matrix(const Json& j, const std::string& path, unsigned p, std::size_t rows,
                   std::size_t cols) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  if (j.size() != rows) {
    fail(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  }
  FpMatrix m(p, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Vec row = as_vector(j[r], path + "[" + std::to_string(r) + "]", p, cols);
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, row[c]);
  }
  return m;
}

Json matrix_json(const FpMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
  return rows;
}

Json level_json(const std::optional<Level>& m) {
  if (!m) return "n/a";
  if (m->is_neg_infinity()) return "-inf";
  return m->value();
}

std::optional<Level> level_from(const Json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "n/a") return std::nullopt;
    if (s == "-inf") return Level::neg_infinity();
    fail(path, "expected an integer, \"-inf\" or \"n/a\"");
  }
  const long long v = as_int(j, path);
  if (v < 0) fail(path, "negative level; use \"-inf\"");
  return Level(static_cast<int>(v));
}

std::vector<std::size_t> size_list(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(as_unsigned(j[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Json params_json(const SynthParams& params) {
  Json j;
  j["p"] = params.p;
  j["n"] = params.n;
  j["m"] = level_json(params.m);
  j["e"] = params.e;
  j["xi_in_F"] = params.xi_in_F;
  j["minus_one_is_norm"] =
      params.minus_one_is_norm ? Json(*params.minus_one_is_norm) : Json(nullptr);
  j["shuffle_seed"] = params.shuffle_seed ? Json(*params.shuffle_seed) : Json(nullptr);
  return j;
}

}  // namespace

std::string level_label(const std::optional<Level>& m) {
  if (!m) return "n/a";
  return m->to_string();
}

std::string datum_to_json(const GaloisDatum& d) {
  Json j;
  j["p"] = d.p;
  j["n"] = d.n;
  j["xi_in_F"] = d.xi_in_F;
  j["minus_one_is_norm"] = d.minus_one_is_norm ? Json(*d.minus_one_is_norm) : Json(nullptr);
  j["sigma"] = matrix_json(d.J.sigma());
  Json levels = Json::array();
  for (const auto& l : d.levels) {
    Json lj;
    lj["dim"] = l.space.dim();
    lj["sigma_i"] = matrix_json(l.space.sigma());
    lj["eps"] = matrix_json(l.eps);
    lj["norm"] = matrix_json(l.norm);
    Json inter = Json::object();
    for (const auto& [k, m] : l.inter_norm) inter[std::to_string(k)] = matrix_json(m);
    lj["inter_norm"] = inter;
    lj["a_class"] = l.a_class ? Json(*l.a_class) : Json(nullptr);
    levels.push_back(lj);
  }
  j["levels"] = levels;
  return j.dump(1);
}

GaloisDatum datum_from_json(const std::string& text) {
  const Json j = parse(text);
  GaloisDatum d;
  d.p = as_unsigned(field(j, "p", "$"), "$.p");
  if (!is_prime(d.p) || d.p > kMaxPrime) fail("$.p", "expected a prime <= 65521");
  d.n = as_unsigned(field(j, "n", "$"), "$.n");
  if (d.n == 0) fail("$.n", "expected n >= 1");
  d.xi_in_F = as_bool(field(j, "xi_in_F", "$"), "$.xi_in_F");
  const Json& mo = field(j, "minus_one_is_norm", "$");
  if (!mo.is_null()) d.minus_one_is_norm = as_bool(mo, "$.minus_one_is_norm");

  const Json& sigma = field(j, "sigma", "$");
  if (!sigma.is_array()) fail("$.sigma", "expected an array of rows");
  const std::size_t dim = sigma.size();
  try {
    d.J = GModule(d.p, d.n, as_matrix(sigma, "$.sigma", d.p, dim, dim));
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    fail("$.sigma", e.what());
  }

  const Json& levels = field(j, "levels", "$");
  if (!levels.is_array()) fail("$.levels", "expected an array");
  if (levels.size() != d.n + 1) {
    fail("$.levels", "expected n+1 = " + std::to_string(d.n + 1) + " levels, got " +
                         std::to_string(levels.size()));
  }
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string at = "$.levels[" + std::to_string(i) + "]";
    dims.push_back(as_unsigned(field(levels[i], "dim", at), at + ".dim"));
  }
  d.levels.resize(d.n + 1);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::string at = "$.levels[" + std::to_string(i) + "]";
    const Json& lj = levels[i];
    LevelData& l = d.levels[i];
    const std::size_t di = dims[i];
    try {
      l.space = GModule(d.p, static_cast<unsigned>(i),
                        as_matrix(field(lj, "sigma_i", at), at + ".sigma_i", d.p, di, di));
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      fail(at + ".sigma_i", e.what());
    }
    l.eps = as_matrix(field(lj, "eps", at), at + ".eps", d.p, dim, di);
    l.norm = as_matrix(field(lj, "norm", at), at + ".norm", d.p, di, dim);
    const Json& inter = field(lj, "inter_norm", at);
    if (!inter.is_object()) fail(at + ".inter_norm", "expected an object");
    for (const auto& [key, value] : inter.items()) {
      const std::string kat = at + ".inter_norm." + key;
      std::size_t target = 0;
      try {
        std::size_t used = 0;
        target = std::stoul(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        fail(kat, "key must be a level index");
      }
      if (target >= i) fail(kat, "inter_norm target must be below the level");
      l.inter_norm[static_cast<unsigned>(target)] = as_matrix(value, kat, d.p, dims[target], di);
    }
    const Json& a = field(lj, "a_class", at);
    if (!a.is_null()) l.a_class = as_vector(a, at + ".a_class", d.p, di);
  }
  return d;
}

std::string decomposition_to_json(const Decomposition& dec) {
  Json j;
  j["m"] = level_json(dec.m);
  j["x_generator"] = dec.x_generator ? Json(*dec.x_generator) : Json(nullptr);
  Json ys = Json::array();
  for (const auto& g : dec.y_generators) {
    Json gj;
    gj["level"] = g.level;
    gj["coords"] = g.coords;
    ys.push_back(gj);
  }
  j["y_generators"] = ys;
  return j.dump(1);
}

Decomposition decomposition_from_json(const std::string& text, unsigned p) {
  const Json j = parse(text);
  Decomposition dec;
  dec.m = level_from(field(j, "m", "$"), "$.m");
  const Json& x = field(j, "x_generator", "$");
  if (!x.is_null()) {
    if (!x.is_array()) fail("$.x_generator", "expected an array or null");
    dec.x_generator = as_vector(x, "$.x_generator", p, x.size());
  }
  const Json& ys = field(j, "y_generators", "$");
  if (!ys.is_array()) fail("$.y_generators", "expected an array");
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const std::string at = "$.y_generators[" + std::to_string(k) + "]";
    YGenerator g;
    g.level = as_unsigned(field(ys[k], "level", at), at + ".level");
    const Json& c = field(ys[k], "coords", at);
    if (!c.is_array()) fail(at + ".coords", "expected an array");
    g.coords = as_vector(c, at + ".coords", p, c.size());
    dec.y_generators.push_back(std::move(g));
  }
  return dec;
}

std::string params_to_json(const SynthParams& params) { return params_json(params).dump(1); }

SynthParams params_from_json(const std::string& text) {
  const Json j = parse(text);
  SynthParams out;
  out.p = as_unsigned(field(j, "p", "$"), "$.p");
  out.n = as_unsigned(field(j, "n", "$"), "$.n");
  out.m = level_from(field(j, "m", "$"), "$.m");
  out.e = size_list(field(j, "e", "$"), "$.e");
  out.xi_in_F = as_bool(field(j, "xi_in_F", "$"), "$.xi_in_F");
  if (j.contains("minus_one_is_norm") && !j["minus_one_is_norm"].is_null()) {
    out.minus_one_is_norm = as_bool(j["minus_one_is_norm"], "$.minus_one_is_norm");
  }
  if (j.contains("shuffle_seed") && !j["shuffle_seed"].is_null()) {
    const Json& s = j["shuffle_seed"];
    if (!s.is_number_unsigned() && !s.is_number_integer()) fail("$.shuffle_seed", "expected an integer");
    out.shuffle_seed = s.get<std::uint64_t>();
  }
  return out;
}

std::string sidecar_to_json(const SynthParams& params, const SynthExpectation& expected) {
  Json j;
  j["params"] = params_json(params);
  j["m"] = level_json(expected.m);
  j["e"] = expected.e;
  j["y_ranks"] = expected.y_ranks;
  j["jordan_type"] = expected.jordan_type;
  j["dim"] = expected.dim;
  return j.dump(1);
}

SynthExpectation sidecar_expectation_from_json(const std::string& text) {
  const Json j = parse(text);
  SynthExpectation out;
  out.m = level_from(field(j, "m", "$"), "$.m");
  out.e = size_list(field(j, "e", "$"), "$.e");
  out.y_ranks = size_list(field(j, "y_ranks", "$"), "$.y_ranks");
  const auto jt = size_list(field(j, "jordan_type", "$"), "$.jordan_type");
  out.jordan_type.assign(jt.begin(), jt.end());
  out.dim = as_unsigned(field(j, "dim", "$"), "$.dim");
  return out;
}

std::string tower_spec_to_json(const TowerSpec& spec) {
  Json j;
  j["p"] = spec.p;
  j["kind"] = to_string(spec.kind);
  j["n"] = spec.n;
  j["precision"] = spec.precision;
  return j.dump(1);
}

TowerSpec tower_spec_from_json(const std::string& text) {
  const Json j = parse(text);
  TowerSpec out;
  out.p = as_unsigned(field(j, "p", "$"), "$.p");
  const Json& kind = field(j, "kind", "$");
  if (!kind.is_string()) fail("$.kind", "expected \"unramified\" or \"cyclotomic\"");
  try {
    out.kind = tower_kind_from_string(kind.get<std::string>());
  } catch (const InvalidInput& e) {
    fail("$.kind", e.what());
  }
  out.n = as_unsigned(field(j, "n", "$"), "$.n");
  out.precision = as_unsigned(field(j, "precision", "$"), "$.precision");
  return out;
}

std::string report_to_json(const Report& report) {
  Json j;
  Json clauses = Json::array();
  for (const auto& c : report.clauses) {
    Json cj;
    cj["id"] = c.id;
    cj["pass"] = c.pass;
    cj["detail"] = c.detail;
    clauses.push_back(cj);
  }
  j["clauses"] = clauses;
  j["notes"] = report.notes;
  j["all_pass"] = report.all_pass();
  return j.dump(1);
}

std::string module_to_json(const GModule& m) {
  Json j;
  j["p"] = m.prime();
  j["n"] = m.height();
  j["sigma"] = matrix_json(m.sigma());
  return j.dump(1);
}

GModule module_from_json(const std::string& text) {
  const Json j = parse(text);
  const unsigned p = as_unsigned(field(j, "p", "$"), "$.p");
  if (!is_prime(p) || p > kMaxPrime) fail("$.p", "expected a prime <= 65521");
  const unsigned n = as_unsigned(field(j, "n", "$"), "$.n");
  const Json& sigma = field(j, "sigma", "$");
  if (!sigma.is_array()) fail("$.sigma", "expected an array of rows");
  const std::size_t dim = sigma.size();
  FpMatrix matrix = as_matrix(sigma, "$.sigma", p, dim, dim);
  try {
    return GModule(p, n, std::move(matrix));
  } catch (const Error& e) {
    fail("$.sigma", e.what());
  }
}

std::string acceptance_to_json(const std::vector<CriterionResult>& results) {
  Json j;
  Json criteria = Json::array();
  bool all = true;
  for (const auto& r : results) {
    Json cj;
    cj["id"] = r.id;
    cj["name"] = r.name;
    cj["pass"] = r.pass;
    cj["detail"] = r.detail;
    cj["seconds"] = r.seconds;
    criteria.push_back(cj);
    all = all && r.pass;
  }
  j["criteria"] = criteria;
  j["all_pass"] = all;
  return j.dump(1);
}

}  // namespace galmod
