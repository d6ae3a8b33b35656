#include <fstream>
#include <sstream>

#include "fbasin/cli.hpp"
#include "fbasin/error.hpp"

namespace fbasin {

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kValidation, path + " " + what);
}

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string child(const std::string& path, std::size_t index) { return path + "[" + std::to_string(index) + "]"; }

const Json& require(const Json& obj, std::string_view key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) invalid(child(path, key), "is required");
  return *it;
}

const Json* optional_field(const Json& obj, std::string_view key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

void require_object(const Json& v, const std::string& path) {
  if (!v.is_object()) invalid(path.empty() ? "scenario" : path, "must be an object");
}

void require_array(const Json& v, const std::string& path) {
  if (!v.is_array()) invalid(path, "must be an array");
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) invalid(path, "must be a number");
  return v.get<double>();
}

int integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) invalid(path, "must be an integer");
  return v.get<int>();
}

std::uint64_t unsigned64(const Json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    invalid(path, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

bool boolean(const Json& v, const std::string& path) {
  if (!v.is_boolean()) invalid(path, "must be a boolean");
  return v.get<bool>();
}

std::string text(const Json& v, const std::string& path) {
  if (!v.is_string()) invalid(path, "must be a string");
  return v.get<std::string>();
}

// [re, im], or a plain real number.
Complex complex_value(const Json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    invalid(path, "must be a complex number [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<Complex> complex_list(const Json& v, int n, const std::string& path) {
  require_array(v, path);
  if (static_cast<int>(v.size()) != n) invalid(path, "must have " + std::to_string(n) + " entries");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(complex_value(v[i], child(path, i)));
  return out;
}

CVector complex_vector(const Json& v, int n, const std::string& path) {
  const auto list = complex_list(v, n, path);
  CVector z(n);
  for (int k = 0; k < n; ++k) z[k] = list[static_cast<std::size_t>(k)];
  return z;
}

int component_index(const Json& v, int n, const std::string& path) {
  const int c = integer(v, path);
  if (c < 1 || c > n) invalid(path, "must lie in 1.." + std::to_string(n));
  return c - 1;
}

std::vector<PolyTerm> terms_from_json(const Json& v, int n, const std::string& path) {
  require_array(v, path);
  std::vector<PolyTerm> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto p = child(path, i);
    require_object(v[i], p);
    PolyTerm t;
    t.component = component_index(require(v[i], "component", p), n, child(p, "component"));
    const auto& ex = require(v[i], "exponents", p);
    const auto ep = child(p, "exponents");
    require_array(ex, ep);
    if (static_cast<int>(ex.size()) != n) invalid(ep, "must have " + std::to_string(n) + " entries");
    std::vector<int> alpha;
    for (std::size_t k = 0; k < ex.size(); ++k) {
      const int e = integer(ex[k], child(ep, k));
      if (e < 0) invalid(child(ep, k), "must be >= 0");
      alpha.push_back(e);
    }
    t.alpha = MultiIndex(std::move(alpha));
    if (t.alpha.order() == 0) invalid(p, "is a constant term; maps must fix 0");
    t.coeff = complex_value(require(v[i], "coeff", p), child(p, "coeff"));
    out.push_back(std::move(t));
  }
  return out;
}

Primitive primitive_from_json(const Json& v, int n, const std::string& path) {
  require_object(v, path);
  const auto type = text(require(v, "type", path), child(path, "type"));
  if (type == "linear") {
    const auto mp = child(path, "matrix");
    const auto& rows = require(v, "matrix", path);
    require_array(rows, mp);
    if (static_cast<int>(rows.size()) != n) invalid(mp, "must have " + std::to_string(n) + " rows");
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
      const auto row = complex_list(rows[static_cast<std::size_t>(i)], n, child(mp, static_cast<std::size_t>(i)));
      for (int k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)];
    }
    return Primitive::linear(std::move(m));
  }
  if (type == "diagonal") return Primitive::diag(complex_list(require(v, "diagonal", path), n, child(path, "diagonal")));
  if (type == "triangular") {
    std::vector<PolyTerm> terms;
    if (const auto* t = optional_field(v, "terms")) terms = terms_from_json(*t, n, child(path, "terms"));
    return Primitive::triangular(complex_list(require(v, "diagonal", path), n, child(path, "diagonal")),
                                 std::move(terms));
  }
  if (type == "shear") {
    const int c = component_index(require(v, "component", path), n, child(path, "component"));
    return Primitive::shear(c, terms_from_json(require(v, "terms", path), n, child(path, "terms")));
  }
  if (type == "swap") {
    const auto cp = child(path, "components");
    const auto& c = require(v, "components", path);
    require_array(c, cp);
    if (c.size() != 2) invalid(cp, "must list two components");
    return Primitive::swap(component_index(c[0], n, child(cp, 0)), component_index(c[1], n, child(cp, 1)));
  }
  invalid(child(path, "type"), "must be one of linear, diagonal, triangular, shear, swap");
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json complex_list_json(const CVector& z) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < z.size(); ++k) out.push_back(complex_json(z[k]));
  return out;
}

Json terms_json(const std::vector<PolyTerm>& terms) {
  Json out = Json::array();
  for (const auto& t : terms)
    out.push_back({{"component", t.component + 1}, {"exponents", t.alpha.exponents}, {"coeff", complex_json(t.coeff)}});
  return out;
}

Json primitive_json(const Primitive& p) {
  Json out;
  switch (p.kind) {
    case PrimitiveKind::kLinear: {
      out["type"] = "linear";
      Json rows = Json::array();
      for (Eigen::Index i = 0; i < p.matrix.rows(); ++i) rows.push_back(complex_list_json(p.matrix.row(i).transpose()));
      out["matrix"] = rows;
      break;
    }
    case PrimitiveKind::kDiagonal:
    case PrimitiveKind::kTriangular: {
      out["type"] = p.kind == PrimitiveKind::kDiagonal ? "diagonal" : "triangular";
      Json d = Json::array();
      for (const auto& c : p.diagonal) d.push_back(complex_json(c));
      out["diagonal"] = d;
      if (p.kind == PrimitiveKind::kTriangular) out["terms"] = terms_json(p.terms);
      break;
    }
    case PrimitiveKind::kShear:
      out["type"] = "shear";
      out["component"] = p.component + 1;
      out["terms"] = terms_json(p.terms);
      break;
    case PrimitiveKind::kSwap:
      out["type"] = "swap";
      out["components"] = Json::array({p.swap_a + 1, p.swap_b + 1});
      break;
  }
  return out;
}

const char* kind_name(SequenceKind k) {
  switch (k) {
    case SequenceKind::kSingle:
      return "single";
    case SequenceKind::kCyclic:
      return "cyclic";
    case SequenceKind::kPerturbed:
      return "perturbed";
  }
  return "single";
}

}  // namespace

Scenario scenario_from_json(const Json& doc) {
  require_object(doc, "");
  Scenario sc;
  auto& seq = sc.sequence;
  seq.n = integer(require(doc, "dimension", ""), "dimension");
  if (seq.n < 1) invalid("dimension", "must be >= 1");
  const int n = seq.n;

  const auto& maps = require(doc, "maps", "");
  require_array(maps, "maps");
  if (maps.empty()) invalid("maps", "must not be empty");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto p = child("maps", i);
    Word word;
    if (maps[i].is_object()) {
      word.push_back(primitive_from_json(maps[i], n, p));
    } else {
      require_array(maps[i], p);
      if (maps[i].empty()) invalid(p, "must not be an empty word");
      for (std::size_t k = 0; k < maps[i].size(); ++k) word.push_back(primitive_from_json(maps[i][k], n, child(p, k)));
    }
    for (std::size_t k = 0; k < word.size(); ++k) {
      try {
        word[k].validate(n);
      } catch (const Error& e) {
        invalid(maps[i].is_object() ? p : child(p, k), std::string("is invalid: ") + e.what());
      }
    }
    seq.maps.push_back(std::move(word));
  }

  if (const auto* s = optional_field(doc, "sequence")) {
    require_object(*s, "sequence");
    if (const auto* k = optional_field(*s, "kind")) {
      const auto kind = text(*k, "sequence.kind");
      if (kind == "single")
        seq.kind = SequenceKind::kSingle;
      else if (kind == "cyclic")
        seq.kind = SequenceKind::kCyclic;
      else if (kind == "perturbed")
        seq.kind = SequenceKind::kPerturbed;
      else
        invalid("sequence.kind", "must be one of single, cyclic, perturbed");
    }
    if (const auto* b = optional_field(*s, "block")) seq.block = integer(*b, "sequence.block");
    if (const auto* pert = optional_field(*s, "perturbation")) {
      require_object(*pert, "sequence.perturbation");
      if (const auto* v = optional_field(*pert, "q_min")) seq.perturbation.q_min = integer(*v, "sequence.perturbation.q_min");
      if (const auto* v = optional_field(*pert, "amplitude"))
        seq.perturbation.amplitude = number(*v, "sequence.perturbation.amplitude");
      if (const auto* v = optional_field(*pert, "seed")) seq.perturbation.seed = unsigned64(*v, "sequence.perturbation.seed");
    } else if (seq.kind == SequenceKind::kPerturbed) {
      invalid("sequence.perturbation", "is required for kind perturbed");
    }
  }
  if (seq.kind == SequenceKind::kSingle && seq.maps.size() != 1) invalid("maps", "must hold exactly one map for kind single");

  const auto& att = require(doc, "attraction", "");
  require_object(att, "attraction");
  seq.params.n = n;
  seq.params.r = number(require(att, "r", "attraction"), "attraction.r");
  seq.params.s = number(require(att, "s", "attraction"), "attraction.s");
  seq.params.delta = number(require(att, "delta", "attraction"), "attraction.delta");
  seq.params.validate();

  if (const auto* v = optional_field(doc, "p")) {
    sc.p = integer(*v, "p");
    if (*sc.p < 2) invalid("p", "must be >= 2");
  }
  if (const auto* v = optional_field(doc, "q")) {
    sc.q = integer(*v, "q");
    if (*sc.q < 2) invalid("q", "must be >= 2");
  }

  sc.grid = GridSpec::coordinate_plane(n, 1.0, 64, 64);
  if (const auto* g = optional_field(doc, "grid")) {
    require_object(*g, "grid");
    if (const auto* v = optional_field(*g, "origin")) sc.grid.origin = complex_vector(*v, n, "grid.origin");
    if (const auto* v = optional_field(*g, "dir1")) sc.grid.dir1 = complex_vector(*v, n, "grid.dir1");
    if (const auto* v = optional_field(*g, "dir2")) sc.grid.dir2 = complex_vector(*v, n, "grid.dir2");
    auto range = [&](const char* key, double& lo, double& hi) {
      if (const auto* v = optional_field(*g, key)) {
        const auto p = child("grid", key);
        require_array(*v, p);
        if (v->size() != 2) invalid(p, "must be [min, max]");
        lo = number((*v)[0], child(p, 0));
        hi = number((*v)[1], child(p, 1));
      }
    };
    range("t1", sc.grid.t1_min, sc.grid.t1_max);
    range("t2", sc.grid.t2_min, sc.grid.t2_max);
    if (const auto* v = optional_field(*g, "width")) sc.grid.width = integer(*v, "grid.width");
    if (const auto* v = optional_field(*g, "height")) sc.grid.height = integer(*v, "grid.height");
    if (const auto* v = optional_field(*g, "escape_radius")) sc.grid.escape_radius = number(*v, "grid.escape_radius");
    if (const auto* v = optional_field(*g, "j_max")) sc.grid_j_max = integer(*v, "grid.j_max");
  }
  sc.grid.validate(n);
  if (sc.grid_j_max < 1) invalid("grid.j_max", "must be >= 1");

  if (const auto* ps = optional_field(doc, "psi")) {
    require_object(*ps, "psi");
    if (const auto* v = optional_field(*ps, "points")) sc.psi.points = integer(*v, "psi.points");
    if (const auto* v = optional_field(*ps, "j_max")) sc.psi.j_max = integer(*v, "psi.j_max");
    if (const auto* v = optional_field(*ps, "injectivity_points"))
      sc.psi.injectivity_points = integer(*v, "psi.injectivity_points");
    if (const auto* v = optional_field(*ps, "pairs")) sc.psi.pairs = unsigned64(*v, "psi.pairs");
    if (const auto* v = optional_field(*ps, "seed")) sc.psi.seed = unsigned64(*v, "psi.seed");
  }
  if (sc.psi.points < 1) invalid("psi.points", "must be >= 1");
  if (sc.psi.j_max < 1) invalid("psi.j_max", "must be >= 1");
  if (sc.psi.injectivity_points < 2) invalid("psi.injectivity_points", "must be >= 2");

  if (const auto* vs = optional_field(doc, "verify")) {
    require_object(*vs, "verify");
    if (const auto* v = optional_field(*vs, "samples")) sc.verify.samples = unsigned64(*v, "verify.samples");
    if (const auto* v = optional_field(*vs, "j_max")) sc.verify.j_max = integer(*v, "verify.j_max");
    if (const auto* v = optional_field(*vs, "seed")) sc.verify.seed = unsigned64(*v, "verify.seed");
  }
  if (sc.verify.samples < 1) invalid("verify.samples", "must be >= 1");
  if (sc.verify.j_max < 1) invalid("verify.j_max", "must be >= 1");

  if (const auto* o = optional_field(doc, "output")) {
    require_object(*o, "output");
    if (const auto* v = optional_field(*o, "dir")) sc.out_dir = text(*v, "output.dir");
    if (const auto* v = optional_field(*o, "pgm")) sc.pgm = boolean(*v, "output.pgm");
  }

  seq.validate();
  return sc;
}

Json scenario_to_json(const Scenario& sc) {
  const auto& seq = sc.sequence;
  Json doc;
  doc["dimension"] = seq.n;
  Json maps = Json::array();
  for (const auto& word : seq.maps) {
    Json w = Json::array();
    for (const auto& p : word) w.push_back(primitive_json(p));
    maps.push_back(w);
  }
  doc["maps"] = maps;
  doc["sequence"] = {{"kind", kind_name(seq.kind)},
                     {"block", seq.block},
                     {"perturbation",
                      {{"q_min", seq.perturbation.q_min},
                       {"amplitude", seq.perturbation.amplitude},
                       {"seed", seq.perturbation.seed}}}};
  doc["attraction"] = {{"r", seq.params.r}, {"s", seq.params.s}, {"delta", seq.params.delta}};
  doc["p"] = sc.p ? Json(*sc.p) : Json(nullptr);
  doc["q"] = sc.q ? Json(*sc.q) : Json(nullptr);
  doc["grid"] = {{"origin", complex_list_json(sc.grid.origin)},
                 {"dir1", complex_list_json(sc.grid.dir1)},
                 {"dir2", complex_list_json(sc.grid.dir2)},
                 {"t1", {sc.grid.t1_min, sc.grid.t1_max}},
                 {"t2", {sc.grid.t2_min, sc.grid.t2_max}},
                 {"width", sc.grid.width},
                 {"height", sc.grid.height},
                 {"escape_radius", sc.grid.escape_radius},
                 {"j_max", sc.grid_j_max}};
  doc["psi"] = {{"points", sc.psi.points},
                {"j_max", sc.psi.j_max},
                {"injectivity_points", sc.psi.injectivity_points},
                {"pairs", sc.psi.pairs},
                {"seed", sc.psi.seed}};
  doc["verify"] = {{"samples", sc.verify.samples}, {"j_max", sc.verify.j_max}, {"seed", sc.verify.seed}};
  doc["output"] = {{"dir", sc.out_dir}, {"pgm", sc.pgm}};
  return doc;
}

std::string serialize_scenario(const Scenario& scenario) { return scenario_to_json(scenario).dump(2) + "\n"; }

Scenario parse_scenario_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenario_from_json(doc);
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

}  // namespace fbasin
