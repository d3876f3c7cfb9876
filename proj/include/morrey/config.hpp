#pragma once

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "morrey/verify.hpp"

namespace morrey {

using json = nlohmann::json;

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_input, std::string("field '") + key + "': " + e.what());
  }
}

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::invalid_input, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace detail

// --- spec parsing ---------------------------------------------------------------

inline Grid parse_grid(const json& j) {
  return Grid(detail::get_or<int>(j, "n", 1), detail::get_or<double>(j, "L", 1.0),
              detail::get_or<double>(j, "h", 1.0 / 64.0));
}

inline json grid_json(const Grid& g) { return {{"n", g.dim()}, {"L", g.half_extent()}, {"h", g.spacing()}}; }

inline Weight parse_weight(const json& j) {
  const auto kind = detail::get_or<std::string>(j, "kind", "constant");
  const double c = detail::get_or<double>(j, "c", 1.0);
  if (kind == "constant") return Weight::constant(c);
  if (kind == "power") {
    std::vector<PowerTerm> terms;
    for (const auto& t : detail::require(j, "terms")) {
      PowerTerm term;
      const auto a = detail::get_or<std::vector<double>>(t, "a", {0.0});
      if (a.empty() || a.size() > 2) fail(ErrorCode::invalid_input, "power term center must have 1 or 2 coordinates");
      for (std::size_t d = 0; d < a.size(); ++d) term.center[d] = a[d];
      term.exponent = detail::require(t, "alpha").get<double>();
      terms.push_back(term);
    }
    return Weight::power(c, std::move(terms));
  }
  if (kind == "exp_bmo")
    return Weight::exp_bmo(detail::require(j, "eta").get<double>(), detail::get_or<std::string>(j, "bmo", "log_abs"), c);
  fail(ErrorCode::invalid_input, "unknown weight kind '" + kind + "'");
}

inline ThetaModulus parse_theta(const json& j) {
  const auto kind = detail::get_or<std::string>(j, "kind", "power");
  if (kind == "power") return ThetaModulus::power(detail::get_or<double>(j, "eps", 1.0));
  if (kind == "log_power") return ThetaModulus::log_power(detail::require(j, "beta").get<double>());
  fail(ErrorCode::invalid_input, "unknown theta kind '" + kind + "'");
}

inline YoungFunction parse_young(const json& j) {
  const auto kind = detail::get_or<std::string>(j, "kind", "phi");
  if (kind == "phi") return YoungFunction::llogl();
  if (kind == "power") return YoungFunction::power(detail::get_or<double>(j, "p", 1.0));
  if (kind == "phi_iter") return YoungFunction::phi_iter(detail::get_or<int>(j, "m", 2));
  if (kind == "expm1") return YoungFunction::expm1();
  fail(ErrorCode::invalid_input, "unknown Young kind '" + kind + "'");
}

struct KernelSpec {
  MultilinearKernel kernel;
  TruncationPolicy trunc;
};

inline KernelSpec parse_kernel(const json& j, int n) {
  const auto kind = detail::get_or<std::string>(j, "kind", "homogeneous");
  const int m = detail::get_or<int>(j, "m", 2);
  const double a = detail::get_or<double>(j, "A", 1.0);
  TruncationPolicy trunc{detail::get_or<double>(j, "trunc_eps_over_h", 1.0)};
  if (kind == "majorant") return {MultilinearKernel::majorant(m, n, a), trunc};
  if (kind == "homogeneous") {
    const int k = j.contains("omega") ? detail::get_or<int>(j.at("omega"), "harmonic", 2) : 2;
    return {MultilinearKernel::homogeneous(m, n, k, a), trunc};
  }
  fail(ErrorCode::invalid_input, "unknown kernel kind '" + kind + "'");
}

inline FamilyParams parse_family(const json& j, FamilyParams base = {}) {
  if (j.is_null()) return base;
  const auto centers = detail::get_or<std::string>(j, "centers", base.centers == CenterLayout::origin ? "origin" : "lattice");
  if (centers == "origin") base.centers = CenterLayout::origin;
  else if (centers == "lattice") base.centers = CenterLayout::lattice;
  else fail(ErrorCode::invalid_input, "unknown center layout '" + centers + "'");
  base.r_min = detail::get_or<double>(j, "r_min", base.r_min);
  base.r_max = detail::get_or<double>(j, "r_max", base.r_max);
  base.center_spacing = detail::get_or<double>(j, "center_spacing", base.center_spacing);
  if (!(base.center_spacing > 0.0)) fail(ErrorCode::invalid_input, "center_spacing must be positive");
  base.include_domain_ball = detail::get_or<bool>(j, "include_domain_ball", base.include_domain_ball);
  return base;
}

inline CorpusSpec parse_corpus(const json& j, CorpusSpec base = {}) {
  if (j.is_null()) return base;
  base.size = detail::get_or<std::size_t>(j, "size", base.size);
  base.seed = detail::get_or<std::uint64_t>(j, "seed", base.seed);
  base.generators = detail::get_or<std::vector<std::string>>(j, "generators", base.generators);
  base.origin_ladder = detail::get_or<bool>(j, "origin_ladder", base.origin_ladder);
  const auto tuples = detail::get_or<std::string>(j, "tuples", base.tuples == TupleMode::cyclic ? "cyclic" : "anchored");
  if (tuples == "cyclic") base.tuples = TupleMode::cyclic;
  else if (tuples == "anchored") base.tuples = TupleMode::anchored;
  else fail(ErrorCode::invalid_input, "unknown tuple mode '" + tuples + "'");
  if (j.contains("exclude")) {
    const auto& e = j.at("exclude");
    const auto c = detail::get_or<std::vector<double>>(e, "center", {0.0});
    Ball b;
    for (std::size_t d = 0; d < std::min<std::size_t>(2, c.size()); ++d) b.center[d] = c[d];
    b.radius = detail::require(e, "radius").get<double>();
    base.exclude = b;
  }
  return base;
}

// --- run configuration ------------------------------------------------------------

struct CharacterizeRequest {
  std::string weight;
  std::vector<std::string> classes;  // "A1", "Ap", "Ainf", "doubling", "RH"
  std::vector<double> p;
  std::string family;
};

struct NormRequest {
  NormSpec spec;
  std::string weight;  // empty: Lebesgue
  std::string family;
};

struct RunConfig {
  json source;  // resolved config, embedded in reports
  Grid grid{1, 1.0, 1.0 / 64.0};
  std::map<std::string, Weight> weights;
  std::map<std::string, FamilyParams> families;
  std::vector<InequalitySpec> presets;
  std::vector<CharacterizeRequest> characterize;
  std::vector<NormRequest> norms;
  std::uint64_t seed = 1;
  int levels = 2;
  bool audit = false;

  const Weight& weight(const std::string& id) const {
    auto it = weights.find(id);
    if (it == weights.end()) fail(ErrorCode::invalid_input, "unknown weight id '" + id + "'");
    return it->second;
  }
  FamilyParams family(const std::string& id) const {
    if (id.empty()) return families.count("default") ? families.at("default") : FamilyParams{};
    auto it = families.find(id);
    if (it == families.end()) fail(ErrorCode::invalid_input, "unknown family id '" + id + "'");
    return it->second;
  }
};

inline InequalitySpec parse_preset_entry(const json& j, const RunConfig& cfg, const json& root) {
  InequalitySpec s;
  const auto name = detail::require(j, "preset").get<std::string>();
  s.preset = parse_preset(name);
  s.label = detail::get_or<std::string>(j, "label", name);
  const json params = j.contains("params") ? j.at("params") : json::object();
  for (const auto& id : detail::get_or<std::vector<std::string>>(params, "weights", {})) s.weights.push_back(cfg.weight(id));
  s.exponents = detail::get_or<std::vector<double>>(params, "P", std::vector<double>(s.weights.size(), 2.0));
  s.kappa = detail::get_or<double>(params, "kappa", 0.5);
  s.symbols = detail::get_or<std::vector<std::string>>(params, "symbols", {});
  for (const auto& b : s.symbols) bmo_symbol(b);
  const json kernel_json = params.contains("kernel") ? params.at("kernel") : (root.contains("kernel") ? root.at("kernel") : json());
  if (!kernel_json.is_null()) {
    const auto ks = parse_kernel(kernel_json, cfg.grid.dim());
    s.kernel = ks.kernel;
    s.trunc = ks.trunc;
  }
  const json theta_json = params.contains("theta") ? params.at("theta") : (root.contains("theta") ? root.at("theta") : json());
  if (!theta_json.is_null()) s.theta = parse_theta(theta_json);
  s.family = parse_family(params.contains("family") ? params.at("family") : json(),
                          cfg.family(detail::get_or<std::string>(params, "family_id", "")));
  CorpusSpec corpus = parse_corpus(root.contains("corpus") ? root.at("corpus") : json());
  corpus.seed = cfg.seed;
  s.corpus = parse_corpus(params.contains("corpus") ? params.at("corpus") : json(), corpus);
  if (params.contains("bound")) s.constant_bound = params.at("bound").get<double>();
  s.negative_control = detail::get_or<bool>(params, "negative_control", false);
  if (params.contains("ladder")) {
    const auto& l = params.at("ladder");
    s.ladder_steps = detail::get_or<int>(l, "steps", 3);
    const auto dir = detail::get_or<std::string>(l, "direction", "down");
    if (dir != "up" && dir != "down") fail(ErrorCode::invalid_input, "ladder direction must be 'up' or 'down'");
    s.ladder_direction = dir == "up" ? LadderDirection::up : LadderDirection::down;
  }
  s.bmo_p = detail::get_or<double>(params, "bmo_p", 2.0);
  s.bmo_j_max = detail::get_or<int>(params, "j_max", 5);
  s.audit = cfg.audit;
  validate(s);
  return s;
}

/// Parses and validates a run configuration; flag overrides apply first.
inline RunConfig parse_config(json root, std::optional<std::uint64_t> seed = {}, std::optional<int> levels = {},
                              bool audit = false) {
  if (!root.is_object()) fail(ErrorCode::invalid_input, "config must be a JSON object");
  if (seed) root["seed"] = *seed;
  if (levels) root["levels"] = *levels;
  if (audit) root["audit"] = true;
  RunConfig cfg;
  try {
    cfg.grid = parse_grid(root.contains("grid") ? root.at("grid") : json::object());
    cfg.seed = detail::get_or<std::uint64_t>(root, "seed", 1);
    cfg.levels = detail::get_or<int>(root, "levels", 2);
    if (cfg.levels < 1) fail(ErrorCode::invalid_input, "levels must be positive");
    cfg.audit = detail::get_or<bool>(root, "audit", false);
    if (root.contains("weights"))
      for (const auto& [id, w] : root.at("weights").items()) cfg.weights.emplace(id, parse_weight(w));
    if (root.contains("family")) cfg.families["default"] = parse_family(root.at("family"));
    if (root.contains("families"))
      for (const auto& [id, f] : root.at("families").items()) cfg.families[id] = parse_family(f, cfg.family(""));
    for (const auto& entry : detail::get_or<json>(root, "characterize", json::array())) {
      CharacterizeRequest r;
      r.weight = detail::require(entry, "weight").get<std::string>();
      cfg.weight(r.weight);
      r.classes = detail::get_or<std::vector<std::string>>(entry, "classes", {"A1", "Ap", "Ainf", "doubling"});
      for (const auto& c : r.classes)
        if (c != "A1" && c != "Ap" && c != "Ainf" && c != "doubling" && c != "RH")
          fail(ErrorCode::invalid_input, "unknown weight class '" + c + "'");
      r.p = detail::get_or<std::vector<double>>(entry, "p", {2.0});
      for (double p : r.p)
        if (!(p >= 1.0)) fail(ErrorCode::invalid_input, "invalid exponent");
      r.family = detail::get_or<std::string>(entry, "family", "");
      cfg.family(r.family);
      cfg.characterize.push_back(r);
    }
    for (const auto& entry : detail::get_or<json>(root, "norms", json::array())) {
      NormRequest r;
      r.spec.kind = parse_space(detail::get_or<std::string>(entry, "space", "lp"));
      r.spec.p = detail::get_or<double>(entry, "p", 2.0);
      r.spec.kappa = detail::get_or<double>(entry, "kappa", 0.0);
      require_exponent(r.spec.p);
      require_kappa(r.spec.kappa);
      r.weight = detail::get_or<std::string>(entry, "weight", "");
      if (!r.weight.empty()) cfg.weight(r.weight);
      r.family = detail::get_or<std::string>(entry, "family", "");
      cfg.family(r.family);
      cfg.norms.push_back(r);
    }
    for (const auto& entry : detail::get_or<json>(root, "presets", json::array()))
      cfg.presets.push_back(parse_preset_entry(entry, cfg, root));
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_input, std::string("config: ") + e.what());
  }
  cfg.source = std::move(root);
  return cfg;
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::invalid_input, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_input, "'" + path + "': " + e.what());
  }
}

// --- binary function files ----------------------------------------------------------
//
// One JSON header line {"format":"sampled-function","version":1,"grid":{...},
// "names":[...]} followed by count * size little-endian IEEE-754 doubles.

namespace detail {

inline std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  else return __builtin_bswap64(v);
}

}  // namespace detail

inline void write_functions(std::ostream& out, const std::vector<SampledFunction>& fs) {
  if (fs.empty()) fail(ErrorCode::invalid_input, "nothing to write");
  json header = {{"format", "sampled-function"}, {"version", 1}, {"grid", grid_json(fs.front().grid())}};
  json names = json::array();
  for (const auto& f : fs) {
    if (f.grid() != fs.front().grid()) fail(ErrorCode::invalid_input, "grid mismatch");
    names.push_back(f.name());
  }
  header["names"] = names;
  out << header.dump() << '\n';
  for (const auto& f : fs)
    for (double v : f.values()) {
      const std::uint64_t bits = detail::to_little(std::bit_cast<std::uint64_t>(v));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
}

inline std::vector<SampledFunction> read_functions(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::invalid_input, "missing function header");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_input, std::string("bad function header: ") + e.what());
  }
  if (detail::get_or<std::string>(header, "format", "") != "sampled-function" ||
      detail::get_or<int>(header, "version", 0) != 1)
    fail(ErrorCode::invalid_input, "unsupported function file format");
  const Grid grid = parse_grid(detail::require(header, "grid"));
  std::vector<std::string> names;
  if (header.contains("names")) names = header.at("names").get<std::vector<std::string>>();
  else names.push_back(detail::get_or<std::string>(header, "name", ""));
  std::vector<SampledFunction> out;
  for (const auto& name : names) {
    std::vector<double> v(grid.size());
    for (auto& x : v) {
      std::uint64_t bits;
      if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) fail(ErrorCode::invalid_input, "function file truncated");
      x = std::bit_cast<double>(detail::to_little(bits));
    }
    out.emplace_back(grid, std::move(v), name);
  }
  if (in.peek() != std::char_traits<char>::eof()) fail(ErrorCode::invalid_input, "trailing bytes in function file");
  return out;
}

inline void save_functions(const std::string& path, const std::vector<SampledFunction>& fs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::invalid_input, "cannot write '" + path + "'");
  write_functions(out, fs);
}

inline std::vector<SampledFunction> load_functions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::invalid_input, "cannot open '" + path + "'");
  return read_functions(in);
}

// --- reports ---------------------------------------------------------------------------

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json level_json(const LevelResult& l) {
  json groups = json::object();
  for (const auto& [g, c] : l.group_c_obs) groups[g] = c;
  return {{"h", l.h},
          {"c_obs", number_or_null(l.c_obs)},
          {"c_obs_alt", number_or_null(l.c_obs_alt)},
          {"evaluated", l.evaluated},
          {"skipped_zero_rhs", l.skipped},
          {"groups", groups}};
}

inline json report_json(const VerificationReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels) levels.push_back(level_json(l));
  json drift = json::array();
  for (double d : r.drift) drift.push_back(number_or_null(d));
  json out = {{"label", r.label},
              {"preset", r.preset},
              {"negative_control", r.negative_control},
              {"levels", levels},
              {"drift", drift},
              {"finite", r.finite},
              {"stable", r.stable},
              {"within_bound", r.within_bound},
              {"verdict", r.verdict()},
              {"pass", r.pass()},
              {"kernel_evaluations", r.stats.evaluations},
              {"audit", {{"checked", r.stats.audit_checked}, {"violations", r.stats.audit_violations}}},
              {"notes",
               {"norms are suprema over a finite clipped ball family (lower bounds of the true suprema)",
                "operator boundedness on Lebesgue spaces is a hypothesis the harness observes but cannot certify"}}};
  if (r.extended) {
    out["ladder_extended"] = level_json(*r.extended);
    out["ladder_growth"] = number_or_null(r.ladder_growth);
  }
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
  return o + "\"";
}

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

inline void write_ratio_csv(std::ostream& out, const std::vector<VerificationReport>& reports) {
  out << "preset,label,stage,h,member,group,lhs,rhs,ratio\n";
  auto rows = [&](const VerificationReport& r, const LevelResult& l, const std::string& stage) {
    for (const auto& e : l.evaluations)
      out << csv_escape(r.preset) << ',' << csv_escape(r.label) << ',' << stage << ',' << format_double(l.h) << ','
          << csv_escape(e.label) << ',' << csv_escape(e.group) << ',' << format_double(e.lhs) << ','
          << format_double(e.rhs) << ',' << (e.rhs > 0.0 ? format_double(e.lhs / e.rhs) : std::string("skipped"))
          << '\n';
  };
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.levels.size(); ++k) rows(r, r.levels[k], "level" + std::to_string(k));
    if (r.extended) rows(r, *r.extended, "ladder");
  }
}

}  // namespace morrey
