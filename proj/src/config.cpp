#include "fracpass/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fracpass {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_known_keys(const json& obj, const std::string& path,
                      const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(path, "unknown key '" + item.key() + "'");
  }
}

bool has(const json& obj, const std::string& key) { return obj.contains(key); }

double get_double(const json& obj, const std::string& path, const std::string& key,
                  double fallback) {
  if (!has(obj, key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key, int fallback) {
  if (!has(obj, key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

std::uint64_t get_uint64(const json& obj, const std::string& path, const std::string& key,
                         std::uint64_t fallback) {
  if (!has(obj, key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 &&
                                 !v.is_number_unsigned()))
    fail(path + "." + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool fallback) {
  if (!has(obj, key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       const std::string& fallback) {
  if (!has(obj, key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::array<double, 3> get_point(const json& obj, const std::string& path, const std::string& key,
                                int N, const std::array<double, 3>& fallback) {
  if (!has(obj, key)) return fallback;
  const json& v = obj.at(key);
  const std::string where = path + "." + key;
  if (!v.is_array()) fail(where, "expected an array of " + std::to_string(N) + " numbers");
  if (static_cast<int>(v.size()) != N)
    fail(where, "expected exactly " + std::to_string(N) + " entries (the grid dimension), got " +
                    std::to_string(v.size()));
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (int a = 0; a < N; ++a) {
    if (!v[a].is_number()) fail(where, "entry " + std::to_string(a) + " is not a number");
    out[a] = v[a].get<double>();
  }
  return out;
}

void parse_grid(const json& obj, RunConfig& cfg) {
  check_known_keys(obj, "config.grid", {"N", "L", "M"});
  cfg.grid.N = get_int(obj, "config.grid", "N", cfg.grid.N);
  cfg.grid.L = get_double(obj, "config.grid", "L", cfg.grid.L);
  cfg.grid.M = get_int(obj, "config.grid", "M", cfg.grid.M);
}

void parse_h(const json& obj, RunConfig& cfg) {
  check_known_keys(obj, "config.h", {"family", "amplitude", "center", "width"});
  cfg.h.family = get_string(obj, "config.h", "family", cfg.h.family);
  cfg.h.amplitude = get_double(obj, "config.h", "amplitude", cfg.h.amplitude);
  cfg.h.center = get_point(obj, "config.h", "center", cfg.grid.N, cfg.h.center);
  cfg.h.width = get_double(obj, "config.h", "width", cfg.h.width);
  if (cfg.h.family != "gaussian_bump" && cfg.h.family != "compact_bump" &&
      cfg.h.family != "signed_pair")
    fail("config.h.family",
         "must be one of gaussian_bump, compact_bump, signed_pair (got '" + cfg.h.family + "')");
  if (!(cfg.h.width > 0.0)) fail("config.h.width", "must be positive");
  if (!std::isfinite(cfg.h.amplitude)) fail("config.h.amplitude", "must be finite");
}

void parse_bubble(const json& obj, RunConfig& cfg) {
  check_known_keys(obj, "config.bubble", {"mu", "xi"});
  cfg.bubble.mu = get_double(obj, "config.bubble", "mu", cfg.bubble.mu);
  cfg.bubble.xi = get_point(obj, "config.bubble", "xi", cfg.grid.N, cfg.bubble.xi);
  if (!(cfg.bubble.mu > 0.0)) fail("config.bubble.mu", "must be positive");
}

void parse_cutoff(const json& obj, RunConfig& cfg) {
  check_known_keys(obj, "config.cutoff", {"r", "x0"});
  cfg.cutoff_spec.r = get_double(obj, "config.cutoff", "r", cfg.cutoff_spec.r);
  cfg.cutoff_spec.x0 = get_point(obj, "config.cutoff", "x0", cfg.grid.N, cfg.cutoff_spec.x0);
  if (cfg.cutoff_spec.r < 0.0) fail("config.cutoff.r", "must be >= 0 (0 = automatic)");
}

void parse_solve(const json& obj, RunConfig& cfg) {
  check_known_keys(obj, "config.solve",
                   {"max_iters", "grad_tol", "step0", "backtrack_factor", "decrease_coeff",
                    "seed"});
  SolveOptions& so = cfg.solve;
  so.max_iters = get_int(obj, "config.solve", "max_iters", so.max_iters);
  so.grad_tol = get_double(obj, "config.solve", "grad_tol", so.grad_tol);
  so.step0 = get_double(obj, "config.solve", "step0", so.step0);
  so.backtrack_factor = get_double(obj, "config.solve", "backtrack_factor", so.backtrack_factor);
  so.decrease_coeff = get_double(obj, "config.solve", "decrease_coeff", so.decrease_coeff);
  so.seed = get_uint64(obj, "config.solve", "seed", so.seed);
  if (so.max_iters < 1) fail("config.solve.max_iters", "must be >= 1");
  if (!(so.grad_tol > 0.0)) fail("config.solve.grad_tol", "must be positive");
  if (!(so.step0 > 0.0)) fail("config.solve.step0", "must be positive");
  if (!(so.backtrack_factor > 0.0 && so.backtrack_factor < 1.0))
    fail("config.solve.backtrack_factor", "must lie in (0, 1)");
  if (!(so.decrease_coeff > 0.0 && so.decrease_coeff < 1.0))
    fail("config.solve.decrease_coeff", "must lie in (0, 1)");
}

void parse_solve_mp(const json& obj, RunConfig& cfg) {
  check_known_keys(obj, "config.solve_mp",
                   {"max_iters", "grad_tol", "step0", "path_nodes", "t_steps", "mu"});
  MpConfig& mp = cfg.solve_mp;
  mp.max_iters = get_int(obj, "config.solve_mp", "max_iters", mp.max_iters);
  mp.grad_tol = get_double(obj, "config.solve_mp", "grad_tol", mp.grad_tol);
  mp.step0 = get_double(obj, "config.solve_mp", "step0", mp.step0);
  mp.path_nodes = get_int(obj, "config.solve_mp", "path_nodes", mp.path_nodes);
  mp.t_steps = get_int(obj, "config.solve_mp", "t_steps", mp.t_steps);
  mp.mu = get_double(obj, "config.solve_mp", "mu", mp.mu);
  if (mp.max_iters < 1) fail("config.solve_mp.max_iters", "must be >= 1");
  if (!(mp.grad_tol > 0.0)) fail("config.solve_mp.grad_tol", "must be positive");
  if (!(mp.step0 > 0.0)) fail("config.solve_mp.step0", "must be positive");
  if (mp.path_nodes < 3) fail("config.solve_mp.path_nodes", "must be >= 3");
  if (mp.t_steps < 9) fail("config.solve_mp.t_steps", "must be >= 9");
  if (!(mp.mu > 0.0)) fail("config.solve_mp.mu", "must be positive");
}

void parse_verify(const json& obj, RunConfig& cfg) {
  check_known_keys(obj, "config.verify", {"samples", "seed", "include_dyadic"});
  cfg.verify.samples = get_int(obj, "config.verify", "samples", cfg.verify.samples);
  cfg.verify.seed = get_uint64(obj, "config.verify", "seed", cfg.verify.seed);
  cfg.verify.include_dyadic =
      get_bool(obj, "config.verify", "include_dyadic", cfg.verify.include_dyadic);
  if (cfg.verify.samples < 1) fail("config.verify.samples", "must be >= 1");
}

void parse_appendix(const json& obj, RunConfig& cfg) {
  check_known_keys(obj, "config.appendix", {"R_list", "resolution", "cases"});
  if (has(obj, "R_list")) {
    const json& v = obj.at("R_list");
    if (!v.is_array() || v.empty()) fail("config.appendix.R_list", "expected a nonempty array");
    std::vector<double> rs;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (!v[j].is_number())
        fail("config.appendix.R_list", "entry " + std::to_string(j) + " is not a number");
      rs.push_back(v[j].get<double>());
      if (!(rs.back() > 1.0))
        fail("config.appendix.R_list", "entries must be > 1 (got " + std::to_string(rs.back()) +
                                           ")");
      if (j > 0 && !(rs[j] > rs[j - 1]))
        fail("config.appendix.R_list", "entries must be strictly increasing");
    }
    cfg.appendix.R_list = std::move(rs);
  }
  cfg.appendix.resolution =
      get_int(obj, "config.appendix", "resolution", cfg.appendix.resolution);
  if (cfg.appendix.resolution < 4) fail("config.appendix.resolution", "must be >= 4");
  if (has(obj, "cases")) {
    const json& v = obj.at("cases");
    if (!v.is_array() || v.empty())
      fail("config.appendix.cases", "expected a nonempty array of [N, s] pairs");
    std::vector<std::pair<int, double>> cs;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const std::string where = "config.appendix.cases";
      if (!v[j].is_array() || v[j].size() != 2 || !v[j][0].is_number_integer() ||
          !v[j][1].is_number())
        fail(where, "entry " + std::to_string(j) + " must be an [N, s] pair");
      const int caseN = v[j][0].get<int>();
      const double cases = v[j][1].get<double>();
      if (caseN < 1 || caseN > 3) fail(where, "entry " + std::to_string(j) + ": N must be 1..3");
      if (!(cases > 0.0 && cases < 1.0))
        fail(where, "entry " + std::to_string(j) + ": s must lie in (0, 1)");
      if (!(caseN > 2.0 * cases))
        fail(where, "entry " + std::to_string(j) + ": need N > 2s");
      cs.emplace_back(caseN, cases);
    }
    cfg.appendix.cases = std::move(cs);
  }
}

void parse_concentration(const json& obj, RunConfig& cfg) {
  check_known_keys(obj, "config.concentration", {"kind", "n_max", "delta"});
  cfg.concentration.kind = get_string(obj, "config.concentration", "kind", cfg.concentration.kind);
  cfg.concentration.n_max = get_int(obj, "config.concentration", "n_max", cfg.concentration.n_max);
  cfg.concentration.delta =
      get_double(obj, "config.concentration", "delta", cfg.concentration.delta);
  if (cfg.concentration.kind != "bubbling" && cfg.concentration.kind != "escaping")
    fail("config.concentration.kind",
         "must be bubbling or escaping (got '" + cfg.concentration.kind + "')");
  if (cfg.concentration.n_max < 0) fail("config.concentration.n_max", "must be >= 0");
  if (!(cfg.concentration.delta > 0.0 && cfg.concentration.delta < 1.0))
    fail("config.concentration.delta", "must lie in (0, 1)");
}

void parse_reference_grid(const json& obj, RunConfig& cfg) {
  check_known_keys(obj, "config.reference_grid", {"L", "M"});
  cfg.reference_grid.L = get_double(obj, "config.reference_grid", "L", cfg.reference_grid.L);
  cfg.reference_grid.M = get_int(obj, "config.reference_grid", "M", cfg.reference_grid.M);
  if (cfg.reference_grid.L < 0.0) fail("config.reference_grid.L", "must be >= 0 (0 = default)");
  if (cfg.reference_grid.M < 0) fail("config.reference_grid.M", "must be >= 0 (0 = default)");
  if ((cfg.reference_grid.L > 0.0) != (cfg.reference_grid.M > 0))
    fail("config.reference_grid", "L and M must be set together (or both 0 for defaults)");
}

RunConfig config_from_json(const json& root) {
  if (!root.is_object()) throw ConfigError("config: top level must be a JSON object");
  check_known_keys(root, "config",
                   {"grid", "s", "q", "eps", "h", "bubble", "cutoff", "solve", "solve_mp",
                    "verify", "appendix", "concentration", "reference_grid", "s_hat"});
  RunConfig cfg;
  if (has(root, "grid")) {
    if (!root.at("grid").is_object()) fail("config.grid", "expected an object");
    parse_grid(root.at("grid"), cfg);
  }
  make_grid(cfg.grid);  // shape validation; throws ConfigError with the field name

  cfg.s = get_double(root, "config", "s", cfg.s);
  cfg.q = get_double(root, "config", "q", cfg.q);
  cfg.eps = get_double(root, "config", "eps", cfg.eps);
  cfg.s_hat = get_double(root, "config", "s_hat", cfg.s_hat);
  if (!(cfg.s > 0.0 && cfg.s < 1.0)) fail("config.s", "must lie in (0, 1)");
  if (!(cfg.grid.N > 2.0 * cfg.s)) fail("config.s", "need N > 2s");
  if (!(cfg.q > 0.0 && cfg.q < 1.0)) fail("config.q", "must lie in (0, 1)");
  if (!(cfg.eps > 0.0)) fail("config.eps", "must be positive");
  if (cfg.s_hat < 0.0) fail("config.s_hat", "must be >= 0 (0 = derive internally)");

  struct Block {
    const char* key;
    void (*parse)(const json&, RunConfig&);
  };
  const Block blocks[] = {
      {"h", parse_h},
      {"bubble", parse_bubble},
      {"cutoff", parse_cutoff},
      {"solve", parse_solve},
      {"solve_mp", parse_solve_mp},
      {"verify", parse_verify},
      {"appendix", parse_appendix},
      {"concentration", parse_concentration},
      {"reference_grid", parse_reference_grid},
  };
  for (const Block& b : blocks) {
    if (!has(root, b.key)) continue;
    const json& obj = root.at(b.key);
    if (!obj.is_object()) fail(std::string("config.") + b.key, "expected an object");
    b.parse(obj, cfg);
  }
  return cfg;
}

json point_to_json(const std::array<double, 3>& p, int N) {
  json arr = json::array();
  for (int a = 0; a < N; ++a) arr.push_back(p[a]);
  return arr;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(root);
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  const int N = c.grid.N;
  json root;
  root["grid"] = {{"N", c.grid.N}, {"L", c.grid.L}, {"M", c.grid.M}};
  root["s"] = c.s;
  root["q"] = c.q;
  root["eps"] = c.eps;
  root["h"] = {{"family", c.h.family},
               {"amplitude", c.h.amplitude},
               {"center", point_to_json(c.h.center, N)},
               {"width", c.h.width}};
  root["bubble"] = {{"mu", c.bubble.mu}, {"xi", point_to_json(c.bubble.xi, N)}};
  root["cutoff"] = {{"r", c.cutoff_spec.r}, {"x0", point_to_json(c.cutoff_spec.x0, N)}};
  root["solve"] = {{"max_iters", c.solve.max_iters},
                   {"grad_tol", c.solve.grad_tol},
                   {"step0", c.solve.step0},
                   {"backtrack_factor", c.solve.backtrack_factor},
                   {"decrease_coeff", c.solve.decrease_coeff},
                   {"seed", c.solve.seed}};
  root["solve_mp"] = {{"max_iters", c.solve_mp.max_iters},
                      {"grad_tol", c.solve_mp.grad_tol},
                      {"step0", c.solve_mp.step0},
                      {"path_nodes", c.solve_mp.path_nodes},
                      {"t_steps", c.solve_mp.t_steps},
                      {"mu", c.solve_mp.mu}};
  root["verify"] = {{"samples", c.verify.samples},
                    {"seed", c.verify.seed},
                    {"include_dyadic", c.verify.include_dyadic}};
  json cases = json::array();
  for (const auto& [caseN, cases_s] : c.appendix.cases)
    cases.push_back(json::array({caseN, cases_s}));
  root["appendix"] = {{"R_list", c.appendix.R_list},
                      {"resolution", c.appendix.resolution},
                      {"cases", cases}};
  root["concentration"] = {{"kind", c.concentration.kind},
                           {"n_max", c.concentration.n_max},
                           {"delta", c.concentration.delta}};
  root["reference_grid"] = {{"L", c.reference_grid.L}, {"M", c.reference_grid.M}};
  root["s_hat"] = c.s_hat;
  return root.dump(2) + "\n";
}

GridSpec resolve_reference_grid(const RunConfig& config) {
  GridSpec ref;
  ref.N = config.grid.N;
  if (config.reference_grid.M > 0) {
    ref.L = config.reference_grid.L;
    ref.M = config.reference_grid.M;
  } else if (config.grid.N == 1) {
    ref.L = 65536.0;
    ref.M = 1 << 22;
  } else {
    ref.L = 128.0;
    ref.M = 4096;
  }
  return ref;
}

double resolve_cutoff_radius(const RunConfig& config, const Params& params) {
  if (config.cutoff_spec.r > 0.0) return config.cutoff_spec.r;
  return std::min(params.ball_radius, config.grid.L / 2.0);
}

}  // namespace fracpass
