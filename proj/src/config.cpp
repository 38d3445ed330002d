#include "mgbounds/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mgb {

using nlohmann::json;

OutputFormat output_format_from_string(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "structured" || s == "json") return OutputFormat::structured;
  if (s == "both") return OutputFormat::both;
  throw ConfigError("output.format: expected csv, structured or both, got '" + s + "'");
}

ModelProblem make_problem(const ProblemConfig& p) {
  switch (p.kind) {
    case ProblemKind::poisson1d:
      return poisson_1d(p.sizes.at(0));
    case ProblemKind::poisson2d:
      return poisson_2d(p.sizes.at(0), p.sizes.at(1));
    case ProblemKind::random_spd:
      return random_spd(p.sizes.at(0), p.cond, p.seed);
  }
  throw ConfigError("problem.kind: unsupported");
}

namespace {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) throw ConfigError(join(k) + ": unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) const { return j_.at(key); }
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  T get(const char* key, T fallback) const {
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(join(key) + ": wrong type (" + j_.at(key).dump() + ")");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError((path_.empty() ? std::string("config") : path_) + ": " + msg);
  }

 private:
  const json& j_;
  std::string path_;
};

template <typename T>
T checked(T value, bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw ConfigError(field + ": " + rule);
  return value;
}

double get_number(const Reader& r, const char* key, double fallback) {
  if (!r.has(key)) return fallback;
  if (!r.at(key).is_number()) throw ConfigError(r.join(key) + ": expected a number");
  return r.at(key).get<double>();
}

std::int64_t get_int(const Reader& r, const char* key, std::int64_t fallback) {
  if (!r.has(key)) return fallback;
  if (!r.at(key).is_number_integer()) throw ConfigError(r.join(key) + ": expected an integer");
  return r.at(key).get<std::int64_t>();
}

std::uint64_t get_u64(const Reader& r, const char* key, std::uint64_t fallback) {
  if (!r.has(key)) return fallback;
  const auto& v = r.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(r.join(key) + ": expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

template <typename Fn>
void for_each_entry(const json& root, const char* key, Fn fn) {
  if (!root.contains(key)) return;
  const json& v = root.at(key);
  if (v.is_array()) {
    if (v.empty()) throw ConfigError(std::string(key) + ": empty list");
    for (std::size_t i = 0; i < v.size(); ++i) {
      fn(v[i], std::string(key) + "[" + std::to_string(i) + "]");
    }
  } else {
    fn(v, key);
  }
}

ProblemConfig parse_problem(const json& j, const std::string& path) {
  Reader r(j, path);
  r.allow({"kind", "n", "nx", "ny", "cond", "seed"});
  ProblemConfig p;
  const std::string kind = r.get<std::string>("kind", "poisson1d");
  auto size = [&](const char* key, std::int64_t fallback) {
    const auto v = get_int(r, key, fallback);
    return Index(checked(v, v >= 2, r.join(key), "must be >= 2"));
  };
  if (kind == "poisson1d") {
    p.kind = ProblemKind::poisson1d;
    p.sizes = {size("n", 31)};
  } else if (kind == "poisson2d") {
    p.kind = ProblemKind::poisson2d;
    const Index nx = size("nx", 7);
    p.sizes = {nx, size("ny", nx)};
  } else if (kind == "random_spd") {
    p.kind = ProblemKind::random_spd;
    p.sizes = {size("n", 31)};
    p.cond = get_number(r, "cond", 100.0);
    checked(p.cond, p.cond >= 1.0, r.join("cond"), "must be >= 1");
    p.seed = get_u64(r, "seed", 0);
  } else {
    throw ConfigError(r.join("kind") + ": unknown problem kind '" + kind +
                      "' (expected poisson1d, poisson2d or random_spd)");
  }
  return p;
}

SmootherSpec parse_smoother(const json& j, const std::string& path) {
  Reader r(j, path);
  r.allow({"kind", "omega"});
  SmootherSpec s;
  const std::string kind = r.get<std::string>("kind", "gauss_seidel");
  try {
    s.kind = smoother_kind_from_string(kind);
  } catch (const Error& e) {
    throw ConfigError(r.join("kind") + ": " + e.what());
  }
  s.omega = get_number(r, "omega", s.kind == SmootherKind::jacobi ? 0.5 : 1.0);
  checked(s.omega, s.omega > 0.0 && s.omega <= 2.0, r.join("omega"), "must lie in (0, 2]");
  return s;
}

CoarseConfig parse_coarse(const json& j, const std::string& path) {
  Reader r(j, path);
  r.allow({"mode", "alpha", "magnitude"});
  CoarseConfig c;
  const std::string mode = r.get<std::string>("mode", "exact");
  try {
    c.mode = coarse_mode_from_string(mode);
  } catch (const Error& e) {
    throw ConfigError(r.join("mode") + ": " + e.what());
  }
  c.alpha = get_number(r, "alpha", 1.0);
  checked(c.alpha, c.alpha > 0.0, r.join("alpha"), "must be > 0");
  c.magnitude = get_number(r, "magnitude", 0.1);
  checked(c.magnitude, c.magnitude >= 0.0, r.join("magnitude"), "must be >= 0");
  return c;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // The library message carries line and column.
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
}

void apply_override(json& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set " + spec + ": expected path=value");
  }
  const std::string path = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  std::string pointer;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("--set " + spec + ": empty path component");
    pointer += "/" + part;
  }
  try {
    root[json::json_pointer(pointer)] = value;
  } catch (const json::exception& e) {
    throw ConfigError("--set " + spec + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  json root = text.empty() ? json::object() : parse_json(text);
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& o : overrides) apply_override(root, o);

  Reader top(root, "");
  top.allow({"problem", "smoother", "transfer", "coarse", "multigrid", "sweep", "analysis",
             "output", "seed", "dense_cap", "threads"});

  ExperimentConfig cfg;
  if (root.contains("problem")) {
    cfg.problems.clear();
    for_each_entry(root, "problem",
                   [&](const json& j, const std::string& p) { cfg.problems.push_back(parse_problem(j, p)); });
  }
  if (root.contains("smoother")) {
    cfg.smoothers.clear();
    for_each_entry(root, "smoother", [&](const json& j, const std::string& p) {
      cfg.smoothers.push_back(parse_smoother(j, p));
    });
  }
  if (root.contains("coarse")) {
    cfg.coarse.clear();
    for_each_entry(root, "coarse",
                   [&](const json& j, const std::string& p) { cfg.coarse.push_back(parse_coarse(j, p)); });
  }
  if (root.contains("transfer")) {
    Reader r(root.at("transfer"), "transfer");
    r.allow({"method", "strong_threshold"});
    try {
      cfg.transfer.method = coarsening_from_string(r.get<std::string>("method", "geometric"));
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("transfer.method: ") + e.what());
    }
    cfg.transfer.strong_threshold = get_number(r, "strong_threshold", 0.25);
    checked(0, cfg.transfer.strong_threshold > 0.0 && cfg.transfer.strong_threshold <= 1.0,
            "transfer.strong_threshold", "must lie in (0, 1]");
  }
  if (root.contains("multigrid")) {
    Reader r(root.at("multigrid"), "multigrid");
    r.allow({"levels", "gamma", "a0_policy", "a0_scale", "a0_bump", "a0_seed"});
    auto& mg = cfg.multigrid;
    mg.levels = int(get_int(r, "levels", 3));
    checked(0, mg.levels >= 1 && mg.levels <= 16, "multigrid.levels", "must lie in [1, 16]");
    mg.gamma = int(get_int(r, "gamma", 1));
    checked(0, mg.gamma >= 1 && mg.gamma <= kMaxGamma, "multigrid.gamma",
            "must lie in [1, " + std::to_string(kMaxGamma) + "]");
    try {
      mg.a0.policy = a0_policy_from_string(r.get<std::string>("a0_policy", "exact"));
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("multigrid.a0_policy: ") + e.what());
    }
    mg.a0.scale = get_number(r, "a0_scale", 1.0);
    checked(0, mg.a0.scale >= 1.0, "multigrid.a0_scale", "must be >= 1");
    mg.a0.bump = get_number(r, "a0_bump", 0.0);
    checked(0, mg.a0.bump >= 0.0, "multigrid.a0_bump", "must be >= 0");
    mg.a0.seed = get_u64(r, "a0_seed", 0);
  }
  if (root.contains("sweep")) {
    Reader r(root.at("sweep"), "sweep");
    r.allow({"alphas", "random_instances"});
    if (r.has("alphas")) {
      const json& a = r.at("alphas");
      if (!a.is_array()) throw ConfigError("sweep.alphas: expected an array of numbers");
      cfg.sweep.alphas.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string field = "sweep.alphas[" + std::to_string(i) + "]";
        if (!a[i].is_number()) throw ConfigError(field + ": expected a number");
        cfg.sweep.alphas.push_back(checked(a[i].get<double>(), a[i].get<double>() > 0.0, field, "must be > 0"));
      }
    }
    cfg.sweep.random_instances = int(get_int(r, "random_instances", 0));
    checked(0, cfg.sweep.random_instances >= 0, "sweep.random_instances", "must be >= 0");
  }
  if (root.contains("analysis")) {
    Reader r(root.at("analysis"), "analysis");
    r.allow({"notay", "fs", "improved_fs", "kappa", "lemma31"});
    auto flag = [&](const char* key, bool fallback) {
      if (!r.has(key)) return fallback;
      if (!r.at(key).is_boolean()) throw ConfigError(r.join(key) + ": expected true or false");
      return r.at(key).get<bool>();
    };
    cfg.analysis.notay = flag("notay", true);
    cfg.analysis.fs = flag("fs", true);
    cfg.analysis.improved_fs = flag("improved_fs", true);
    cfg.analysis.kappa = flag("kappa", true);
    cfg.analysis.lemma31 = flag("lemma31", true);
  }
  if (root.contains("output")) {
    Reader r(root.at("output"), "output");
    r.allow({"dir", "stem", "format", "dump_split"});
    cfg.output.dir = r.get<std::string>("dir", ".");
    cfg.output.stem = r.get<std::string>("stem", "");
    cfg.output.format = output_format_from_string(r.get<std::string>("format", "csv"));
    cfg.output.dump_split = r.get<bool>("dump_split", false);
  }
  cfg.seed = get_u64(top, "seed", 0);
  const auto cap = get_int(top, "dense_cap", kDefaultDenseCap);
  cfg.dense_cap = checked(Index(cap), cap >= 1, "dense_cap", "must be >= 1");
  const auto threads = get_int(top, "threads", 1);
  cfg.threads = checked(int(threads), threads >= 1 && threads <= 256, "threads", "must lie in [1, 256]");
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace mgb
