#include "mcsd/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace mcsd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const IniSection& s, const std::string& key) {
  return "[" + s.name + (s.arg.empty() ? "" : " " + s.arg) + "] " + key;
}

long to_long(const IniSection& s, const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long out = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(where(s, key) + ": expected an integer, got '" + v + "'");
  }
}

double to_double(const IniSection& s, const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(where(s, key) + ": expected a number, got '" + v + "'");
  }
}

bool to_bool(const IniSection& s, const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(where(s, key) + ": expected true or false, got '" + v + "'");
}

void reject_unknown(const IniSection& s, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : s.values)
    if (!allowed.count(k)) throw ConfigError(where(s, k) + ": unknown key");
}

MethodEntry parse_method(const IniSection& s) {
  if (s.arg.empty()) throw ConfigError("line " + std::to_string(s.line) + ": [method] needs a name");
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = s.values.find(key);
    if (it == s.values.end()) return std::nullopt;
    return it->second;
  };
  const auto kind = get("kind");
  if (!kind) throw ConfigError(where(s, "kind") + ": missing");
  const auto sched = get("schedule");
  if (!sched) throw ConfigError(where(s, "schedule") + ": missing");

  MethodSpec spec;
  if (*kind == "mcsd") {
    reject_unknown(s, {"kind", "schedule", "norm"});
    spec = McsdMethod{parse_norm(get("norm").value_or("spectral"))};
  } else if (*kind == "rgd") {
    reject_unknown(s, {"kind", "schedule"});
    spec = RgdMethod{};
  } else if (*kind == "mm") {
    reject_unknown(s, {"kind", "schedule", "inner_iters", "inner_lr", "quality_tol"});
    ManifoldMuonMethod mm;
    if (auto v = get("inner_iters")) mm.inner_iters = static_cast<int>(to_long(s, "inner_iters", *v));
    if (auto v = get("inner_lr")) mm.inner_lr = to_double(s, "inner_lr", *v);
    if (auto v = get("quality_tol")) mm.quality_tol = to_double(s, "quality_tol", *v);
    if (mm.inner_iters < 1) throw ConfigError(where(s, "inner_iters") + ": must be >= 1");
    if (!(mm.inner_lr > 0)) throw ConfigError(where(s, "inner_lr") + ": must be positive");
    spec = mm;
  } else if (*kind == "smcsd") {
    reject_unknown(s, {"kind", "schedule", "norm", "beta", "noise"});
    StochasticMcsdMethod sm;
    sm.norm = parse_norm(get("norm").value_or("spectral"));
    if (auto v = get("beta")) sm.beta = to_double(s, "beta", *v);
    if (!(sm.beta >= 0.0 && sm.beta < 1.0)) throw ConfigError(where(s, "beta") + ": must lie in [0, 1)");
    if (auto v = get("noise")) sm.noise = parse_noise(*v);
    spec = sm;
  } else {
    throw ConfigError(where(s, "kind") + ": unknown method kind '" + *kind + "' (expected mcsd|rgd|mm|smcsd)");
  }
  return MethodEntry{s.arg, spec, parse_schedule(*sched)};
}

}  // namespace

std::vector<IniSection> parse_ini(const std::string& text) {
  std::vector<IniSection> out;
  std::istringstream in(text);
  std::string raw;
  long lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      const std::string inside = trim(line.substr(1, line.size() - 2));
      const auto sp = inside.find_first_of(" \t");
      IniSection sec;
      sec.name = sp == std::string::npos ? inside : inside.substr(0, sp);
      sec.arg = sp == std::string::npos ? "" : trim(inside.substr(sp));
      sec.line = lineno;
      out.push_back(std::move(sec));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (out.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!out.back().values.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return out;
}

Polar parse_polar(const std::string& spec) {
  if (spec == "exact") return Polar::exact();
  const std::string prefix = "iterative:";
  if (spec.rfind(prefix, 0) == 0) {
    try {
      const int iters = std::stoi(spec.substr(prefix.size()));
      if (iters < 1) throw std::invalid_argument(spec);
      return Polar::iterative(iters);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("polar mode '" + spec + "': expected exact or iterative:K with K >= 1");
}

NoiseConfig parse_noise(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "gaussian") {
      const double s = std::stod(arg);
      if (!(s >= 0)) throw std::invalid_argument(arg);
      return AdditiveGaussian{s};
    }
    if (kind == "minibatch") {
      const long b = std::stol(arg);
      if (b < 1) throw std::invalid_argument(arg);
      return Minibatch{b};
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("noise '" + spec + "': expected gaussian:SIGMA or minibatch:BATCH");
}

BenchConfig parse_bench_config(const std::string& text) {
  BenchConfig cfg;
  cfg.methods.clear();
  bool saw_instance = false;
  std::set<std::string> names;
  for (const IniSection& s : parse_ini(text)) {
    if (s.name == "instance") {
      reject_unknown(s, {"n", "p", "d", "data_seed", "cache"});
      saw_instance = true;
      for (const auto& [k, v] : s.values) {
        if (k == "n") cfg.instance.n = to_long(s, k, v);
        if (k == "p") cfg.instance.p = to_long(s, k, v);
        if (k == "d") cfg.instance.d = to_long(s, k, v);
        if (k == "data_seed") cfg.instance.data_seed = static_cast<std::uint64_t>(to_long(s, k, v));
        if (k == "cache") cfg.instance.cache = v;
      }
    } else if (s.name == "run") {
      reject_unknown(s, {"T", "init_seed", "repeats", "polar", "output_dir", "workers", "record_time"});
      for (const auto& [k, v] : s.values) {
        if (k == "T") cfg.T = to_long(s, k, v);
        if (k == "init_seed") cfg.init_seed = static_cast<std::uint64_t>(to_long(s, k, v));
        if (k == "repeats") cfg.repeats = static_cast<int>(to_long(s, k, v));
        if (k == "polar") cfg.polar = parse_polar(v);
        if (k == "output_dir") cfg.output_dir = v;
        if (k == "workers") cfg.workers = static_cast<int>(to_long(s, k, v));
        if (k == "record_time") cfg.record_time = to_bool(s, k, v);
      }
    } else if (s.name == "method") {
      MethodEntry m = parse_method(s);
      if (!names.insert(m.name).second) throw ConfigError("duplicate method name '" + m.name + "'");
      cfg.methods.push_back(std::move(m));
    } else {
      throw ConfigError("line " + std::to_string(s.line) + ": unknown section [" + s.name + "]");
    }
  }
  if (!saw_instance) throw ConfigError("config: missing [instance] section");
  const auto& in = cfg.instance;
  if (in.p < 1 || in.p > in.n || in.n > in.d) throw ConfigError("config: instance needs 1 <= p <= n <= d");
  if (cfg.T < 0) throw ConfigError("config: T must be >= 0");
  if (cfg.repeats < 1) throw ConfigError("config: repeats must be >= 1");
  if (cfg.workers < 1) throw ConfigError("config: workers must be >= 1");
  return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  BenchConfig cfg = parse_bench_config(ss.str());
  apply_env_overrides(cfg);
  return cfg;
}

void apply_env_overrides(BenchConfig& config) {
  if (const char* dir = std::getenv("MCSD_OUTPUT_DIR"); dir && *dir) config.output_dir = dir;
  if (const char* w = std::getenv("MCSD_WORKERS"); w && *w) {
    try {
      config.workers = std::stoi(w);
    } catch (const std::exception&) {
      throw ConfigError("MCSD_WORKERS must be an integer");
    }
    if (config.workers < 1) throw ConfigError("MCSD_WORKERS must be >= 1");
  }
}

BenchConfig default_pca_config() {
  BenchConfig cfg;
  cfg.instance = InstanceSpec{200, 5, 1000, 20260101, std::nullopt};
  cfg.T = 300;
  cfg.init_seed = 7;
  cfg.repeats = 3;
  cfg.polar = Polar::iterative(8);
  cfg.methods = {
      MethodEntry{"rgd", RgdMethod{}, StepSchedule::make(ConstantStep{1e-3})},
      MethodEntry{"spel", McsdMethod{NormKind::Spectral}, StepSchedule::make(PeriodicDecay{0.1, 0.5, 30})},
      MethodEntry{"mm", ManifoldMuonMethod{10, 0.1, 1e-3}, StepSchedule::make(PeriodicDecay{0.1, 0.5, 30})},
  };
  return cfg;
}

}  // namespace mcsd
