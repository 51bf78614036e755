#include "loghe/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "loghe/errors.hpp"

namespace loghe {

namespace {

const std::set<std::string> kKnownKeys = {
    "experiment", "n", "L", "M", "dt", "T", "p", "theta", "model",
    "C1", "C2", "C3", "C4", "L1", "L2", "u0", "seed", "seeds",
    "replicates", "delta_list", "n_list", "beta", "p_wnorm", "M_threshold",
    "taming", "log_drift", "snapshot_stride", "p_list", "t_points", "cases",
    "saturation_threshold", "out", "corrupt_rhs"};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Entry {
  std::string value;
  int line;
};

struct RawConfig {
  std::map<std::string, Entry> entries;
  std::string origin;

  bool has(const std::string& key) const { return entries.count(key) > 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const auto it = entries.find(key);
    const std::string where =
        it == entries.end() ? origin : origin + ":" + std::to_string(it->second.line);
    throw ConfigError(where + ": key '" + key + "': " + msg);
  }

  double number(const std::string& key, double fallback) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second.value, &pos);
      if (pos != it->second.value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      fail(key, "expected a number, got '" + it->second.value + "'");
    }
  }

  long long integer(const std::string& key, long long fallback) const {
    const double v = number(key, static_cast<double>(fallback));
    const long long i = static_cast<long long>(v);
    if (static_cast<double>(i) != v) fail(key, "expected an integer");
    return i;
  }

  bool boolean(const std::string& key, bool fallback) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    const std::string& v = it->second.value;
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    fail(key, "expected true/false, got '" + v + "'");
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second.value;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    std::vector<double> out;
    std::stringstream ss(it->second.value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) fail(key, "empty list element");
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        fail(key, "expected a comma-separated number list, got '" + it->second.value + "'");
      }
    }
    if (out.empty()) fail(key, "list must be nonempty");
    return out;
  }
};

RawConfig tokenize(const std::string& text, const std::string& origin) {
  RawConfig raw;
  raw.origin = origin;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      continue;  // sections organize the file; keys stay globally unique
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (key == "seeds") key = "seed";  // documented alias
    if (!kKnownKeys.count(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    const auto [it, inserted] = raw.entries.emplace(key, Entry{value, lineno});
    if (!inserted)
      throw ConfigError(origin + ": duplicate key '" + key + "' at lines " +
                        std::to_string(it->second.line) + " and " + std::to_string(lineno));
  }
  return raw;
}

Vec parse_u0(const RawConfig& raw) {
  const std::string s = raw.text("u0", "e1");
  if (!s.empty() && s[0] == 'e' && s.find(',') == std::string::npos) {
    int k = 0;
    try {
      std::size_t pos = 0;
      k = std::stoi(s.substr(1), &pos);
      if (pos != s.size() - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      raw.fail("u0", "expected a mode name like e1 or a coefficient list");
    }
    if (k < 1) raw.fail("u0", "mode index must be >= 1");
    Vec u0(static_cast<std::size_t>(k), 0.0);
    u0.back() = 1.0;
    return u0;
  }
  return raw.numbers("u0", {1.0});
}

DiffusionModel parse_model(const RawConfig& raw, double theta) {
  const std::string name = raw.text("model", "zero");
  DiffusionModel m;
  if (name == "zero") {
    m = DiffusionModel::zero();
  } else if (name == "linear_cut_log") {
    m = DiffusionModel::linear_cut_log();
    if (raw.has("L1")) m.L1 = raw.number("L1", m.L1);
    if (raw.has("L2")) m.L2 = raw.number("L2", m.L2);
    if (raw.has("L1") || raw.has("L2")) m.h1_empirical = false;
  } else if (name == "sublinear") {
    m = DiffusionModel::sublinear(theta, raw.number("C1", 1.0), raw.number("C2", 1.0));
  } else {
    raw.fail("model", "expected one of zero | linear_cut_log | sublinear, got '" + name + "'");
  }
  if (raw.has("C3")) m.C3 = raw.number("C3", m.C3);
  if (raw.has("C4")) m.C4 = raw.number("C4", m.C4);
  return m;
}

ExperimentSpec build_spec(const RawConfig& raw) {
  static const std::set<std::string> kExperiments = {
      "simulate", "verify", "uniqueness", "moments", "lyapunov", "converge", "schedule"};

  ExperimentSpec spec;
  if (!raw.has("experiment")) raw.fail("experiment", "required key is missing");
  spec.experiment = raw.text("experiment", "");
  if (!kExperiments.count(spec.experiment))
    raw.fail("experiment", "unknown experiment '" + spec.experiment + "'");

  spec.theta = raw.number("theta", 0.0);
  if (spec.theta < 0.0 || spec.theta >= 1.0) raw.fail("theta", "theta must lie in [0,1)");

  if (!raw.has("n")) raw.fail("n", "required key is missing");
  spec.sim.n = static_cast<int>(raw.integer("n", 0));
  if (spec.sim.n < 1) raw.fail("n", "n must be >= 1");
  spec.sim.L = raw.number("L", kPi);
  if (!(spec.sim.L > 0.0)) raw.fail("L", "L must be > 0");
  spec.sim.M = static_cast<int>(raw.integer("M", 0));
  if (spec.sim.M != 0 && spec.sim.M < 4 * spec.sim.n) raw.fail("M", "M must be >= 4n");

  if (!raw.has("dt")) raw.fail("dt", "required key is missing");
  spec.sim.dt = raw.number("dt", 0.0);
  if (!(spec.sim.dt > 0.0)) raw.fail("dt", "dt must be > 0");
  if (!raw.has("T")) raw.fail("T", "required key is missing");
  spec.sim.T = raw.number("T", 0.0);
  if (!(spec.sim.T >= spec.sim.dt)) raw.fail("T", "T must be >= dt");

  spec.sim.u0 = parse_u0(raw);
  spec.sim.model = parse_model(raw, spec.theta);
  spec.sim.model.theta = spec.theta;
  spec.sim.seed = static_cast<std::uint64_t>(raw.integer("seed", 0));
  spec.sim.taming = raw.boolean("taming", false);
  spec.sim.log_drift = raw.boolean("log_drift", true);
  spec.sim.snapshot_stride = static_cast<int>(raw.integer("snapshot_stride", 0));

  spec.replicates = static_cast<int>(raw.integer("replicates", 1));
  if (spec.replicates < 1) raw.fail("replicates", "replicates must be >= 1");

  spec.p = raw.number("p", 2.0);
  if (spec.p < 2.0) raw.fail("p", "p must be >= 2");
  spec.p_list = raw.numbers("p_list", {spec.p});
  for (double q : spec.p_list)
    if (q < 2.0) raw.fail("p_list", "every p must be >= 2");
  spec.sim.moment_powers = spec.p_list;
  if (std::find(spec.sim.moment_powers.begin(), spec.sim.moment_powers.end(), 2.0) ==
      spec.sim.moment_powers.end())
    spec.sim.moment_powers.push_back(2.0);

  spec.delta_list = raw.numbers("delta_list", spec.delta_list);
  for (double d : spec.delta_list)
    if (d < 0.0) raw.fail("delta_list", "deltas must be >= 0");

  const Vec default_nlist(spec.n_list.begin(), spec.n_list.end());
  spec.n_list.clear();
  for (double v : raw.numbers("n_list", default_nlist)) {
    const int n = static_cast<int>(v);
    if (static_cast<double>(n) != v || n < 1) raw.fail("n_list", "entries must be positive integers");
    spec.n_list.push_back(n);
  }

  spec.beta = raw.number("beta", 0.25);
  if (!(spec.beta > 0.0 && spec.beta < 0.5)) raw.fail("beta", "beta must lie in (0, 1/2)");
  spec.p_wnorm = raw.number("p_wnorm", 1.5);
  if (!(spec.p_wnorm > 1.0 && spec.p_wnorm < 2.0)) raw.fail("p_wnorm", "p_wnorm must lie in (1, 2)");

  spec.M_threshold = raw.number("M_threshold", 0.0);
  if (spec.M_threshold < 0.0) raw.fail("M_threshold", "threshold must be >= 0");
  spec.t_points = static_cast<int>(raw.integer("t_points", 10));
  if (spec.t_points < 3) raw.fail("t_points", "need at least 3 grid points");
  spec.cases = static_cast<int>(raw.integer("cases", 0));
  if (spec.cases < 0) raw.fail("cases", "cases must be >= 0");
  spec.saturation_threshold = raw.number("saturation_threshold", 0.2);
  spec.out_dir = raw.text("out", "out");
  spec.corrupt_rhs = raw.boolean("corrupt_rhs", false);
  return spec;
}

}  // namespace

ExperimentSpec parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

ExperimentSpec parse_config_text(const std::string& text, const std::string& origin) {
  return build_spec(tokenize(text, origin));
}

}  // namespace loghe
