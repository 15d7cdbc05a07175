#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "smarena/rng.hpp"

namespace smarena::cli {

namespace {

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& v, const std::string& where, const std::string& key) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) {
    throw ConfigError(fmt::format("{}: {} expects a number, got '{}'", where, key, v));
  }
  return x;
}

std::uint64_t to_uint(const std::string& v, const std::string& where, const std::string& key) {
  std::uint64_t x = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) {
    throw ConfigError(fmt::format("{}: {} expects a non-negative integer, got '{}'", where, key, v));
  }
  return x;
}

bool to_bool(const std::string& v, const std::string& where, const std::string& key) {
  std::string s;
  for (char c : v) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(fmt::format("{}: {} expects true or false, got '{}'", where, key, v));
}

template <class F>
auto wrap(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& value,
                   const std::string& where) {
  std::string key = raw_key;
  std::replace(key.begin(), key.end(), '-', '_');

  if (key == "seed") {
    c.seed = to_uint(value, where, key);
  } else if (key == "reps" || key == "repetitions") {
    c.sim.repetitions = static_cast<std::uint32_t>(to_uint(value, where, key));
  } else if (key == "cap" || key == "step_cap") {
    c.sim.step_cap = to_uint(value, where, key);
  } else if (key == "alpha") {
    c.sim.alpha = to_double(value, where, key);
  } else if (key == "window") {
    c.sim.window = to_uint(value, where, key);
  } else if (key == "epsilon") {
    c.epsilon = to_double(value, where, key);
  } else if (key == "aggregate") {
    c.aggregate = wrap(where, [&] { return parse_aggregate(value); });
  } else if (key == "hm_preference") {
    c.hm_preference = to_bool(value, where, key);
  } else if (key == "desk_scale") {
    if (to_bool(value, where, key)) {
      const SimConfig d = SimConfig::desk_scale();
      c.sim.repetitions = d.repetitions;
      c.sim.step_cap = d.step_cap;
    }
  } else if (key == "powers") {
    c.powers.clear();
    for (const auto& s : split_list(value)) c.powers.push_back(to_double(s, where, key));
  } else if (key == "strategies") {
    c.strategies.clear();
    for (const auto& s : split_list(value)) {
      c.strategies.push_back(wrap(where, [&] { return parse_strategy(s); }));
    }
  } else if (key == "types") {
    c.types.clear();
    for (const auto& s : split_list(value)) {
      c.types.push_back(wrap(where, [&] { return parse_miner_type(s); }));
    }
  } else if (key == "n_malicious") {
    c.n_malicious.clear();
    for (const auto& s : split_list(value)) c.n_malicious.push_back(to_uint(s, where, key));
    if (c.n_malicious.empty()) throw ConfigError(fmt::format("{}: n_malicious is empty", where));
  } else if (key == "step") {
    c.step = to_double(value, where, key);
  } else if (key == "model") {
    c.model = wrap(where, [&] { return parse_model(value); });
  } else if (key == "equal_power") {
    c.equal_power = to_bool(value, where, key);
  } else if (key == "jobs") {
    c.jobs = static_cast<int>(to_uint(value, where, key));
  } else if (key == "out") {
    c.out = value;
  } else {
    throw ConfigError(fmt::format("{}: unknown key '{}'", where, raw_key));
  }
}

void load_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::string where = fmt::format("{}:{}", path, lineno);
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}: expected 'key = value'", where));
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("{}: missing key", where));
    if (value.empty()) throw ConfigError(fmt::format("{}: missing value for '{}'", where, key));
    apply_setting(config, key, value, where);
  }
}

void validate_for(const RunConfig& c, const std::string& command) {
  try {
    c.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(c.epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (c.jobs < 1) throw ConfigError("jobs must be at least 1");

  if (command == "simulate" || command == "game") {
    if (c.powers.empty()) throw ConfigError("missing 'powers'");
    const std::size_t listed = command == "simulate" ? c.strategies.size() : c.types.size();
    const char* what = command == "simulate" ? "strategies" : "types";
    if (listed == 0) throw ConfigError(fmt::format("missing '{}'", what));
    if (listed != c.powers.size()) {
      throw ConfigError(fmt::format("{} powers but {} {} entries", c.powers.size(), listed, what));
    }
    try {
      PowerAllocation{c.powers}.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    return;
  }
  for (std::size_t n : c.n_malicious) {
    try {
      c.grid(n).validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("n_malicious={}: {}", n, e.what()));
    }
    if (c.model == Model::Dynamic && n > 12) {
      throw ConfigError("dynamic model supports at most 12 malicious miners");
    }
  }
}

std::string canonical_settings(const RunConfig& c) {
  std::string s;
  s += fmt::format("alpha={}\ncap={}\nreps={}\nwindow={}\n", c.sim.alpha, c.sim.step_cap,
                   c.sim.repetitions, c.sim.window);
  s += fmt::format("seed={}\n", c.seed ? fmt::format("{}", *c.seed) : std::string("entropy"));
  s += fmt::format("epsilon={}\naggregate={}\nhm_preference={}\n", c.epsilon, to_string(c.aggregate),
                   c.hm_preference);
  std::string list;
  for (double p : c.powers) list += fmt::format("{}{}", list.empty() ? "" : ",", p);
  s += "powers=" + list + "\n";
  list.clear();
  for (auto k : c.strategies) list += fmt::format("{}{}", list.empty() ? "" : ",", to_string(k));
  s += "strategies=" + list + "\n";
  list.clear();
  for (auto t : c.types) list += fmt::format("{}{}", list.empty() ? "" : ",", to_string(t));
  s += "types=" + list + "\n";
  list.clear();
  for (auto n : c.n_malicious) list += fmt::format("{}{}", list.empty() ? "" : ",", n);
  s += "n_malicious=" + list + "\n";
  s += fmt::format("step={}\nmodel={}\nequal_power={}\n",
                   c.step ? fmt::format("{}", *c.step) : std::string("default"), to_string(c.model),
                   c.equal_power);
  return s;
}

std::string config_hash(const RunConfig& c) {
  return fmt::format("{:016x}", hash_key(canonical_settings(c)));
}

}  // namespace smarena::cli
