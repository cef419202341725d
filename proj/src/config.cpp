#include "starnet/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "starnet/qops.hpp"
#include "starnet/seed.hpp"

namespace starnet::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || std::isnan(v)) {
    throw InvalidArgument("config: key '" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw InvalidArgument("config: key '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

bool is_known(const std::string& key) {
  const auto& keys = known_keys();
  return std::any_of(keys.begin(), keys.end(), [&](const KeyInfo& k) { return k.key == key; });
}

}  // namespace

const std::vector<KeyInfo>& known_keys() {
  static const std::vector<KeyInfo> keys = {
      {"m", "3", "chain length(s) M, comma separated"},
      {"n", "3", "number of outer spins N"},
      {"lambda", "1", "star coupling lambda in rad/s (spectrum, wstate)"},
      {"t2_ms", "1", "dephasing time(s) T2 in ms, comma separated; 'inf' disables noise"},
      {"r_nm", "10", "chain lattice spacing r in nm"},
      {"delta_ratio", "0.9", "register coupling ratio delta/kappa"},
      {"kappa_hz", "26000", "chain coupling kappa at distance r, in Hz"},
      {"nnn", "true", "include second-nearest-neighbour couplings"},
      {"neighbor_rule", "survivor", "neighbour choice after spin loss: survivor or lattice"},
      {"lost", "", "lost chain sites for evolve/scan, comma separated"},
      {"sigma2", "0.25", "disorder variance of the chain spacings in nm^2"},
      {"runs", "100", "Monte Carlo runs per chain length"},
      {"seed", "1", "top-level random seed"},
      {"t_end", "0", "evolution window in units of 1/kappa (0 = automatic)"},
      {"samples", "2001", "number of time samples"},
      {"path", "sector", "evolution path for evolve: sector or full"},
      {"gx", "10", "field gradient along x in T/m"},
      {"gy", "5", "field gradient along y in T/m"},
      {"b0", "0.01", "reference field B0 in T"},
      {"gamma", "1.76085963e11", "gyromagnetic ratio in rad/s/T"},
      {"omega0", "1.8032e10", "zero-field transition frequency in rad/s"},
      {"d_nm", "50", "separation D of a sensing pair in nm"},
      {"phase_span", "12.566370614359172", "largest gamma*G*D*t sampled by gradient, in rad"},
      {"grad_samples", "401", "number of gradient time samples"},
      {"out", "", "output directory (default: $STARNET_OUT or ./starnet_out)"},
      {"jobs", "0", "worker threads (0 = hardware concurrency)"},
  };
  return keys;
}

std::string default_for(const std::string& command, const std::string& key) {
  if (key == "m") {
    if (command == "sweep" || command == "fit") return "3,5,7,9,11";
    if (command == "disorder") return "3,5,7";
    if (command == "loss") return "3,4,5,6,7,8";
    if (command == "gradient") return "3,7";
  }
  if (key == "t2_ms" && command == "fit") return "0.5,1,2";
  if (key == "out") {
    const char* env = std::getenv("STARNET_OUT");
    return env && *env ? std::string(env) : std::string("starnet_out");
  }
  for (const auto& k : known_keys()) {
    if (k.key == key) return k.default_value;
  }
  throw InvalidArgument("config: unknown key '" + key + "'");
}

std::string RunConfig::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw InvalidArgument("config: missing key '" + key + "'");
  return it->second;
}

int RunConfig::get_int(const std::string& key) const {
  const long long v = parse_integer(key, get(key));
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw InvalidArgument("config: key '" + key + "' out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string t = trim(get(key));
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || end != t.c_str() + t.size()) {
    throw InvalidArgument("config: key '" + key + "' expects a non-negative integer");
  }
  return v;
}

double RunConfig::get_double(const std::string& key) const { return parse_double(key, get(key)); }

bool RunConfig::get_bool(const std::string& key) const {
  const std::string t = trim(get(key));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw InvalidArgument("config: key '" + key + "' expects a boolean");
}

std::vector<int> RunConfig::get_int_list(const std::string& key) const {
  std::vector<int> out;
  for (const auto& item : split_list(get(key))) out.push_back(static_cast<int>(parse_integer(key, item)));
  return out;
}

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(key))) out.push_back(parse_double(key, item));
  return out;
}

std::string RunConfig::echo() const {
  std::string text = "command = " + command + "\n";
  for (const auto& [k, v] : values) text += k + " = " + v + "\n";
  return text;
}

std::string RunConfig::hash() const {
  char buf[17];
  RunConfig physics = *this;
  physics.values.erase("out");
  physics.values.erase("jobs");
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(physics.echo())));
  return buf;
}

std::map<std::string, std::string> parse_document(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config: line " + std::to_string(lineno) + " is not 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    if (key.empty()) throw InvalidArgument("config: empty key on line " + std::to_string(lineno));
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig resolve(const std::string& command, const std::map<std::string, std::string>& file_values,
                  const std::map<std::string, std::string>& flag_values) {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    throw InvalidArgument("config: unknown command '" + command + "'");
  }
  RunConfig cfg;
  cfg.command = command;
  for (const auto& k : known_keys()) cfg.values[k.key] = default_for(command, k.key);
  for (const auto* src : {&file_values, &flag_values}) {
    for (const auto& [k, v] : *src) {
      if (k == "command") {
        if (v != command) throw InvalidArgument("config: file is for command '" + v + "'");
        continue;
      }
      if (!is_known(k)) throw InvalidArgument("config: unknown key '" + k + "'");
      cfg.values[k] = v;
    }
  }
  return cfg;
}

RunConfig parse_echo(const std::string& text) {
  auto values = parse_document(text);
  auto it = values.find("command");
  if (it == values.end()) throw InvalidArgument("config: echo has no command");
  const std::string command = it->second;
  values.erase(it);
  return resolve(command, values, {});
}

}  // namespace starnet::config
