#pragma once

// Flat key = value run configuration shared by the CLI and the Python module.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace starnet::config {

inline const std::vector<std::string> kCommands = {"spectrum", "wstate", "evolve", "scan", "sweep",
                                                   "fit",      "disorder", "loss", "gradient"};

struct KeyInfo {
  std::string key;
  std::string default_value;
  std::string help;
};

/// Every recognised key with its default; the defaults are the reference
/// parameters of the NV/N-chain architecture.
const std::vector<KeyInfo>& known_keys();

/// Default that depends on the command (length lists for sweeps and fits).
std::string default_for(const std::string& command, const std::string& key);

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> values;  // fully resolved, one entry per known key

  // Typed accessors. Throw InvalidArgument on malformed values.
  std::string get(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  /// Canonical `key = value` text, sorted by key, command first.
  std::string echo() const;
  /// FNV-1a of `echo()` without `out` and `jobs`, as 16 hex digits.
  std::string hash() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses a flat config document: `key = value` lines, `#` comments.
std::map<std::string, std::string> parse_document(const std::string& text);

/// Builds a RunConfig from file values overridden by flag values. Unknown
/// keys and unknown commands are rejected.
RunConfig resolve(const std::string& command, const std::map<std::string, std::string>& file_values,
                  const std::map<std::string, std::string>& flag_values);

/// Parses the output of `echo()`.
RunConfig parse_echo(const std::string& text);

}  // namespace starnet::config
