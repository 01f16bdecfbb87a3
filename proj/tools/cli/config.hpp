// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcli {

using cplx = std::complex<double>;

// Validation failure; the message names the offending key. Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { Real, Int, Bool, String, RealList, Centers };

struct KeySpec {
  std::string key;
  Kind kind;
  std::optional<std::string> fallback;  // textual default; none means optional
  std::string help;
};

struct Value {
  Kind kind = Kind::String;
  double real = 0.0;
  long long integer = 0;
  bool boolean = false;
  std::string text;  // canonical textual form
  std::vector<double> list;
  std::vector<cplx> centers;
};

struct RunConfig {
  std::string command;
  std::map<std::string, Value> values;
  std::map<std::string, std::string> source;  // "default", "file" or "flag"

  bool has(const std::string& key) const { return values.count(key) > 0; }
  double real(const std::string& key) const;
  int integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  const std::vector<double>& list(const std::string& key) const;
  const std::vector<cplx>& centers(const std::string& key) const;
};

const std::vector<std::string>& command_names();
// Keys accepted by `command`, common keys included.
const std::vector<KeySpec>& schema(const std::string& command);

// Parses "x,y;x,y" (or "x,y x,y") into centers and "a,b,c" into reals.
std::vector<cplx> parse_centers(const std::string& s, const std::string& key);
std::vector<double> parse_list(const std::string& s, const std::string& key);

// Defaults, then the TOML file (top level or a [command] table), then flags.
// Unknown keys and type mismatches throw ConfigError; so do constraint violations.
RunConfig parse_config(const std::string& command, const std::optional<std::string>& toml_path,
                       const std::map<std::string, std::string>& flags);
void validate(const RunConfig& cfg);

}  // namespace vcli
