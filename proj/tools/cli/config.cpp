// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace vcli {

namespace {

using S = std::optional<std::string>;
const S none = std::nullopt;

std::vector<KeySpec> common_keys() {
  return {
      {"out", Kind::String, "results", "output directory"},
      {"jobs", Kind::Int, "1", "concurrent independent sub-runs (capped by VORTEX_THREADS)"},
      {"seed", Kind::Int, "12345", "seed for randomized iterations"},
      {"emit_plots", Kind::Bool, "false", "write gnuplot scripts next to the CSVs"},
  };
}

std::vector<KeySpec> domain_keys(const char* L) {
  return {{"L", Kind::Real, L, "half-width of the square domain"}, {"h", Kind::Real, "0.1", "lattice spacing"}};
}

std::vector<KeySpec> statics_keys() {
  auto k = domain_keys("12");
  k.push_back({"centers", Kind::Centers, "0,0", "vortex centers x,y;x,y;..."});
  return k;
}

std::vector<KeySpec> reduced_state_keys() {
  return {
      {"metric", Kind::String, none, "reduced metric table (CSV written by `vortex metric`)"},
      {"r", Kind::Real, "3", "initial half-separation"},
      {"theta", Kind::Real, "0", "initial angle"},
      {"p_r", Kind::Real, "-1", "initial radial momentum"},
      {"p_theta", Kind::Real, "0", "initial angular momentum"},
      {"tau_span", Kind::Real, "6", "slow-time span"},
      {"dtau", Kind::Real, "0.001", "slow-time step"},
      {"sample_every", Kind::Int, "10", "rows every this many steps"},
  };
}

std::vector<KeySpec> evolve_keys(const char* L) {
  auto k = statics_keys();
  k[0].fallback = L;
  std::vector<KeySpec> more = {
      {"velocities", Kind::RealList, none, "moduli velocities (x1,y1,x2,y2,...), default zero"},
      {"epsilon", Kind::Real, "0.1", "velocity scale"},
      {"lambda", Kind::Real, "1", "coupling"},
      {"t_end", Kind::Real, "1", "end time"},
      {"sample_dt", Kind::Real, "0.1", "diagnostic sampling interval"},
      {"cfl_fraction", Kind::Real, "0.5", "time step as a fraction of the CFL limit"},
      {"snapshot_every", Kind::Int, "0", "snapshot every this many samples (0: final only)"},
  };
  k.insert(k.end(), more.begin(), more.end());
  return k;
}

std::map<std::string, std::vector<KeySpec>> build_schemas() {
  std::map<std::string, std::vector<KeySpec>> s;
  {
    auto k = statics_keys();
    k.push_back({"mu", Kind::Real, none, "Taubes regularization, must exceed 4N (default 4N + 1)"});
    k.push_back({"tol", Kind::Real, "1e-10", "Newton tolerance on the Taubes residual"});
    k.push_back({"max_iterations", Kind::Int, "50", "Newton step limit"});
    s["solve"] = k;
  }
  s["radial"] = {
      {"n", Kind::Int, "1", "winding"},
      {"r_max", Kind::Real, "20", "outer radius"},
      {"nodes", Kind::Int, "4000", "radial nodes"},
      {"sample_every", Kind::Int, "10", "rows every this many nodes"},
  };
  {
    auto k = statics_keys();
    k.push_back({"relax", Kind::Bool, "true", "Newton-relax the statics before differencing"});
    s["modes"] = k;
    k.push_back({"shift", Kind::Real, "0.01", "spectral shift of the near-kernel iteration"});
    k.push_back({"eig_tol", Kind::Real, "1e-6", "eigenvalue tolerance"});
    s["coercivity"] = k;
  }
  s["metric"] = {
      {"r", Kind::RealList, "0,0.3,0.6,1,1.5,2,3,4,6,8", "half-separations to sample"},
      {"margin", Kind::Real, "7", "box margin around the centers"},
      {"h", Kind::Real, "0.1", "lattice spacing"},
      {"relax", Kind::Bool, "false", "Newton-relax the statics before differencing"},
  };
  s["geodesic"] = reduced_state_keys();
  {
    auto k = reduced_state_keys();
    k.push_back({"l", Kind::Int, "-1", "potential sign: -1 for lambda < 1, +1 for lambda > 1"});
    k.push_back({"epsilon", Kind::Real, "0.1", "label of the slow scale"});
    s["hamiltonian"] = k;
  }
  s["wavemap"] = {
      {"metric", Kind::String, none, "reduced metric table"},
      {"r", Kind::Real, "2", "base half-separation"},
      {"theta", Kind::Real, "0", "base angle"},
      {"amplitude", Kind::Real, "0.2", "bump amplitude of w along zeta"},
      {"velocity", Kind::Real, "0.5", "initial d/dtau of Re w at the bump"},
      {"zeta0", Kind::Real, "-4", "left end"},
      {"zeta1", Kind::Real, "4", "right end"},
      {"nodes", Kind::Int, "161", "zeta nodes"},
      {"tau_span", Kind::Real, "2", "slow-time span"},
      {"dtau", Kind::Real, "0.01", "slow-time step"},
      {"sample_every", Kind::Int, "20", "rows every this many steps"},
  };
  s["evolve2d"] = evolve_keys("12");
  {
    auto k = evolve_keys("8");
    k.push_back({"Lz", Kind::Real, "4", "length along z"});
    k.push_back({"modulation", Kind::Real, "0.5", "velocity profile 1 + m sin(2 pi z / Lz)"});
    s["evolve3d"] = k;
  }
  s["ansatz-residual"] = {
      {"source", Kind::String, "geodesic", "wave map: geodesic, flat or a CSV of tau,zeta,x1,y1,..."},
      {"metric", Kind::String, none, "reduced metric table (geodesic source)"},
      {"centers", Kind::Centers, "0.1,0.05", "base point (flat source)"},
      {"r", Kind::Real, "1.5", "geodesic half-separation"},
      {"theta", Kind::Real, "0.3", "geodesic angle"},
      {"rdot", Kind::Real, "-0.5", "geodesic dr/dtau"},
      {"thetadot", Kind::Real, "0.3", "geodesic dtheta/dtau"},
      {"eps", Kind::RealList, "0.1,0.05", "epsilon values"},
      {"L", Kind::Real, "6", "half-width"},
      {"h", Kind::Real, "0.2", "lattice spacing"},
      {"d", Kind::Real, "0.05", "space-time stencil spacing"},
      {"tau0", Kind::Real, "0.3", "slow time of the centre point"},
      {"zeta0", Kind::Real, "0.4", "slow z of the centre point"},
      {"margin", Kind::Real, "2", "gauge-field cutoff margin"},
      {"psi_tol", Kind::Real, "1e-10", "first-order solve tolerance"},
  };
  s["report"] = {{"dir", Kind::String, "results", "directory scanned for CSVs"}};
  for (auto& [name, keys] : s) {
    auto c = common_keys();
    if (name == "report") c[0].fallback = "report";
    keys.insert(keys.begin(), c.begin(), c.end());
  }
  return s;
}

const std::map<std::string, std::vector<KeySpec>>& schemas() {
  static const auto s = build_schemas();
  return s;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_real(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
  if (!std::isfinite(v)) throw ConfigError("key '" + key + "': value is not finite");
  return v;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::string centers_text(const std::vector<cplx>& c) {
  std::string t;
  for (std::size_t i = 0; i < c.size(); ++i)
    t += (i ? ";" : "") + fmt17(c[i].real()) + "," + fmt17(c[i].imag());
  return t;
}

std::string list_text(const std::vector<double>& v) {
  std::string t;
  for (std::size_t i = 0; i < v.size(); ++i) t += (i ? "," : "") + fmt17(v[i]);
  return t;
}

Value from_text(const KeySpec& k, const std::string& s) {
  Value v;
  v.kind = k.kind;
  switch (k.kind) {
    case Kind::Real:
      v.real = to_real(s, k.key);
      v.text = fmt17(v.real);
      break;
    case Kind::Int: {
      double x = to_real(s, k.key);
      if (x != std::floor(x) || std::abs(x) > 1e15)
        throw ConfigError("key '" + k.key + "': expected an integer, got '" + s + "'");
      v.integer = static_cast<long long>(x);
      v.text = std::to_string(v.integer);
      break;
    }
    case Kind::Bool:
      if (s == "true" || s == "1" || s == "on" || s == "yes") v.boolean = true;
      else if (s == "false" || s == "0" || s == "off" || s == "no") v.boolean = false;
      else throw ConfigError("key '" + k.key + "': expected true or false, got '" + s + "'");
      v.text = v.boolean ? "true" : "false";
      break;
    case Kind::String:
      v.text = s;
      break;
    case Kind::RealList:
      v.list = parse_list(s, k.key);
      v.text = list_text(v.list);
      break;
    case Kind::Centers:
      v.centers = parse_centers(s, k.key);
      v.text = centers_text(v.centers);
      break;
  }
  return v;
}

// TOML node to the textual form accepted by from_text.
std::string toml_text(const KeySpec& k, const toml::node& n) {
  auto mismatch = [&](const char* want) {
    return ConfigError("key '" + k.key + "': type mismatch, expected " + want);
  };
  auto number = [&](const toml::node& x) -> double {
    if (auto i = x.as_integer()) return double(i->get());
    if (auto f = x.as_floating_point()) return f->get();
    throw mismatch("a number");
  };
  if (auto s = n.as_string()) {
    if (k.kind == Kind::String || k.kind == Kind::Centers || k.kind == Kind::RealList) return s->get();
    throw mismatch(k.kind == Kind::Bool ? "a boolean" : "a number");
  }
  switch (k.kind) {
    case Kind::Real:
    case Kind::Int:
      return fmt17(number(n));
    case Kind::Bool:
      if (auto b = n.as_boolean()) return b->get() ? "true" : "false";
      throw mismatch("a boolean");
    case Kind::String:
      throw mismatch("a string");
    case Kind::RealList: {
      auto a = n.as_array();
      if (!a) throw mismatch("an array of numbers");
      std::vector<double> v;
      for (const auto& e : *a) v.push_back(number(e));
      return list_text(v);
    }
    case Kind::Centers: {
      auto a = n.as_array();
      if (!a) throw mismatch("an array of [x, y] pairs");
      std::vector<cplx> c;
      for (const auto& e : *a) {
        auto p = e.as_array();
        if (!p || p->size() != 2) throw mismatch("an array of [x, y] pairs");
        c.emplace_back(number(*p->get(0)), number(*p->get(1)));
      }
      return centers_text(c);
    }
  }
  throw mismatch("a value");
}

const KeySpec* find_key(const std::vector<KeySpec>& keys, const std::string& key) {
  for (const auto& k : keys)
    if (k.key == key) return &k;
  return nullptr;
}

[[noreturn]] void unknown(const std::string& command, const std::string& key) {
  throw ConfigError("unknown key '" + key + "' for command '" + command + "'");
}

}  // namespace

double RunConfig::real(const std::string& key) const { return values.at(key).real; }
int RunConfig::integer(const std::string& key) const { return int(values.at(key).integer); }
bool RunConfig::boolean(const std::string& key) const { return values.at(key).boolean; }
const std::string& RunConfig::text(const std::string& key) const { return values.at(key).text; }
const std::vector<double>& RunConfig::list(const std::string& key) const { return values.at(key).list; }
const std::vector<cplx>& RunConfig::centers(const std::string& key) const { return values.at(key).centers; }

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"solve",    "radial",   "modes",    "coercivity",
                                                 "metric",   "geodesic", "hamiltonian", "wavemap",
                                                 "evolve2d", "evolve3d", "ansatz-residual", "report"};
  return names;
}

const std::vector<KeySpec>& schema(const std::string& command) {
  auto it = schemas().find(command);
  if (it == schemas().end()) throw ConfigError("unknown command '" + command + "'");
  return it->second;
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> v;
  std::string t = s;
  std::replace(t.begin(), t.end(), ';', ',');
  std::stringstream ss(t);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw ConfigError("key '" + key + "': empty list entry in '" + s + "'");
    v.push_back(to_real(tok, key));
  }
  if (v.empty()) throw ConfigError("key '" + key + "': empty list");
  return v;
}

std::vector<cplx> parse_centers(const std::string& s, const std::string& key) {
  std::vector<cplx> c;
  std::string t = trim(s);
  // Pairs are separated by ';' or whitespace, coordinates by ','.
  std::replace(t.begin(), t.end(), ';', ' ');
  std::stringstream ss(t);
  std::string pair;
  while (ss >> pair) {
    auto comma = pair.find(',');
    if (comma == std::string::npos || pair.find(',', comma + 1) != std::string::npos)
      throw ConfigError("key '" + key + "': expected x,y pairs, got '" + pair + "'");
    c.emplace_back(to_real(pair.substr(0, comma), key), to_real(pair.substr(comma + 1), key));
  }
  if (c.empty()) throw ConfigError("key '" + key + "': no centers given");
  return c;
}

RunConfig parse_config(const std::string& command, const std::optional<std::string>& toml_path,
                       const std::map<std::string, std::string>& flags) {
  const auto& keys = schema(command);
  RunConfig cfg;
  cfg.command = command;
  for (const auto& k : keys) {
    if (!k.fallback) continue;
    cfg.values[k.key] = from_text(k, *k.fallback);
    cfg.source[k.key] = "default";
  }
  if (toml_path) {
    if (!std::filesystem::is_regular_file(*toml_path))
      throw ConfigError("key 'config': cannot read '" + *toml_path + "'");
    toml::table tbl;
    try {
      tbl = toml::parse_file(*toml_path);
    } catch (const toml::parse_error& e) {
      throw ConfigError("key 'config': " + std::string(e.description()));
    }
    auto apply = [&](const toml::table& t, bool top) {
      for (const auto& [name, node] : t) {
        std::string key(name.str());
        if (top && node.is_table()) {
          if (std::find(command_names().begin(), command_names().end(), key) == command_names().end())
            unknown(command, key);
          continue;  // sections are handled below
        }
        const KeySpec* k = find_key(keys, key);
        if (!k) unknown(command, key);
        cfg.values[key] = from_text(*k, toml_text(*k, node));
        cfg.source[key] = "file";
      }
    };
    apply(tbl, true);
    if (auto sec = tbl[command].as_table()) apply(*sec, false);
  }
  for (const auto& [key, text] : flags) {
    const KeySpec* k = find_key(keys, key);
    if (!k) unknown(command, key);
    cfg.values[key] = from_text(*k, text);
    cfg.source[key] = "flag";
  }
  // Derived default: mu = 4N + 1.
  if (command == "solve" && !cfg.has("mu")) {
    double N = double(cfg.centers("centers").size());
    cfg.values["mu"] = from_text(*find_key(keys, "mu"), fmt17(4.0 * N + 1.0));
    cfg.source["mu"] = "default";
  }
  validate(cfg);
  return cfg;
}

void validate(const RunConfig& cfg) {
  auto need = [&](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("key '" + key + "': " + what);
  };
  auto positive = [&](const std::string& key) {
    if (cfg.has(key)) need(cfg.real(key) > 0.0, key, "must be positive");
  };
  auto positive_int = [&](const std::string& key) {
    if (cfg.has(key)) need(cfg.integer(key) >= 1, key, "must be at least 1");
  };
  const std::string& c = cfg.command;
  for (const char* k : {"L", "h", "tol", "r_max", "margin", "dtau", "t_end", "sample_dt", "cfl_fraction",
                        "epsilon", "lambda", "Lz", "d", "psi_tol", "shift", "eig_tol", "r"})
    if (cfg.has(k) && cfg.values.at(k).kind == Kind::Real) positive(k);
  for (const char* k : {"jobs", "max_iterations", "n", "nodes", "sample_every"}) positive_int(k);
  need(cfg.text("out").size() > 0, "out", "must not be empty");
  if (cfg.has("snapshot_every")) need(cfg.integer("snapshot_every") >= 0, "snapshot_every", "must be >= 0");
  if (cfg.has("cfl_fraction")) need(cfg.real("cfl_fraction") <= 1.0, "cfl_fraction", "must not exceed 1");
  if (cfg.has("L") && cfg.has("h")) {
    double m = 2.0 * cfg.real("L") / cfg.real("h");
    need(std::abs(m - std::round(m)) < 1e-9 * std::max(1.0, m), "h", "2L/h must be an integer");
    need(m >= 8, "h", "needs at least 8 cells across the domain");
  }
  if (cfg.has("centers") && (c == "solve" || c == "modes" || c == "coercivity" || c == "evolve2d" ||
                             c == "evolve3d")) {
    double L = cfg.real("L");
    for (const auto& z : cfg.centers("centers"))
      need(std::abs(z.real()) <= L - 2.0 && std::abs(z.imag()) <= L - 2.0, "centers",
           "every center must lie at least 2 from the boundary");
  }
  if (c == "solve") {
    double N = double(cfg.centers("centers").size());
    need(cfg.real("mu") > 4.0 * N, "mu", "must satisfy mu > 4N (N = " + std::to_string(int(N)) + ")");
  }
  if (cfg.has("velocities"))
    need(cfg.list("velocities").size() == 2 * cfg.centers("centers").size(), "velocities",
         "needs two entries per center");
  if (c == "metric") {
    const auto& r = cfg.list("r");
    for (std::size_t i = 0; i < r.size(); ++i) {
      need(r[i] >= 0.0, "r", "samples must be non-negative");
      if (i) need(r[i] > r[i - 1], "r", "samples must be strictly increasing");
    }
  }
  if (c == "geodesic" || c == "hamiltonian" || c == "wavemap" ||
      (c == "ansatz-residual" && cfg.text("source") == "geodesic")) {
    need(cfg.has("metric"), "metric", "required (write one with `vortex metric`)");
    need(std::filesystem::is_regular_file(cfg.text("metric")), "metric",
         "cannot read '" + cfg.text("metric") + "'");
  }
  if (c == "geodesic" || c == "hamiltonian") positive("tau_span");
  if (c == "hamiltonian") need(cfg.integer("l") == 1 || cfg.integer("l") == -1, "l", "must be -1 or +1");
  if (c == "wavemap") {
    need(cfg.real("zeta1") > cfg.real("zeta0"), "zeta1", "must exceed zeta0");
    need(cfg.integer("nodes") >= 5, "nodes", "must be at least 5");
    positive("tau_span");
  }
  if (c == "ansatz-residual") {
    const std::string& s = cfg.text("source");
    need(s == "geodesic" || s == "flat" || std::filesystem::is_regular_file(s), "source",
         "must be geodesic, flat or a readable CSV file");
    for (double e : cfg.list("eps")) need(e > 0.0, "eps", "entries must be positive");
    need(cfg.real("d") <= 1.0, "d", "must not exceed 1");
    for (double e : cfg.list("eps")) need(e * cfg.real("d") >= 1e-4, "d", "eps * d must be at least 1e-4");
  }
  if (c == "radial") need(cfg.integer("nodes") >= 10, "nodes", "must be at least 10");
  if (c == "report") need(std::filesystem::is_directory(cfg.text("dir")), "dir",
                          "'" + cfg.text("dir") + "' is not a directory");
}

}  // namespace vcli
