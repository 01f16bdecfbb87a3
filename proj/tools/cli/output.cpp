// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "output.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vcli {

namespace fs = std::filesystem;

namespace {

struct Hasher {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};
  Hasher() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init");
  }
  void update(const void* p, std::size_t n) {
    if (EVP_DigestUpdate(ctx.get(), p, n) != 1) throw std::runtime_error("sha256 update");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) throw std::runtime_error("sha256 final");
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
      s += digits[md[i] >> 4];
      s += digits[md[i] & 15];
    }
    return s;
  }
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Hasher h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  Hasher h;
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof buf);
    h.update(buf, std::size_t(f.gcount()));
  }
  return h.hex();
}

std::string config_hash(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["command"] = cfg.command;
  for (const auto& [k, v] : cfg.values)
    if (k != "out" && k != "jobs") j[k] = v.text;
  return sha256_hex(j.dump());
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Run::Run(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.text("out")), start_(std::chrono::steady_clock::now()) {
  fs::create_directories(dir_);
}

std::string Run::provenance() const {
  return std::string("vortexlab ") + kVersion + " command=" + cfg_.command + " config_sha256=" + config_hash(cfg_);
}

void Run::add_file(const std::string& name) {
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

int Run::jobs() const {
  int j = cfg_.integer("jobs");
  if (const char* env = std::getenv("VORTEX_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) j = std::min(j, cap);
  }
  return std::max(j, 1);
}

void Run::plot_script(const std::string& csv, const std::string& title) {
  std::string name = fs::path(csv).replace_extension(".gp").string();
  std::ofstream f(path(name));
  if (!f) throw std::runtime_error("cannot write " + path(name).string());
  f << "# " << provenance() << "\n"
    << "set datafile separator ','\n"
    << "set datafile commentschars '#'\n"
    << "set key autotitle columnhead\n"
    << "set title '" << title << "'\n"
    << "set terminal pngcairo size 900,600\n"
    << "set output '" << fs::path(csv).replace_extension(".png").string() << "'\n"
    << "stats '" << csv << "' nooutput\n"
    << "plot for [i=2:STATS_columns] '" << csv << "' using 1:i with linespoints\n";
  add_file(name);
}

void Run::finish(const std::string& status, int exit_code, const std::string& error) {
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::ordered_json m;
  m["artifact"] = "vortexlab";
  m["version"] = kVersion;
  m["command"] = cfg_.command;
  m["status"] = status;
  m["exit_code"] = exit_code;
  if (!error.empty()) m["error"] = error;
  m["config_sha256"] = config_hash(cfg_);
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg_.values) c[k] = {{"value", v.text}, {"source", cfg_.source.at(k)}};
  m["config"] = c;
  m["wall_seconds"] = wall;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& name : files_) {
    fs::path p = path(name);
    if (!fs::exists(p)) continue;
    files.push_back({{"path", name}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
  }
  m["files"] = files;
  fs::path tmp = path("manifest.json.tmp");
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << m.dump(2) << "\n";
    if (!f) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path("manifest.json"));
}

CsvWriter::CsvWriter(Run& run, const std::string& name, const std::vector<std::string>& columns)
    : run_(run), name_(name), columns_(columns.size()), f_(run.path(name), std::ios::trunc) {
  if (!f_) throw std::runtime_error("cannot write " + run.path(name).string());
  run_.add_file(name_);
  f_ << "# " << run_.provenance() << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) f_ << (i ? "," : "") << columns[i];
  f_ << "\n";
}

CsvWriter::~CsvWriter() {
  if (open_) f_.close();
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("CSV row width mismatch in " + name_);
  for (std::size_t i = 0; i < values.size(); ++i) f_ << (i ? "," : "") << format_number(values[i]);
  f_ << "\n";
  f_.flush();
}

void CsvWriter::close() {
  if (!open_) return;
  f_.close();
  open_ = false;
  if (f_.fail()) throw std::runtime_error("write failed: " + name_);
}

}  // namespace vcli
