// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "config.hpp"

namespace vcli {

inline constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& p);
// Hash of the resolved values (sources, `out` and `jobs` excluded), so reruns agree byte for byte.
std::string config_hash(const RunConfig& cfg);
std::string format_number(double x);  // %.17g

// Artifacts of one run: every file goes through here and ends up in the manifest.
class Run {
 public:
  explicit Run(const RunConfig& cfg);
  const RunConfig& config() const { return cfg_; }
  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  // "# vortexlab <version> command=<c> config_sha256=<hash>"
  std::string provenance() const;
  // Registers a file written by other code (snapshots, metric tables).
  void add_file(const std::string& name);
  // Gnuplot script plotting columns 2.. of a CSV against column 1.
  void plot_script(const std::string& csv, const std::string& title);
  // Writes manifest.json via a temporary file and a rename.
  void finish(const std::string& status, int exit_code, const std::string& error = "");
  int jobs() const;

 private:
  RunConfig cfg_;
  std::filesystem::path dir_;
  std::vector<std::string> files_;
  std::chrono::steady_clock::time_point start_;
};

class CsvWriter {
 public:
  CsvWriter(Run& run, const std::string& name, const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;
  void row(const std::vector<double>& values);
  void close();

 private:
  Run& run_;
  std::string name_;
  std::size_t columns_;
  std::ofstream f_;
  bool open_ = true;
};

}  // namespace vcli
