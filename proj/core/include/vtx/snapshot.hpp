// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vtx/grid.hpp"

namespace vtx {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedField {
  std::string name;
  std::variant<ScalarField, ComplexField> field;
};

struct Snapshot {
  Grid grid;
  std::vector<NamedField> fields;

  const ScalarField& real(const std::string& name) const;
  const ComplexField& complex(const std::string& name) const;
};

// Layout: "VORTEXF1", u32 LE header length, JSON header, then float64 LE
// samples for each field in header order (complex interleaved re, im).
void write_snapshot(const std::string& path, const std::vector<NamedField>& fields);
Snapshot read_snapshot(const std::string& path);

}  // namespace vtx
