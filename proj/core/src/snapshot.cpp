// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include "vtx/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>

namespace vtx {

namespace {

constexpr char kMagic[8] = {'V', 'O', 'R', 'T', 'E', 'X', 'F', '1'};

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes a little-endian host");

const Grid& grid_of(const NamedField& f) {
  return std::visit([](const auto& x) -> const Grid& { return x.grid; }, f.field);
}

}  // namespace

const ScalarField& Snapshot::real(const std::string& name) const {
  for (const auto& f : fields)
    if (f.name == name && std::holds_alternative<ScalarField>(f.field)) return std::get<ScalarField>(f.field);
  throw SnapshotError("snapshot has no real field '" + name + "'");
}

const ComplexField& Snapshot::complex(const std::string& name) const {
  for (const auto& f : fields)
    if (f.name == name && std::holds_alternative<ComplexField>(f.field)) return std::get<ComplexField>(f.field);
  throw SnapshotError("snapshot has no complex field '" + name + "'");
}

void write_snapshot(const std::string& path, const std::vector<NamedField>& fields) {
  if (fields.empty()) throw SnapshotError("no fields to write");
  const Grid& g = grid_of(fields.front());
  nlohmann::json hdr;
  hdr["version"] = 1;
  std::vector<int> dims(g.n.begin(), g.n.begin() + g.dim);
  std::vector<double> sp(g.h.begin(), g.h.begin() + g.dim);
  std::vector<double> org(g.origin.begin(), g.origin.begin() + g.dim);
  hdr["grid"] = {{"dims", dims}, {"spacing", sp}, {"origin", org}};
  hdr["fields"] = nlohmann::json::array();
  for (const auto& f : fields) {
    require_same_grid(g, grid_of(f), "write_snapshot");
    bool cx = std::holds_alternative<ComplexField>(f.field);
    hdr["fields"].push_back({{"name", f.name}, {"kind", cx ? "complex" : "real"}});
  }
  std::string text = hdr.dump();
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError("cannot open " + tmp + " for writing");
    out.write(kMagic, 8);
    std::uint32_t len = std::uint32_t(text.size());
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(text.data(), std::streamsize(text.size()));
    for (const auto& f : fields) {
      if (auto* s = std::get_if<ScalarField>(&f.field))
        out.write(reinterpret_cast<const char*>(s->v.data()), std::streamsize(s->v.size() * sizeof(double)));
      else {
        const auto& c = std::get<ComplexField>(f.field);
        out.write(reinterpret_cast<const char*>(c.v.data()), std::streamsize(c.v.size() * sizeof(cplx)));
      }
    }
    if (!out) throw SnapshotError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open " + path);
  in.seekg(0, std::ios::end);
  std::uint64_t total = std::uint64_t(in.tellg());
  in.seekg(0);
  if (total < 12) throw SnapshotError("truncated snapshot: missing preamble");
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) throw SnapshotError("bad snapshot magic");
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 4);
  if (12 + std::uint64_t(len) > total) throw SnapshotError("truncated snapshot: header length exceeds file");
  std::string text(len, '\0');
  in.read(text.data(), len);
  nlohmann::json hdr;
  try {
    hdr = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw SnapshotError(std::string("malformed snapshot header: ") + e.what());
  }
  if (hdr.value("version", 0) != 1) throw SnapshotError("unsupported snapshot version");
  Snapshot snap;
  try {
    snap.grid = Grid(hdr["grid"]["dims"].get<std::vector<int>>(), hdr["grid"]["spacing"].get<std::vector<double>>(),
                     hdr["grid"]["origin"].get<std::vector<double>>());
  } catch (const GridError& e) {
    throw SnapshotError(std::string("invalid grid in snapshot header: ") + e.what());
  }
  std::uint64_t expected = 0;
  for (const auto& f : hdr["fields"]) {
    std::string kind = f.at("kind").get<std::string>();
    if (kind != "real" && kind != "complex") throw SnapshotError("unknown field kind " + kind);
    expected += snap.grid.size() * (kind == "complex" ? 2 : 1) * 8;
  }
  std::uint64_t payload = total - 12 - len;
  if (payload != expected)
    throw SnapshotError("snapshot payload length " + std::to_string(payload) + " disagrees with header (" +
                        std::to_string(expected) + ")");
  for (const auto& f : hdr["fields"]) {
    NamedField nf;
    nf.name = f.at("name").get<std::string>();
    if (f.at("kind") == "complex") {
      ComplexField c(snap.grid);
      in.read(reinterpret_cast<char*>(c.v.data()), std::streamsize(c.v.size() * sizeof(cplx)));
      nf.field = std::move(c);
    } else {
      ScalarField s(snap.grid);
      in.read(reinterpret_cast<char*>(s.v.data()), std::streamsize(s.v.size() * sizeof(double)));
      nf.field = std::move(s);
    }
    if (!in) throw SnapshotError("truncated snapshot payload");
    snap.fields.push_back(std::move(nf));
  }
  return snap;
}

}  // namespace vtx
