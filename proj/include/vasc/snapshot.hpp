#pragma once

// Binary field snapshots, little-endian throughout:
//   "VASW" | version u32 | dim u32 | n u32 | L f64 | t f64 | field count u32
//   | per field: name length u32, name bytes | field data f64[n^dim] x-fastest

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vasc/grid.hpp"
#include "vasc/solver.hpp"

namespace vasc {

inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
  Grid grid{};
  double t = 0.0;
  std::vector<std::string> names;
  std::vector<RealField> fields;
};

class SnapshotError : public std::runtime_error {
 public:
  SnapshotError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

std::vector<std::uint8_t> encode_snapshot(const Snapshot& s);
/// Throws SnapshotError carrying the offset of the first malformed byte.
Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes);

void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);

/// rho, u_x.., phi of a field state.
Snapshot snapshot_of(const FieldState& s);
FieldState state_of(const Snapshot& s);

}  // namespace vasc
