#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "vasc/snapshot.hpp"
#include "vasc/solver.hpp"

using namespace vasc;

namespace {
Snapshot sample() {
  const ModelParams p = canonical_params();
  InitFamily fam;
  fam.rho = {0.1, 1.0, std::nullopt};
  fam.u[0] = {0.05, 1.0, std::nullopt};
  FieldState s = init_data(Grid{2, 16, 8.0}, p, make_equilibrium(p, 1.0), fam);
  s.t = 3.5;
  return snapshot_of(s);
}

std::uint64_t offset_of(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_snapshot(bytes);
  } catch (const SnapshotError& e) {
    return e.offset();
  }
  return ~0ull;
}
}  // namespace

TEST_CASE("encode/decode is the identity") {
  const Snapshot s = sample();
  CHECK(s.names == std::vector<std::string>{"rho", "u_x", "u_y", "phi"});
  const Snapshot back = decode_snapshot(encode_snapshot(s));
  CHECK(back.t == s.t);
  CHECK(back.grid.n == 16);
  CHECK(back.grid.dim == 2);
  CHECK(back.names == s.names);
  CHECK(back.fields == s.fields);
  CHECK(encode_snapshot(back) == encode_snapshot(s));
}

TEST_CASE("file round trip and state reconstruction") {
  const Snapshot s = sample();
  const auto path = std::filesystem::temp_directory_path() / "vasc_unit_snapshot.vasw";
  write_snapshot(path.string(), s);
  const FieldState st = state_of(read_snapshot(path.string()));
  std::filesystem::remove(path);
  CHECK(st.t == 3.5);
  CHECK(st.rho == s.fields[0]);
  CHECK(st.u[1] == s.fields[2]);
}

TEST_CASE("malformed input reports the byte offset") {
  const auto good = encode_snapshot(sample());
  auto bad = good;
  bad[0] = 'X';
  CHECK(offset_of(bad) == 0);
  bad = good;
  bad[4] = 99;  // version follows the 4-byte magic
  CHECK(offset_of(bad) == 4);
  bad = good;
  bad.resize(good.size() - 3);
  CHECK(offset_of(bad) > 4);
  CHECK(offset_of(bad) < good.size());
  bad = good;
  bad.push_back(0);
  CHECK(offset_of(bad) == good.size());
  CHECK_THROWS(read_snapshot("/nonexistent/snapshot.vasw"));
}
