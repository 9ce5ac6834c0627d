#include "vasc/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "vasc/errors.hpp"

namespace vasc {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

constexpr char kMagic[4] = {'V', 'A', 'S', 'W'};
constexpr std::uint32_t kMaxNameLength = 256;

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}

  template <class T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  void need(std::size_t n, const char* what) const {
    if (b_.size() - pos_ < n)
      throw SnapshotError(std::string("snapshot: truncated while reading ") + what, pos_);
  }

  const std::uint8_t* here() const { return b_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }
  std::size_t pos() const { return pos_; }
  std::size_t size() const { return b_.size(); }

 private:
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const Snapshot& s) {
  s.grid.validate();
  if (s.names.size() != s.fields.size())
    throw DomainError("snapshot: names and fields differ in count");
  const std::size_t nr = s.grid.real_size();
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.n));
  put<double>(out, s.grid.length);
  put<double>(out, s.t);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.fields.size()));
  for (const auto& name : s.names) {
    if (name.empty() || name.size() > kMaxNameLength)
      throw DomainError("snapshot: field name length out of range");
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
  }
  for (const auto& f : s.fields) {
    if (f.size() != nr) throw DomainError("snapshot: field size does not match the grid");
    const auto* p = reinterpret_cast<const std::uint8_t*>(f.data());
    out.insert(out.end(), p, p + nr * sizeof(double));
  }
  return out;
}

Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.need(4, "magic");
  if (std::memcmp(r.here(), kMagic, 4) != 0) throw SnapshotError("snapshot: bad magic", 0);
  r.skip(4);
  std::size_t at = r.pos();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kSnapshotVersion) throw SnapshotError("snapshot: unsupported version", at);
  Snapshot s;
  at = r.pos();
  s.grid.dim = static_cast<int>(r.get<std::uint32_t>("dim"));
  if (s.grid.dim < 1 || s.grid.dim > 3) throw SnapshotError("snapshot: invalid dim", at);
  at = r.pos();
  s.grid.n = static_cast<int>(r.get<std::uint32_t>("n"));
  if (s.grid.n < 16 || (s.grid.n & (s.grid.n - 1)) != 0 || s.grid.n > (1 << 16))
    throw SnapshotError("snapshot: invalid n", at);
  at = r.pos();
  s.grid.length = r.get<double>("L");
  if (!(s.grid.length > 0.0) || !std::isfinite(s.grid.length))
    throw SnapshotError("snapshot: invalid box length", at);
  at = r.pos();
  s.t = r.get<double>("t");
  if (!std::isfinite(s.t)) throw SnapshotError("snapshot: invalid time", at);
  at = r.pos();
  const auto count = r.get<std::uint32_t>("field count");
  if (count > 64) throw SnapshotError("snapshot: implausible field count", at);
  for (std::uint32_t i = 0; i < count; ++i) {
    at = r.pos();
    const auto len = r.get<std::uint32_t>("name length");
    if (len == 0 || len > kMaxNameLength) throw SnapshotError("snapshot: invalid name length", at);
    r.need(len, "field name");
    s.names.emplace_back(reinterpret_cast<const char*>(r.here()), len);
    r.skip(len);
  }
  const std::size_t nr = s.grid.real_size();
  for (std::uint32_t i = 0; i < count; ++i) {
    r.need(nr * sizeof(double), "field data");
    RealField f(nr);
    std::memcpy(f.data(), r.here(), nr * sizeof(double));
    r.skip(nr * sizeof(double));
    s.fields.push_back(std::move(f));
  }
  if (r.pos() != r.size()) throw SnapshotError("snapshot: trailing bytes", r.pos());
  return s;
}

void write_snapshot(const std::string& path, const Snapshot& s) {
  const auto bytes = encode_snapshot(s);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

Snapshot snapshot_of(const FieldState& s) {
  static const char* unames[3] = {"u_x", "u_y", "u_z"};
  Snapshot out;
  out.grid = s.grid;
  out.t = s.t;
  out.names.push_back("rho");
  out.fields.push_back(s.rho);
  for (int j = 0; j < s.grid.dim; ++j) {
    out.names.push_back(unames[j]);
    out.fields.push_back(s.u[j]);
  }
  out.names.push_back("phi");
  out.fields.push_back(s.phi);
  return out;
}

FieldState state_of(const Snapshot& s) {
  static const char* unames[3] = {"u_x", "u_y", "u_z"};
  FieldState out;
  out.grid = s.grid;
  out.t = s.t;
  auto find = [&](const std::string& name) -> const RealField& {
    for (std::size_t i = 0; i < s.names.size(); ++i)
      if (s.names[i] == name) return s.fields[i];
    throw DomainError("snapshot: missing field " + name);
  };
  out.rho = find("rho");
  out.phi = find("phi");
  for (int j = 0; j < s.grid.dim; ++j) out.u[j] = find(unames[j]);
  return out;
}

}  // namespace vasc
