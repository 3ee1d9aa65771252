#include "ibnls/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ibnls/error.hpp"

namespace ibnls {

namespace {

constexpr char kMagic[7] = {'I', 'B', 'N', 'L', 'S', '1', '\0'};

template <typename U>
void put_le(std::ostream& os, U v) {
  unsigned char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), sizeof b);
}

void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }

template <typename U>
U get_le(std::istream& is) {
  unsigned char b[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof b))
    throw Error(ErrorKind::IoError, "checkpoint truncated");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

}  // namespace

void write_checkpoint(const std::string& path, const ComplexField& u, double t, double dt) {
  ComplexField phys = u.space() == Space::Physical ? u : inverse_transform(u);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  os.write(kMagic, sizeof kMagic);
  const auto& g = phys.grid();
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.dimension()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.points()));
  put_f64(os, g.half_width());
  put_f64(os, t);
  put_f64(os, dt);
  for (const auto& z : phys.values()) {
    put_f64(os, z.real());
    put_f64(os, z.imag());
  }
  if (!os) throw Error(ErrorKind::IoError, "write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::IoError, "cannot open " + path);
  char magic[sizeof kMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw Error(ErrorKind::IoError, path + " is not a checkpoint");
  Checkpoint c;
  c.grid.dimension = static_cast<int>(get_le<std::uint32_t>(is));
  c.grid.points = static_cast<int>(get_le<std::uint32_t>(is));
  c.grid.half_width = get_f64(is);
  c.t = get_f64(is);
  c.dt = get_f64(is);
  if (c.grid.dimension < 1 || c.grid.dimension > 3 || c.grid.points < 1 || c.grid.points > (1 << 16))
    throw Error(ErrorKind::IoError, path + " has an implausible header");
  std::size_t n = 1;
  for (int d = 0; d < c.grid.dimension; ++d) n *= static_cast<std::size_t>(c.grid.points);
  c.values.resize(n);
  for (auto& z : c.values) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    z = {re, im};
  }
  return c;
}

}  // namespace ibnls
