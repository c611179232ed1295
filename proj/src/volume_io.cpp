#include "orient/volume_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "orient/errors.hpp"

namespace orient {

namespace {

constexpr std::array<char, 4> kMagic{'O', 'B', 'V', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_obv(const VolumeGrid& v, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FileError("cannot open '" + path.string() + "' for writing");
  const auto n = static_cast<std::uint32_t>(v.n());
  os.write(kMagic.data(), 4);
  put_u32(os, n);
  put_u32(os, 0);
  put_u32(os, static_cast<std::uint32_t>(v.size() * 4));
  for (double x : v.data()) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(x));
    put_u32(os, bits);
  }
  if (!os) throw FileError("write failed for '" + path.string() + "'");
}

VolumeGrid read_obv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FileError("cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16) throw FileError("'" + path.string() + "': truncated OBV1 header");
  if (std::memcmp(bytes.data(), kMagic.data(), 4) != 0) throw FileError("'" + path.string() + "': bad magic");
  const std::uint64_t n = get_u32(bytes.data() + 4);
  const std::uint32_t reserved = get_u32(bytes.data() + 8);
  const std::uint64_t payload = get_u32(bytes.data() + 12);
  if (reserved != 0) throw FileError("'" + path.string() + "': reserved field is nonzero");
  if (n < 2) throw FileError("'" + path.string() + "': edge length below 2");
  if (payload != n * n * n * 4 || bytes.size() != 16 + payload) {
    throw FileError("'" + path.string() + "': payload length does not match header");
  }
  std::vector<double> data(n * n * n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const float f = std::bit_cast<float>(get_u32(bytes.data() + 16 + 4 * i));
    if (!std::isfinite(f)) throw FileError("'" + path.string() + "': non-finite voxel value");
    data[i] = f;
  }
  return VolumeGrid(n, std::move(data));
}

}  // namespace orient
