#pragma once

// TNSR binary container.
//
//   bytes 0..3   magic "TNSR"
//   u16          format version (1)
//   u16          order N
//   N x u64      shape I_1 .. I_N
//   prod(I) x f64 entries, mode-1 fastest
//
// All integers and floats little-endian. A Tucker model file is a sequence of
// N + 1 records in the same layout: the core, then factor matrices U_1 .. U_N
// as order-2 records (I_n, R_n), column-major.

#include "tucker_ra/tensor.hpp"
#include "tucker_ra/tucker_model.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace tucker_ra {

inline constexpr std::array<char, 4> kTnsrMagic{'T', 'N', 'S', 'R'};
inline constexpr std::uint16_t kTnsrVersion = 1;

class TnsrFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
void write_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw TnsrFormatError("TNSR: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace detail

inline void write_tnsr(std::ostream& os, const DenseTensor& t) {
  os.write(kTnsrMagic.data(), kTnsrMagic.size());
  detail::write_le<std::uint16_t>(os, kTnsrVersion);
  detail::write_le<std::uint16_t>(os, static_cast<std::uint16_t>(t.order()));
  for (std::size_t d : t.shape()) detail::write_le<std::uint64_t>(os, d);
  for (double v : t.data()) detail::write_le<double>(os, v);
  if (!os) throw std::runtime_error("TNSR: write failed");
}

inline DenseTensor read_tnsr(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size())) throw TnsrFormatError("TNSR: file too short for header");
  if (magic != kTnsrMagic) throw TnsrFormatError("TNSR: bad magic bytes");
  const auto version = detail::read_le<std::uint16_t>(is);
  if (version != kTnsrVersion) throw TnsrFormatError("TNSR: unsupported version " + std::to_string(version));
  const auto order = detail::read_le<std::uint16_t>(is);
  if (order == 0) throw TnsrFormatError("TNSR: order must be at least 1");
  Shape shape(order);
  std::size_t numel = 1;
  for (auto& d : shape) {
    d = detail::read_le<std::uint64_t>(is);
    if (d == 0) throw TnsrFormatError("TNSR: zero-length mode");
    if (numel > (std::size_t{1} << 40) / d) throw TnsrFormatError("TNSR: shape too large");
    numel *= d;
  }
  // Grow as we read so a corrupt header cannot force a huge allocation.
  std::vector<double> data;
  data.reserve(std::min<std::size_t>(numel, std::size_t{1} << 20));
  for (std::size_t i = 0; i < numel; ++i) data.push_back(detail::read_le<double>(is));
  try {
    return DenseTensor(std::move(shape), std::move(data));
  } catch (const std::invalid_argument& e) {
    throw TnsrFormatError(std::string("TNSR: ") + e.what());
  }
}

inline void save_tensor(const std::string& path, const DenseTensor& t) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_tnsr(os, t);
}

inline DenseTensor load_tensor(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_tnsr(is);
}

inline DenseTensor matrix_record(const Matrix& m) {
  return DenseTensor({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                     std::vector<double>(m.data(), m.data() + m.size()));
}

inline void save_model(const std::string& path, const TuckerModel& model) {
  model.validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_tnsr(os, model.core);
  for (const auto& f : model.factors) write_tnsr(os, matrix_record(f));
}

inline TuckerModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  TuckerModel model;
  model.core = read_tnsr(is);
  for (std::size_t n = 0; n < model.core.order(); ++n) {
    const DenseTensor rec = read_tnsr(is);
    if (rec.order() != 2) throw TnsrFormatError("TNSR model: factor record must be order 2");
    model.factors.push_back(Eigen::Map<const Matrix>(rec.data().data(), static_cast<Eigen::Index>(rec.dim(0)),
                                                     static_cast<Eigen::Index>(rec.dim(1))));
  }
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw TnsrFormatError(std::string("TNSR model: ") + e.what());
  }
  return model;
}

}  // namespace tucker_ra
