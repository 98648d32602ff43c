#pragma once

// SSTF binary tensor files.
//
//   offset  size        field
//   0       4           magic "SSTF"
//   4       2           version (u16, = 1)
//   6       2           dtype   (u16, 1 = float32)
//   8       4           ndim    (u32)
//   12      8 * ndim    dimensions (u64 each)
//   ...     4 * prod    payload, row-major
//
// All integers and samples are little-endian regardless of host order.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "styleshift/error.hpp"
#include "styleshift/tensor.hpp"

namespace styleshift {

inline constexpr std::array<char, 4> kTensorMagic = {'S', 'S', 'T', 'F'};
inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::uint16_t kDtypeFloat32 = 1;

/// Any-rank view of an SSTF file.
struct RawTensor {
  std::vector<std::uint64_t> dims;
  std::vector<float> values;
};

namespace detail {

template <class T>
void put_le(std::vector<unsigned char>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>(value >> (8 * i)));
}

template <class T>
T get_le(std::span<const unsigned char> in, std::size_t offset) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(in[offset + i]) << (8 * i));
  return v;
}

inline std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::io, "read failed for " + path.string());
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

}  // namespace detail

inline std::vector<unsigned char> encode_tensor(std::span<const std::uint64_t> dims, std::span<const float> values) {
  std::vector<unsigned char> out;
  out.reserve(12 + 8 * dims.size() + 4 * values.size());
  out.insert(out.end(), kTensorMagic.begin(), kTensorMagic.end());
  detail::put_le<std::uint16_t>(out, kTensorVersion);
  detail::put_le<std::uint16_t>(out, kDtypeFloat32);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dims.size()));
  for (auto d : dims) detail::put_le<std::uint64_t>(out, d);
  for (float v : values) detail::put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

inline RawTensor decode_tensor(std::span<const unsigned char> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kTensorMagic.data(), 4) != 0) {
    throw Error(ErrorCode::bad_magic, "not an SSTF tensor file");
  }
  if (bytes.size() < 12) throw Error(ErrorCode::truncated, "header shorter than 12 bytes");
  const auto version = detail::get_le<std::uint16_t>(bytes, 4);
  if (version != kTensorVersion) {
    throw Error(ErrorCode::version_mismatch, "tensor file version " + std::to_string(version) + ", expected 1");
  }
  const auto dtype = detail::get_le<std::uint16_t>(bytes, 6);
  if (dtype != kDtypeFloat32) throw Error(ErrorCode::unsupported_dtype, "dtype code " + std::to_string(dtype));
  const auto ndim = detail::get_le<std::uint32_t>(bytes, 8);
  const std::size_t header = 12;
  if ((bytes.size() - header) / 8 < ndim) throw Error(ErrorCode::truncated, "dimension table truncated");

  RawTensor t;
  t.dims.resize(ndim);
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    t.dims[i] = detail::get_le<std::uint64_t>(bytes, header + 8 * i);
    if (t.dims[i] != 0 && count > std::numeric_limits<std::uint64_t>::max() / t.dims[i]) {
      throw Error(ErrorCode::dimension_overflow, "element count overflows 64 bits");
    }
    count *= t.dims[i];
  }
  const std::size_t payload_offset = header + 8 * static_cast<std::size_t>(ndim);
  const std::size_t available = bytes.size() - payload_offset;
  if (count > std::numeric_limits<std::size_t>::max() / 4) {
    throw Error(ErrorCode::dimension_overflow, "payload size overflows");
  }
  if (available < count * 4) {
    throw Error(ErrorCode::truncated, "payload holds " + std::to_string(available / 4) + " floats, header declares " +
                                          std::to_string(count));
  }
  if (available != count * 4) throw Error(ErrorCode::truncated, "trailing bytes after payload");

  t.values.resize(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    t.values[i] = std::bit_cast<float>(detail::get_le<std::uint32_t>(bytes, payload_offset + 4 * i));
  }
  return t;
}

inline RawTensor read_raw_tensor(const std::filesystem::path& path) {
  return decode_tensor(detail::read_file_bytes(path));
}

inline void write_raw_tensor(const RawTensor& t, const std::filesystem::path& path) {
  detail::write_file_bytes(path, encode_tensor(t.dims, t.values));
}

/// Reads a 3-D (C x H x W) tensor file.
template <class Kind = FeatureKind>
Tensor<Kind> read_tensor(const std::filesystem::path& path) {
  RawTensor raw = read_raw_tensor(path);
  if (raw.dims.size() != 3) {
    throw Error(ErrorCode::shape_mismatch, path.string() + ": expected 3 dimensions, found " +
                                               std::to_string(raw.dims.size()));
  }
  Shape s{static_cast<std::size_t>(raw.dims[0]), static_cast<std::size_t>(raw.dims[1]),
          static_cast<std::size_t>(raw.dims[2])};
  return Tensor<Kind>(s, std::move(raw.values));
}

template <class Kind>
void write_tensor(const Tensor<Kind>& t, const std::filesystem::path& path) {
  const std::array<std::uint64_t, 3> dims = {t.channels(), t.height(), t.width()};
  detail::write_file_bytes(path, encode_tensor(dims, t.data()));
}

}  // namespace styleshift
