#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>

#include "simtlab/matrix.hpp"

namespace simtlab {

/// Raised for unreadable, unwritable, or malformed matrix files.
class MatrixIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// STMX layout, all integers little-endian:
//   "STMX" | version u8 = 1 | kind u8 (0 f32, 1 f64, 2 c64) | rows u64 | cols u64
//   | rows*cols elements, row-major, little-endian components
inline constexpr std::uint8_t kStmxVersion = 1;

void write_matrix(const std::filesystem::path& path, const AnyMatrix& m);
AnyMatrix read_matrix(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::byte> bytes) noexcept;

/// FNV-1a over the little-endian element bytes of the matrix data.
std::uint64_t checksum(const AnyMatrix& m) noexcept;
template <Scalar T>
std::uint64_t checksum(const Matrix<T>& m) noexcept;

}  // namespace simtlab
