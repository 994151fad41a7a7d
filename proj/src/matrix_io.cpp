#include "simtlab/matrix_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace simtlab {

static_assert(std::endian::native == std::endian::little,
              "element bytes are written as stored; big-endian hosts need swapping");

namespace {

constexpr std::array<char, 4> kMagic{'S', 'T', 'M', 'X'};
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> buf{};
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xff);
  out.write(buf.data(), buf.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  return v;
}

template <Scalar T>
AnyMatrix read_payload(std::istream& in, std::uint64_t rows, std::uint64_t cols,
                       const std::filesystem::path& path) {
  Matrix<T> m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data().data()),
          static_cast<std::streamsize>(m.size() * sizeof(T)));
  if (!in) throw MatrixIoError(path.string() + ": truncated element data");
  if (in.peek() != std::char_traits<char>::eof()) {
    throw MatrixIoError(path.string() + ": trailing bytes after element data");
  }
  return m;
}

}  // namespace

void write_matrix(const std::filesystem::path& path, const AnyMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MatrixIoError("cannot open '" + path.string() + "' for writing");
  out.write(kMagic.data(), kMagic.size());
  out.put(static_cast<char>(kStmxVersion));
  out.put(static_cast<char>(kind_of(m)));
  put_u64(out, rows_of(m));
  put_u64(out, cols_of(m));
  std::visit(
      [&](const auto& x) {
        const auto bytes = std::as_bytes(x.data());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
      },
      m);
  if (!out) throw MatrixIoError("write to '" + path.string() + "' failed");
}

AnyMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MatrixIoError("cannot open '" + path.string() + "' for reading");
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw MatrixIoError(path.string() + ": bad magic, expected STMX");
  const int version = in.get();
  if (version != kStmxVersion) {
    throw MatrixIoError(path.string() + ": unsupported version " + std::to_string(version));
  }
  const int kind = in.get();
  const std::uint64_t rows = get_u64(in);
  const std::uint64_t cols = get_u64(in);
  if (!in) throw MatrixIoError(path.string() + ": truncated header");
  if (rows == 0 || cols == 0) throw MatrixIoError(path.string() + ": zero dimension");
  if (rows > std::numeric_limits<std::uint64_t>::max() / 8 / cols) {
    throw MatrixIoError(path.string() + ": dimensions overflow");
  }
  switch (kind) {
    case 0: return read_payload<float>(in, rows, cols, path);
    case 1: return read_payload<double>(in, rows, cols, path);
    case 2: return read_payload<c64>(in, rows, cols, path);
    default:
      throw MatrixIoError(path.string() + ": unknown kind tag " + std::to_string(kind));
  }
}

std::uint64_t fnv1a64(std::span<const std::byte> bytes) noexcept {
  std::uint64_t h = kFnvOffset;
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= kFnvPrime;
  }
  return h;
}

template <Scalar T>
std::uint64_t checksum(const Matrix<T>& m) noexcept {
  return fnv1a64(std::as_bytes(m.data()));
}

std::uint64_t checksum(const AnyMatrix& m) noexcept {
  return std::visit([](const auto& x) { return checksum(x); }, m);
}

template std::uint64_t checksum<float>(const Matrix<float>&) noexcept;
template std::uint64_t checksum<double>(const Matrix<double>&) noexcept;
template std::uint64_t checksum<c64>(const Matrix<c64>&) noexcept;

}  // namespace simtlab
