#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "simtlab/matrix.hpp"
#include "simtlab/matrix_io.hpp"

using namespace simtlab;

TEST_CASE("scalar kinds have the listed byte widths") {
  CHECK(byte_width(ScalarKind::f32) == 4);
  CHECK(byte_width(ScalarKind::f64) == 8);
  CHECK(byte_width(ScalarKind::c64) == 8);
  CHECK(parse_scalar_kind("complex64") == ScalarKind::c64);
  CHECK(parse_scalar_kind("f64") == ScalarKind::f64);
  CHECK_THROWS_AS(parse_scalar_kind("c128"), std::invalid_argument);
}

TEST_CASE("make_matrix fills") {
  SUBCASE("identity 1x1") {
    const auto m = make_matrix<double>(1, 1, Identity{});
    CHECK(m.get(0, 0) == 1.0);
  }
  SUBCASE("zeros 2x3 float32") {
    const auto m = make_matrix<float>(2, 3, Zeros{});
    CHECK(m.size() == 6);
    for (float v : m.data()) CHECK(v == 0.0f);
  }
  SUBCASE("complex identity is 1+0i on the diagonal") {
    const auto m = make_matrix<c64>(3, 3, Identity{});
    CHECK(m.get(1, 1) == c64{1.0f, 0.0f});
    CHECK(m.get(0, 2) == c64{0.0f, 0.0f});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(make_matrix<float>(0, 3, Zeros{}), std::invalid_argument);
    CHECK_THROWS_AS(make_matrix<float>(3, 0, Zeros{}), std::invalid_argument);
    CHECK_THROWS_AS(make_matrix<double>(2, 3, Identity{}), std::invalid_argument);
  }
}

TEST_CASE("seeded random fill is deterministic and matches the frozen mt19937_64 mapping") {
  const auto a = make_matrix<double>(4, 4, SeededRandom{42});
  const auto b = make_matrix<double>(4, 4, SeededRandom{42});
  CHECK(bitwise_equal(a, b));
  CHECK_FALSE(bitwise_equal(a, make_matrix<double>(4, 4, SeededRandom{43})));

  // Frozen from an independent MT19937-64 implementation.
  CHECK(a.get(0, 0) == 0x1.05477df5bb978p-1);
  CHECK(a.get(0, 1) == 0x1.1cbc7dcdc9280p-2);
  CHECK(a.get(0, 2) == 0x1.023259fc3979ep-1);
  CHECK(a.get(0, 3) == -0x1.7474ef01d794cp-1);

  const auto f = make_matrix<float>(1, 4, SeededRandom{42});
  CHECK(f.get(0, 0) == 0x1.05477cp-1f);
  CHECK(f.get(0, 1) == 0x1.1cbc78p-2f);
  CHECK(f.get(0, 3) == -0x1.7474f0p-1f);

  // Complex draws real then imaginary.
  const auto c = make_matrix<c64>(1, 2, SeededRandom{42});
  CHECK(c.get(0, 0) == c64{0x1.05477cp-1f, 0x1.1cbc78p-2f});
  CHECK(c.get(0, 1) == c64{0x1.023258p-1f, -0x1.7474f0p-1f});

  const auto ints = make_matrix<double>(1, 4, SeededInteger{42, 8});
  CHECK(ints.get(0, 0) == -1.0);
  CHECK(ints.get(0, 1) == 6.0);
  CHECK(ints.get(0, 2) == -8.0);
  CHECK(ints.get(0, 3) == -5.0);
}

TEST_CASE("seeded random values lie in [-1, 1)") {
  const auto m = make_matrix<float>(64, 64, SeededRandom{7});
  for (float v : m.data()) {
    CHECK(v >= -1.0f);
    CHECK(v < 1.0f);
  }
}

TEST_CASE("row-major indexing") {
  auto m = make_matrix<double>(2, 2, Zeros{});
  m.set(0, 1, 7.0);
  CHECK(m.get(0, 1) == 7.0);
  CHECK(m.index_of(0, 1) == 1);
  CHECK(m.data()[1] == 7.0);

  const Matrix<float> wide(3, 5);
  CHECK(wide.index_of(2, 4) == 14);

  CHECK_THROWS_AS(m.get(2, 0), std::out_of_range);
  CHECK_THROWS_AS(m.set(0, 2, 1.0), std::out_of_range);
}

TEST_CASE("property: set/get round trip at every index") {
  for (std::size_t rows : {1, 3, 7}) {
    for (std::size_t cols : {1, 4, 9}) {
      Matrix<c64> m(rows, cols);
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
          const c64 v{static_cast<float>(i), static_cast<float>(j) + 0.5f};
          m.set(i, j, v);
          REQUIRE(m.get(i, j) == v);
          REQUIRE(m.index_of(i, j) == i * cols + j);
          REQUIRE(m.data()[i * cols + j] == v);
        }
      }
    }
  }
}

TEST_CASE("complex elements are interleaved real/imaginary floats") {
  Matrix<c64> m(1, 2);
  m.set(0, 1, c64{3.0f, -4.0f});
  float raw[4];
  std::memcpy(raw, m.data().data(), sizeof raw);
  CHECK(raw[2] == 3.0f);
  CHECK(raw[3] == -4.0f);
}

TEST_CASE("complex_mul") {
  const c64 z{2.5f, -1.25f};
  CHECK(complex_mul({1.0f, 0.0f}, z) == z);
  CHECK(complex_mul({0.0f, 1.0f}, {0.0f, 1.0f}) == c64{-1.0f, 0.0f});
  CHECK(complex_mul({1.0f, 2.0f}, {3.0f, 4.0f}) == c64{-5.0f, 10.0f});
}

TEST_CASE("compare") {
  const auto m = make_matrix<double>(5, 3, SeededRandom{1});
  const auto same = compare(m, m);
  CHECK(same.rel_frobenius == 0.0);
  CHECK(same.max_abs == 0.0);

  Matrix<double> one(1, 1), two(1, 1);
  one.set(0, 0, 1.0);
  two.set(0, 0, 2.0);
  const auto e = compare(one, two);
  CHECK(e.max_abs == 1.0);
  CHECK(e.rel_frobenius == 0.5);

  CHECK_THROWS_AS(compare(Matrix<float>(2, 2), Matrix<float>(3, 3)), std::invalid_argument);
  CHECK_THROWS_AS(compare(AnyMatrix{Matrix<float>(2, 2)}, AnyMatrix{Matrix<double>(2, 2)}),
                  std::invalid_argument);
}

TEST_CASE("compare uses the complex modulus and a normal-number floor") {
  Matrix<c64> a(1, 1), b(1, 1);
  a.set(0, 0, {3.0f, 4.0f});
  const auto e = compare(a, b);
  CHECK(e.max_abs == 5.0);
  // ||b|| = 0, so the denominator is FLT_MIN.
  CHECK(e.rel_frobenius == doctest::Approx(5.0 / std::numeric_limits<float>::min()));
}

double frobenius(const Matrix<float>& m) {
  double s = 0.0;
  for (float v : m.data()) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

TEST_CASE("property: compare is symmetric in its absolute parts") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = make_matrix<float>(6, 5, SeededRandom{seed});
    const auto b = make_matrix<float>(6, 5, SeededRandom{seed + 100});
    const auto ab = compare(a, b);
    const auto ba = compare(b, a);
    CHECK(ab.max_abs == ba.max_abs);
    // ||a-b|| is shared; only the normalizing norm differs.
    CHECK(ab.rel_frobenius * frobenius(b) ==
          doctest::Approx(ba.rel_frobenius * frobenius(a)).epsilon(1e-12));
  }
}

TEST_CASE("STMX files") {
  const auto dir = std::filesystem::temp_directory_path() / "simtlab_test_matrix";
  std::filesystem::create_directories(dir);

  SUBCASE("header layout is bit-exact") {
    Matrix<float> m(2, 1);
    m.set(0, 0, 1.0f);
    m.set(1, 0, -2.0f);
    write_matrix(dir / "m.stmx", m);
    std::ifstream in(dir / "m.stmx", std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
    const std::vector<unsigned char> expected{
        'S', 'T', 'M', 'X', 1, 0,                          // magic, version, kind f32
        2, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0,    // rows, cols
        0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0xc0};  // 1.0f, -2.0f
    CHECK(bytes == expected);
  }

  SUBCASE("round trip for every kind") {
    for (ScalarKind kind : {ScalarKind::f32, ScalarKind::f64, ScalarKind::c64}) {
      const auto m = make_any_matrix(3, 7, kind, SeededRandom{9});
      write_matrix(dir / "rt.stmx", m);
      const auto back = read_matrix(dir / "rt.stmx");
      CHECK(kind_of(back) == kind);
      CHECK(bitwise_equal(m, back));
    }
  }

  SUBCASE("malformed input") {
    {
      std::ofstream out(dir / "bad.stmx", std::ios::binary);
      out << "NOPE";
    }
    CHECK_THROWS_AS(read_matrix(dir / "bad.stmx"), MatrixIoError);
    write_matrix(dir / "trunc.stmx", Matrix<double>(4, 4));
    std::filesystem::resize_file(dir / "trunc.stmx", 30);
    CHECK_THROWS_AS(read_matrix(dir / "trunc.stmx"), MatrixIoError);
    CHECK_THROWS_AS(read_matrix(dir / "missing.stmx"), MatrixIoError);
  }

  std::filesystem::remove_all(dir);
}

TEST_CASE("FNV-1a 64 reference vectors") {
  CHECK(fnv1a64({}) == 0xcbf29ce484222325ULL);
  const std::byte a[] = {std::byte{'a'}};
  CHECK(fnv1a64(a) == 0xaf63dc4c8601ec8cULL);
  const char* foobar = "foobar";
  CHECK(fnv1a64(std::as_bytes(std::span(foobar, 6))) == 0x85944171f73967e8ULL);
}
