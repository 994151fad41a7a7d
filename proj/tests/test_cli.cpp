#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "simtlab/bench.hpp"
#include "simtlab/matrix_io.hpp"
#include "simtlab/reference.hpp"

using namespace simtlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "simtlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_containing(const std::string& text, const std::string& needle) {
  std::vector<std::string> found;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    if (line.find(needle) != std::string::npos) found.push_back(line);
  }
  return found;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("simtlab_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("verify examples") {
  const auto f64 = call({"verify", "--size", "64", "--kind", "f64", "--block", "16"});
  CHECK(f64.code == 0);
  CHECK(f64.out.find("3 of 3 within tolerance") != std::string::npos);
  for (const auto& line : lines_containing(f64.out, "rel_frobenius")) {
    CHECK(line.find("rel_frobenius 0  max_abs 0") != std::string::npos);
  }

  const auto ragged = call({"verify", "--size", "17", "--impl", "tiled", "--block", "16"});
  CHECK(ragged.code == cli::kInfeasible);
  CHECK(ragged.err.find("divisibility") != std::string::npos);

  const auto complex = call({"verify", "--size", "16", "--kind", "c64", "--block", "16"});
  CHECK(complex.code == 0);
  CHECK(complex.out.find("tol 1e-06") != std::string::npos);
  CHECK(complex.out.find("strassen      skipped") != std::string::npos);
}

TEST_CASE("verify with integer fill demands exact float64 results") {
  const auto r = call({"verify", "--size", "32", "--fill", "integer", "--kinds", "f32,f64"});
  CHECK(r.code == 0);
  CHECK(lines_containing(r.out, "(exact)").size() == 4);
  CHECK(lines_containing(r.out, "bitwise yes").size() == 8);
}

TEST_CASE("verify rejects bad requests") {
  CHECK(call({"verify", "--impl", "cublas"}).code == cli::kUsage);
  CHECK(call({"verify", "--impl", "seq"}).code == cli::kUsage);
  CHECK(call({"verify", "--impl", "elementwise_kernel"}).code == cli::kUsage);
  CHECK(call({"verify", "--kind", "f16"}).code == cli::kUsage);
  CHECK(call({"verify", "--fill", "gaussian"}).code == cli::kUsage);
  CHECK(call({"verify", "--profile", "fermi"}).code == cli::kUsage);
  CHECK(call({"verify", "--size", "0"}).code == cli::kUsage);
  const auto big = call({"verify", "--size", "64", "--impl", "single_block"});
  CHECK(big.code == cli::kInfeasible);
  CHECK(big.err.find("block cap 1024") != std::string::npos);
}

TEST_CASE("verify reads STMX operands and dumps outputs") {
  TempDir dir;
  const auto a = make_any_matrix(16, 32, ScalarKind::f32, SeededRandom{1});
  const auto b = make_any_matrix(32, 48, ScalarKind::f32, SeededRandom{2});
  write_matrix(dir.path / "a.stmx", a);
  write_matrix(dir.path / "b.stmx", b);
  const auto out_dir = dir.path / "out";
  const auto r = call({"verify", "--a", (dir.path / "a.stmx").string(), "--b",
                       (dir.path / "b.stmx").string(), "--dump", out_dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("verify 16x32x48 f32") != std::string::npos);
  const auto ref = matmul_sequential(a, b);
  CHECK(bitwise_equal(read_matrix(out_dir / "seq_f32.stmx"), ref));
  CHECK(bitwise_equal(read_matrix(out_dir / "global_f32.stmx"), ref));
  CHECK(bitwise_equal(read_matrix(out_dir / "tiled_f32.stmx"), ref));
  CHECK_FALSE(fs::exists(out_dir / "strassen_f32.stmx"));

  CHECK(call({"verify", "--a", (dir.path / "a.stmx").string()}).code == cli::kUsage);
  CHECK(call({"verify", "--a", (dir.path / "b.stmx").string(), "--b",
              (dir.path / "b.stmx").string()})
            .code == cli::kUsage);
  CHECK(call({"verify", "--a", (dir.path / "missing.stmx").string(), "--b",
              (dir.path / "b.stmx").string()})
            .code == cli::kIoError);
}

TEST_CASE("SIMT_WORKERS is honoured and validated") {
  setenv("SIMT_WORKERS", "2", 1);
  const auto ok = call({"verify", "--size", "16"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("workers 2") != std::string::npos);
  setenv("SIMT_WORKERS", "lots", 1);
  CHECK(call({"verify", "--size", "16"}).code == cli::kUsage);
  unsetenv("SIMT_WORKERS");
}

TEST_CASE("bench examples") {
  TempDir dir;
  const auto csv = dir.path / "out.csv";
  const auto plot = dir.path / "plot.csv";
  const auto r = call({"bench", "--sizes", "256", "--kinds", "f32", "--impls", "seq,tiled",
                       "--baseline", "seq", "--reps", "1", "--quiet", "--csv", csv.string(),
                       "--plot", plot.string()});
  CHECK(r.code == 0);
  const auto seq_rows = lines_containing(r.out, "seq ");
  REQUIRE_FALSE(seq_rows.empty());
  CHECK(seq_rows.front().find("1.00") != std::string::npos);

  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == bench::kCsvHeader);
  in.seekg(0);
  const auto report = bench::parse_csv(in);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].speedup == 1.0);
  CHECK(report.rows[0].result.checksum == report.rows[1].result.checksum);
  CHECK(fs::exists(plot));
}

TEST_CASE("bench elementwise rows report the addition count") {
  const auto r = call({"bench", "--impls", "elementwise_seq,elementwise_kernel", "--sizes",
                       "4096", "--kinds", "f32", "--reps", "1", "--quiet"});
  CHECK(r.code == 0);
  const auto rows = lines_containing(r.out, "16777216");
  CHECK(rows.size() == 2);
}

TEST_CASE("bench error paths") {
  CHECK(call({"bench", "--impls", "seq", "--baseline", "tiled", "--sizes", "4"}).code ==
        cli::kUsage);
  CHECK(call({"bench", "--reps", "0"}).code == cli::kUsage);
  CHECK(call({"bench", "--sizes", "4", "--kinds", "f32", "--impls", "seq", "--reps", "1",
              "--quiet", "--csv", "/nonexistent-dir/out.csv"})
            .code == cli::kIoError);
  // The only baseline row is skipped: nothing to compare against.
  CHECK(call({"bench", "--sizes", "64", "--kinds", "f32", "--impls", "single_block,seq",
              "--baseline", "single_block", "--reps", "1", "--quiet"})
            .code == cli::kInfeasible);
}

TEST_CASE("budget examples") {
  const auto legacy = call({"budget", "--block", "16", "--tiles", "2", "--elem-bytes", "8",
                            "--profile", "legacy"});
  CHECK(legacy.code == 0);
  CHECK(legacy.out.rfind("4096 B, fits (16384 B limit)\n", 0) == 0);

  const auto big = call({"budget", "--block", "64", "--tiles", "2", "--elem-bytes", "8",
                         "--profile", "legacy"});
  CHECK(big.code == cli::kInfeasible);
  CHECK(big.out.rfind("65536 B, exceeds (16384 B limit)\n", 0) == 0);

  const auto unit = call({"budget", "--block", "1", "--tiles", "1", "--elem-bytes", "4"});
  CHECK(unit.code == 0);
  CHECK(unit.out.rfind("4 B, fits", 0) == 0);

  CHECK(call({"budget", "--block", "16", "--profile", "fermi"}).code == cli::kUsage);
  CHECK(call({"budget"}).code == cli::kUsage);
  CHECK(call({"budget", "--block", "0"}).code == cli::kUsage);
}

TEST_CASE("demo examples") {
  const auto walk = call({"demo", "--grid", "1,1", "--block", "3,3"});
  CHECK(walk.code == 0);
  const auto lines = lines_containing(walk.out, "->");
  CHECK(lines.size() == 9);
  CHECK(lines_containing(walk.out, "thread (x=0, y=1) -> row 1, col 0").size() == 1);

  const auto four = call({"demo", "--grid", "2,2", "--block", "2,2"});
  CHECK(four.code == 0);
  const auto owned = lines_containing(four.out, "->");
  CHECK(owned.size() == 16);
  std::set<std::string> elements;
  for (const auto& l : owned) elements.insert(l.substr(l.find("->")));
  CHECK(elements.size() == 16);

  CHECK(call({"demo", "--grid", "1,1", "--block", "9,9"}).code == cli::kUsage);
  CHECK(call({"demo", "--grid", "1"}).code == cli::kUsage);
}

TEST_CASE("usage errors") {
  const auto none = call({});
  CHECK(none.code == cli::kUsage);
  CHECK(none.err.find("verify") != std::string::npos);
  CHECK(call({"frobnicate"}).code == cli::kUsage);
  CHECK(call({"verify", "--colour"}).code == cli::kUsage);
  const auto help = call({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("budget") != std::string::npos);
}
