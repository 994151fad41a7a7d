#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "simtlab/bench.hpp"

using namespace simtlab;
using namespace simtlab::bench;

namespace {

BenchCase make_case(Impl impl, ScalarKind kind, std::size_t n, std::size_t reps = 1) {
  BenchCase c;
  c.impl = impl;
  c.kind = kind;
  c.size = {n, is_matmul(impl) ? n : 1, n};
  c.reps = reps;
  c.workers = 1;
  return c;
}

BenchRow timed_row(Impl impl, ScalarKind kind, std::size_t n, double median) {
  BenchRow row;
  row.bench = make_case(impl, kind, n);
  row.result.median_s = median;
  row.result.min_s = median;
  return row;
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("impl names") {
  for (Impl i : {Impl::seq, Impl::single_block, Impl::global, Impl::tiled, Impl::strassen,
                 Impl::elementwise_seq, Impl::elementwise_kernel}) {
    CHECK(parse_impl(to_string(i)) == i);
  }
  CHECK_THROWS_AS(parse_impl("cublas"), std::invalid_argument);
  CHECK(uses_engine(Impl::tiled));
  CHECK_FALSE(uses_engine(Impl::strassen));
  CHECK_FALSE(is_matmul(Impl::elementwise_kernel));
}

TEST_CASE("case validation") {
  auto c = make_case(Impl::tiled, ScalarKind::f32, 16);
  CHECK_NOTHROW(validate_case(c));
  c.reps = 0;
  CHECK_THROWS_AS(validate_case(c), std::invalid_argument);
  c.reps = 1;
  c.block_side = 0;
  CHECK_THROWS_AS(validate_case(c), std::invalid_argument);
  c.size.inner = 0;
  CHECK_THROWS_AS(validate_case(c), std::invalid_argument);
}

TEST_CASE("seq and tiled report the same checksum at 64^3 float64") {
  const auto seq = run_case(make_case(Impl::seq, ScalarKind::f64, 64, 3));
  const auto tiled = run_case(make_case(Impl::tiled, ScalarKind::f64, 64, 3));
  REQUIRE_FALSE(seq.skipped);
  REQUIRE_FALSE(tiled.skipped);
  CHECK(seq.checksum == tiled.checksum);
  CHECK(seq.ops == tiled.ops);
  CHECK(seq.ops.multiplies == 64 * 64 * 64);
}

TEST_CASE("checksums agree across matmul impls on integer-valued float64") {
  std::uint64_t expected = 0;
  for (Impl impl : {Impl::seq, Impl::single_block, Impl::global, Impl::tiled, Impl::strassen}) {
    for (std::size_t cutoff : {1, 8, 32}) {
      auto c = make_case(impl, ScalarKind::f64, 32);
      c.fill = InputFill::integer;
      c.strassen_cutoff = cutoff;
      const auto r = run_case(c);
      REQUIRE_FALSE(r.skipped);
      if (expected == 0) expected = r.checksum;
      CHECK(r.checksum == expected);
      if (impl != Impl::strassen) break;
    }
  }
}

TEST_CASE("elementwise_kernel at 4096^2 counts 16,777,216 additions") {
  auto c = make_case(Impl::elementwise_kernel, ScalarKind::f32, 4096);
  c.workers = 0;
  const auto kernel = run_case(c);
  CHECK(kernel.ops.additions == 16'777'216);
  c.impl = Impl::elementwise_seq;
  const auto seq = run_case(c);
  CHECK(seq.ops.additions == 16'777'216);
  CHECK(seq.checksum == kernel.checksum);
}

TEST_CASE("infeasible cases are skipped with a reason") {
  const auto big = run_case(make_case(Impl::single_block, ScalarKind::f32, 2048));
  CHECK(big.skipped);
  CHECK(big.skip_reason.find("block cap 1024") != std::string::npos);

  const auto complex_strassen = run_case(make_case(Impl::strassen, ScalarKind::c64, 64));
  CHECK(complex_strassen.skipped);
  const auto odd_strassen = run_case(make_case(Impl::strassen, ScalarKind::f32, 48));
  CHECK(odd_strassen.skipped);
  const auto ragged_tiled = run_case(make_case(Impl::tiled, ScalarKind::f32, 17));
  CHECK(ragged_tiled.skipped);
  CHECK(ragged_tiled.skip_reason.find("multiples of block side") != std::string::npos);
}

TEST_CASE("speedup formula") {
  BenchReport report;
  report.rows.push_back(timed_row(Impl::seq, ScalarKind::f32, 4096, 991.96));
  report.rows.push_back(timed_row(Impl::tiled, ScalarKind::f32, 4096, 0.83));
  report.rows.push_back(timed_row(Impl::global, ScalarKind::f32, 4096, 2000.0));

  auto annotated = report;
  apply_speedups(annotated, Impl::seq);
  REQUIRE(annotated.rows[0].speedup.has_value());
  CHECK(*annotated.rows[0].speedup == 1.0);
  CHECK(std::abs(*annotated.rows[1].speedup - 1195.13) <= 0.01);
  CHECK(*annotated.rows[2].speedup < 1.0);

  const auto table = speedup_table(report, Impl::seq);
  CHECK(table.find("1195.13") != std::string::npos);
  CHECK(table.find("1.00") != std::string::npos);
  CHECK(table.find("0.50") != std::string::npos);
  CHECK(table.find("991.960000") != std::string::npos);
}

TEST_CASE("speedups pair rows by kind and shape") {
  BenchReport report;
  report.rows.push_back(timed_row(Impl::seq, ScalarKind::f32, 256, 2.0));
  report.rows.push_back(timed_row(Impl::seq, ScalarKind::f64, 256, 4.0));
  report.rows.push_back(timed_row(Impl::tiled, ScalarKind::f64, 256, 1.0));
  report.rows.push_back(timed_row(Impl::tiled, ScalarKind::c64, 256, 1.0));
  report.rows.push_back(timed_row(Impl::elementwise_kernel, ScalarKind::f32, 4096, 1.0));
  apply_speedups(report, Impl::seq);
  CHECK(*report.rows[2].speedup == 4.0);
  CHECK_FALSE(report.rows[3].speedup.has_value());
  CHECK_FALSE(report.rows[4].speedup.has_value());
}

TEST_CASE("a seq baseline also covers elementwise rows through elementwise_seq") {
  BenchReport report;
  report.rows.push_back(timed_row(Impl::seq, ScalarKind::f32, 256, 2.0));
  report.rows.push_back(timed_row(Impl::elementwise_seq, ScalarKind::f32, 4096, 0.5));
  report.rows.push_back(timed_row(Impl::elementwise_kernel, ScalarKind::f32, 4096, 2.0));
  apply_speedups(report, Impl::seq);
  CHECK(*report.rows[0].speedup == 1.0);
  CHECK(*report.rows[1].speedup == 1.0);
  CHECK(*report.rows[2].speedup == 0.25);
}

TEST_CASE("missing baseline is an error") {
  BenchReport report;
  report.rows.push_back(timed_row(Impl::tiled, ScalarKind::f32, 64, 1.0));
  CHECK_THROWS_AS(apply_speedups(report, Impl::seq), std::invalid_argument);
  CHECK_THROWS_AS((void)speedup_table(report, Impl::seq), std::invalid_argument);

  auto skipped = timed_row(Impl::seq, ScalarKind::f32, 64, 0.0);
  skipped.result.skipped = true;
  report.rows.push_back(skipped);
  CHECK_THROWS_AS(apply_speedups(report, Impl::seq), std::invalid_argument);
}

TEST_CASE("CSV") {
  SUBCASE("empty report is header only") {
    std::ostringstream os;
    emit_csv(BenchReport{}, os);
    CHECK(os.str() == std::string(kCsvHeader) + "\n");
  }
  SUBCASE("three cases give four lines and round-trip") {
    std::vector<BenchCase> cases{make_case(Impl::seq, ScalarKind::f64, 32, 2),
                                 make_case(Impl::tiled, ScalarKind::f64, 32, 2),
                                 make_case(Impl::single_block, ScalarKind::f32, 64, 2)};
    auto report = run_suite(cases);
    apply_speedups(report, Impl::seq);
    std::ostringstream os;
    emit_csv(report, os);
    CHECK(count_lines(os.str()) == 4);
    CHECK(os.str().rfind(std::string(kCsvHeader) + "\n", 0) == 0);

    std::istringstream is(os.str());
    const auto back = parse_csv(is);
    REQUIRE(back.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& x = report.rows[i];
      const auto& y = back.rows[i];
      CHECK(x.bench.impl == y.bench.impl);
      CHECK(x.bench.kind == y.bench.kind);
      CHECK(x.bench.size == y.bench.size);
      CHECK(x.bench.block_side == y.bench.block_side);
      CHECK(x.bench.reps == y.bench.reps);
      CHECK(x.result.skipped == y.result.skipped);
      CHECK(x.result.median_s == y.result.median_s);
      CHECK(x.result.min_s == y.result.min_s);
      CHECK(x.result.ops == y.result.ops);
      CHECK(x.result.checksum == y.result.checksum);
      CHECK(x.speedup == y.speedup);
    }
    // single_block 64x64 needs 4096 threads: skipped row, empty result fields.
    CHECK(os.str().find("single_block,f32,64,64,64,16,2,,,,,,\n") != std::string::npos);
  }
  SUBCASE("malformed input") {
    std::istringstream bad_header("impl,kind\n");
    CHECK_THROWS_AS(parse_csv(bad_header), std::invalid_argument);
    std::istringstream short_row(std::string(kCsvHeader) + "\nseq,f32,1\n");
    CHECK_THROWS_AS(parse_csv(short_row), std::invalid_argument);
  }
  SUBCASE("unwritable path") {
    CHECK_THROWS_AS(emit_csv(BenchReport{}, std::filesystem::path("/nonexistent-dir/x.csv")),
                    ReportIoError);
  }
}

TEST_CASE("plot data groups rows per figure") {
  BenchReport report;
  report.rows.push_back(timed_row(Impl::seq, ScalarKind::f32, 64, 1.0));
  report.rows.push_back(timed_row(Impl::global, ScalarKind::f32, 64, 1.0));
  report.rows.push_back(timed_row(Impl::tiled, ScalarKind::f32, 64, 1.0));
  report.rows.push_back(timed_row(Impl::elementwise_seq, ScalarKind::f32, 64, 1.0));
  std::ostringstream os;
  emit_plot_data(report, os);
  const auto s = os.str();
  CHECK(s.rfind("figure," + std::string(kCsvHeader) + "\n", 0) == 0);
  // 3 matmul rows + 2 tiled/global rows + 1 elementwise row.
  CHECK(count_lines(s) == 1 + 3 + 2 + 1);
  CHECK(s.find("time_by_impl,seq,") != std::string::npos);
  CHECK(s.find("shared_vs_global,tiled,") != std::string::npos);
  CHECK(s.find("shared_vs_global,seq,") == std::string::npos);
  CHECK(s.find("op_counts,elementwise_seq,") != std::string::npos);
}

TEST_CASE("timing sanity and reproducible checksums") {
  std::vector<BenchCase> cases;
  for (Impl impl : {Impl::seq, Impl::global, Impl::tiled, Impl::strassen, Impl::elementwise_seq,
                    Impl::elementwise_kernel}) {
    for (ScalarKind k : {ScalarKind::f32, ScalarKind::f64, ScalarKind::c64}) {
      cases.push_back(make_case(impl, k, 32, 3));
    }
  }
  const auto first = run_suite(cases);
  const auto second = run_suite(cases);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& r = first.rows[i].result;
    if (r.skipped) continue;
    CHECK(r.median_s >= r.min_s);
    CHECK(r.min_s >= 0.0);
    CHECK(r.checksum == second.rows[i].result.checksum);
  }
}
