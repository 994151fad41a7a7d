#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simtlab/engine.hpp"
#include "simtlab/matrix.hpp"
#include "simtlab/op_counter.hpp"

namespace simtlab::bench {

enum class Impl { seq, single_block, global, tiled, strassen, elementwise_seq, elementwise_kernel };

std::string_view to_string(Impl impl) noexcept;
/// Throws std::invalid_argument for unknown names.
Impl parse_impl(std::string_view text);
bool is_matmul(Impl impl) noexcept;
/// Implementations that run on the SIMT engine and so take a block side.
bool uses_engine(Impl impl) noexcept;

enum class InputFill { random, integer };

struct Shape {
  std::size_t rows = 1;
  std::size_t inner = 1;  // 1 for elementwise cases
  std::size_t cols = 1;

  friend bool operator==(const Shape&, const Shape&) = default;
};

struct BenchCase {
  Impl impl = Impl::seq;
  ScalarKind kind = ScalarKind::f32;
  Shape size;
  std::size_t block_side = 16;  // engine impls only
  std::size_t reps = 3;
  std::uint64_t seed = 42;
  InputFill fill = InputFill::random;
  std::size_t strassen_cutoff = 64;
  simt::DeviceProfile profile = simt::DeviceProfile::modern();
  std::size_t workers = 0;  // 0: simt::default_workers()
};

/// Throws std::invalid_argument if reps, a size field, or (engine impls) the
/// block side is zero.
void validate_case(const BenchCase& c);

/// A is rows x inner from seed, B is inner x cols from seed + 1 (elementwise:
/// both rows x cols). SeededRandom or SeededInteger per the case's fill.
std::pair<AnyMatrix, AnyMatrix> make_inputs(const BenchCase& c);

struct CaseResult {
  bool skipped = false;
  std::string skip_reason;
  double median_s = 0.0;
  double min_s = 0.0;
  OpCounter ops;               // one repetition
  std::uint64_t checksum = 0;  // FNV-1a of the output
};

/// Runs the case reps times on fresh seeded inputs. Infeasible cases (launch
/// limits, Strassen on complex or non-power-of-two sizes) come back skipped
/// with the violated rule as the reason.
CaseResult run_case(const BenchCase& c);

struct BenchRow {
  BenchCase bench;
  CaseResult result;
  std::optional<double> speedup;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

/// Runs every case in order. progress, if given, gets one line per case.
BenchReport run_suite(const std::vector<BenchCase>& cases, std::ostream* progress = nullptr);

/// speedup = baseline median / row median, where the baseline is the
/// completed row of implementation `baseline` with the same kind and shape.
/// seq and elementwise_seq stand in for each other, so either one also
/// covers the other operation family. Rows without such a baseline, and
/// skipped rows, get no speedup. Throws
/// std::invalid_argument if no completed baseline row exists at all or a
/// baseline median is not positive.
void apply_speedups(BenchReport& report, Impl baseline);

/// Implementation x scalar-kind grid of median times and speedups, one grid
/// per shape, followed by operation counts and checksums.
std::string speedup_table(BenchReport report, Impl baseline);

inline constexpr std::string_view kCsvHeader =
    "impl,kind,rows,inner,cols,block,reps,median_s,min_s,mults,adds,checksum,speedup";

/// One row per case. Skipped cases leave median_s..speedup empty; a missing
/// speedup is empty. Numbers use '.' and shortest round-trip formatting.
void emit_csv(const BenchReport& report, std::ostream& out);
void emit_csv(const BenchReport& report, const std::filesystem::path& path);

/// Same rows with a leading "figure" column, grouped as: time_by_impl (all
/// matmul rows), shared_vs_global (tiled and global rows), op_counts
/// (elementwise rows).
void emit_plot_data(const BenchReport& report, std::ostream& out);
void emit_plot_data(const BenchReport& report, const std::filesystem::path& path);

/// Inverse of emit_csv for the fields the CSV carries.
BenchReport parse_csv(std::istream& in);

/// Raised when a report file cannot be written.
class ReportIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace simtlab::bench
