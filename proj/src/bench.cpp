#include "simtlab/bench.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>

#include "simtlab/kernels.hpp"
#include "simtlab/matrix_io.hpp"
#include "simtlab/reference.hpp"

namespace simtlab::bench {

namespace {

constexpr std::array kAllImpls{Impl::seq,      Impl::single_block,    Impl::global,
                               Impl::tiled,    Impl::strassen,        Impl::elementwise_seq,
                               Impl::elementwise_kernel};

kernels::KernelOptions kernel_options(const BenchCase& c) {
  return {c.block_side, c.profile, c.workers};
}

AnyMatrix execute(const BenchCase& c, const AnyMatrix& a, const AnyMatrix& b, OpCounter* ops) {
  switch (c.impl) {
    case Impl::seq: return matmul_sequential(a, b, ops);
    case Impl::single_block:
      return kernels::run_matmul(kernels::MatmulKernel::single_block, a, b, kernel_options(c), ops);
    case Impl::global:
      return kernels::run_matmul(kernels::MatmulKernel::global, a, b, kernel_options(c), ops);
    case Impl::tiled:
      return kernels::run_matmul(kernels::MatmulKernel::tiled, a, b, kernel_options(c), ops);
    case Impl::strassen: return matmul_strassen(a, b, {c.strassen_cutoff}, ops);
    case Impl::elementwise_seq: return elementwise(a, b, ElementOp::add, ops);
    case Impl::elementwise_kernel:
      return kernels::run_elementwise(a, b, ElementOp::add, kernel_options(c), ops);
  }
  throw std::invalid_argument("unknown implementation");
}

// Feasibility that does not depend on running anything.
std::optional<std::string> precheck(const BenchCase& c) {
  const auto& s = c.size;
  switch (c.impl) {
    case Impl::single_block:
      kernels::plan_single_block(s.rows, s.cols, kernel_options(c));
      break;
    case Impl::global: kernels::plan_global(s.rows, s.cols, kernel_options(c)); break;
    case Impl::tiled:
      kernels::plan_tiled(s.rows, s.inner, s.cols, byte_width(c.kind), kernel_options(c));
      break;
    case Impl::elementwise_kernel:
      kernels::plan_elementwise(s.rows, s.cols, kernel_options(c));
      break;
    case Impl::strassen:
      if (c.kind == ScalarKind::c64) return "Strassen supports f32 and f64 only";
      if (s.rows != s.inner || s.inner != s.cols) return "Strassen requires square operands";
      if ((s.rows & (s.rows - 1)) != 0) return "Strassen requires a power-of-two side";
      if (c.strassen_cutoff == 0) return "Strassen cutoff must be >= 1";
      break;
    default: break;
  }
  return std::nullopt;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ec == std::errc{} ? end : buf.data());
}

std::string hex64(std::uint64_t v) {
  std::array<char, 17> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + 16, v, 16);
  std::string s(buf.data(), end);
  return std::string(16 - s.size(), '0') + s;
}

void write_row(std::ostream& out, const BenchRow& row) {
  const auto& c = row.bench;
  const auto& r = row.result;
  out << to_string(c.impl) << ',' << to_string(c.kind) << ',' << c.size.rows << ','
      << c.size.inner << ',' << c.size.cols << ',' << c.block_side << ',' << c.reps << ',';
  if (r.skipped) {
    out << ",,,,,";
  } else {
    out << format_double(r.median_s) << ',' << format_double(r.min_s) << ','
        << r.ops.multiplies << ',' << r.ops.additions << ',' << hex64(r.checksum) << ',';
    if (row.speedup) out << format_double(*row.speedup);
  }
  out << '\n';
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

template <class N>
N parse_number(const std::string& text, int base = 10) {
  N v{};
  std::from_chars_result res{};
  if constexpr (std::is_floating_point_v<N>) {
    res = std::from_chars(text.data(), text.data() + text.size(), v);
  } else {
    res = std::from_chars(text.data(), text.data() + text.size(), v, base);
  }
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("malformed CSV number '" + text + "'");
  }
  return v;
}

std::ostringstream classic_stream() {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  return os;
}

std::string shape_label(const Shape& s) {
  return std::to_string(s.rows) + "x" + std::to_string(s.inner) + "x" + std::to_string(s.cols);
}

}  // namespace

std::string_view to_string(Impl impl) noexcept {
  switch (impl) {
    case Impl::seq: return "seq";
    case Impl::single_block: return "single_block";
    case Impl::global: return "global";
    case Impl::tiled: return "tiled";
    case Impl::strassen: return "strassen";
    case Impl::elementwise_seq: return "elementwise_seq";
    case Impl::elementwise_kernel: return "elementwise_kernel";
  }
  return "?";
}

Impl parse_impl(std::string_view text) {
  for (Impl impl : kAllImpls) {
    if (to_string(impl) == text) return impl;
  }
  throw std::invalid_argument("unknown implementation '" + std::string(text) + "'");
}

bool is_matmul(Impl impl) noexcept {
  return impl != Impl::elementwise_seq && impl != Impl::elementwise_kernel;
}

bool uses_engine(Impl impl) noexcept {
  return impl == Impl::single_block || impl == Impl::global || impl == Impl::tiled ||
         impl == Impl::elementwise_kernel;
}

void validate_case(const BenchCase& c) {
  if (c.reps == 0) throw std::invalid_argument("repetitions must be >= 1");
  if (c.size.rows == 0 || c.size.inner == 0 || c.size.cols == 0) {
    throw std::invalid_argument("case dimensions must be >= 1");
  }
  if (uses_engine(c.impl) && c.block_side == 0) {
    throw std::invalid_argument("block side must be >= 1");
  }
}

std::pair<AnyMatrix, AnyMatrix> make_inputs(const BenchCase& c) {
  const auto fill = [&](std::uint64_t seed) -> Fill {
    if (c.fill == InputFill::integer) return SeededInteger{seed, 8};
    return SeededRandom{seed};
  };
  if (is_matmul(c.impl)) {
    return {make_any_matrix(c.size.rows, c.size.inner, c.kind, fill(c.seed)),
            make_any_matrix(c.size.inner, c.size.cols, c.kind, fill(c.seed + 1))};
  }
  return {make_any_matrix(c.size.rows, c.size.cols, c.kind, fill(c.seed)),
          make_any_matrix(c.size.rows, c.size.cols, c.kind, fill(c.seed + 1))};
}

CaseResult run_case(const BenchCase& c) {
  validate_case(c);
  CaseResult result;
  try {
    if (auto reason = precheck(c)) {
      result.skipped = true;
      result.skip_reason = *reason;
      return result;
    }
  } catch (const simt::LaunchError& e) {
    result.skipped = true;
    result.skip_reason = e.violations().empty() ? e.what() : e.violations().front().message;
    return result;
  }

  const auto [a, b] = make_inputs(c);
  std::vector<double> times;
  times.reserve(c.reps);
  for (std::size_t rep = 0; rep < c.reps; ++rep) {
    OpCounter ops;
    const auto start = std::chrono::steady_clock::now();
    const AnyMatrix out = execute(c, a, b, &ops);
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(stop - start).count());
    if (rep == 0) {
      result.ops = ops;
      result.checksum = checksum(out);
    }
  }
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  result.min_s = times.front();
  result.median_s = n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
  return result;
}

BenchReport run_suite(const std::vector<BenchCase>& cases, std::ostream* progress) {
  BenchReport report;
  report.rows.reserve(cases.size());
  for (const auto& c : cases) {
    BenchRow row{c, run_case(c), std::nullopt};
    if (progress != nullptr) {
      auto os = classic_stream();
      os << "  " << to_string(c.impl) << ' ' << to_string(c.kind) << ' ' << shape_label(c.size);
      if (row.result.skipped) {
        os << ": skipped (" << row.result.skip_reason << ")";
      } else {
        os << ": median " << std::setprecision(6) << row.result.median_s << " s";
      }
      *progress << os.str() << '\n' << std::flush;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

// The sequential baselines stand in for each other across operation families,
// so a seq baseline also yields speedups for elementwise rows.
Impl baseline_for(Impl baseline, Impl row) noexcept {
  if (is_matmul(row) == is_matmul(baseline)) return baseline;
  if (baseline == Impl::seq) return Impl::elementwise_seq;
  if (baseline == Impl::elementwise_seq) return Impl::seq;
  return baseline;
}

void apply_speedups(BenchReport& report, Impl baseline) {
  bool any_baseline = false;
  for (auto& row : report.rows) {
    row.speedup.reset();
    if (row.bench.impl == baseline && !row.result.skipped) any_baseline = true;
  }
  if (!any_baseline) {
    throw std::invalid_argument("missing baseline row for '" + std::string(to_string(baseline)) +
                                "'");
  }
  for (auto& row : report.rows) {
    if (row.result.skipped) continue;
    const Impl wanted = baseline_for(baseline, row.bench.impl);
    const auto base = std::find_if(report.rows.begin(), report.rows.end(), [&](const BenchRow& r) {
      return r.bench.impl == wanted && !r.result.skipped && r.bench.kind == row.bench.kind &&
             r.bench.size == row.bench.size;
    });
    if (base == report.rows.end()) continue;
    if (!(base->result.median_s > 0.0)) {
      throw std::invalid_argument("baseline median time must be positive");
    }
    row.speedup = &*base == &row ? 1.0 : base->result.median_s / row.result.median_s;
  }
}

std::string speedup_table(BenchReport report, Impl baseline) {
  apply_speedups(report, baseline);
  auto os = classic_stream();

  std::vector<Shape> shapes;
  for (const auto& row : report.rows) {
    if (std::find(shapes.begin(), shapes.end(), row.bench.size) == shapes.end()) {
      shapes.push_back(row.bench.size);
    }
  }

  for (const Shape& shape : shapes) {
    std::vector<Impl> impls;
    std::vector<ScalarKind> kinds;
    for (const auto& row : report.rows) {
      if (!(row.bench.size == shape)) continue;
      if (std::find(impls.begin(), impls.end(), row.bench.impl) == impls.end()) {
        impls.push_back(row.bench.impl);
      }
      if (std::find(kinds.begin(), kinds.end(), row.bench.kind) == kinds.end()) {
        kinds.push_back(row.bench.kind);
      }
    }

    os << "shape " << shape_label(shape) << "  (median wall time in seconds; speedup vs "
       << to_string(baseline_for(baseline, impls.front())) << ")\n";
    os << std::left << std::setw(20) << "impl";
    for (ScalarKind k : kinds) {
      os << std::right << std::setw(14) << (std::string(to_string(k)) + " time")
         << std::setw(12) << "speedup";
    }
    os << '\n';

    std::vector<std::string> notes;
    for (Impl impl : impls) {
      os << std::left << std::setw(20) << to_string(impl) << std::right;
      for (ScalarKind k : kinds) {
        const auto it = std::find_if(report.rows.begin(), report.rows.end(), [&](const BenchRow& r) {
          return r.bench.impl == impl && r.bench.kind == k && r.bench.size == shape;
        });
        if (it == report.rows.end()) {
          os << std::setw(14) << "" << std::setw(12) << "";
        } else if (it->result.skipped) {
          os << std::setw(14) << "skipped" << std::setw(12) << "-";
          notes.push_back(std::string(to_string(impl)) + " " + std::string(to_string(k)) +
                          ": " + it->result.skip_reason);
        } else {
          os << std::setw(14) << std::fixed << std::setprecision(6) << it->result.median_s;
          if (it->speedup) {
            os << std::setw(12) << std::fixed << std::setprecision(2) << *it->speedup;
          } else {
            os << std::setw(12) << "-";
          }
        }
      }
      os << '\n';
    }
    for (const auto& note : notes) os << "  skipped " << note << '\n';
    os << '\n';
  }

  os << std::left << std::setw(20) << "impl" << std::setw(6) << "kind" << std::setw(18) << "shape"
     << std::right << std::setw(16) << "mults" << std::setw(16) << "adds" << std::setw(18)
     << "checksum" << '\n';
  for (const auto& row : report.rows) {
    if (row.result.skipped) continue;
    os << std::left << std::setw(20) << to_string(row.bench.impl) << std::setw(6)
       << to_string(row.bench.kind) << std::setw(18) << shape_label(row.bench.size) << std::right
       << std::setw(16) << row.result.ops.multiplies << std::setw(16) << row.result.ops.additions
       << std::setw(18) << hex64(row.result.checksum) << '\n';
  }
  return os.str();
}

void emit_csv(const BenchReport& report, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& row : report.rows) write_row(out, row);
}

void emit_csv(const BenchReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportIoError("cannot open '" + path.string() + "' for writing");
  emit_csv(report, out);
  out.flush();
  if (!out) throw ReportIoError("write to '" + path.string() + "' failed");
}

void emit_plot_data(const BenchReport& report, std::ostream& out) {
  out << "figure," << kCsvHeader << '\n';
  const auto group = [&](std::string_view figure, auto&& keep) {
    for (const auto& row : report.rows) {
      if (!keep(row.bench.impl)) continue;
      out << figure << ',';
      write_row(out, row);
    }
  };
  group("time_by_impl", [](Impl i) { return is_matmul(i); });
  group("shared_vs_global", [](Impl i) { return i == Impl::tiled || i == Impl::global; });
  group("op_counts", [](Impl i) { return !is_matmul(i); });
}

void emit_plot_data(const BenchReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportIoError("cannot open '" + path.string() + "' for writing");
  emit_plot_data(report, out);
  out.flush();
  if (!out) throw ReportIoError("write to '" + path.string() + "' failed");
}

BenchReport parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::invalid_argument("unexpected CSV header '" + line + "'");

  BenchReport report;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_fields(line);
    if (f.size() != 13) {
      throw std::invalid_argument("CSV row has " + std::to_string(f.size()) +
                                  " fields, expected 13");
    }
    BenchRow row;
    row.bench.impl = parse_impl(f[0]);
    row.bench.kind = parse_scalar_kind(f[1]);
    row.bench.size = {parse_number<std::size_t>(f[2]), parse_number<std::size_t>(f[3]),
                      parse_number<std::size_t>(f[4])};
    row.bench.block_side = parse_number<std::size_t>(f[5]);
    row.bench.reps = parse_number<std::size_t>(f[6]);
    if (f[7].empty()) {
      row.result.skipped = true;
    } else {
      row.result.median_s = parse_number<double>(f[7]);
      row.result.min_s = parse_number<double>(f[8]);
      row.result.ops = {parse_number<std::uint64_t>(f[9]), parse_number<std::uint64_t>(f[10])};
      row.result.checksum = parse_number<std::uint64_t>(f[11], 16);
      if (!f[12].empty()) row.speedup = parse_number<double>(f[12]);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace simtlab::bench
