#include "cli.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simtlab/bench.hpp"
#include "simtlab/engine.hpp"
#include "simtlab/kernels.hpp"
#include "simtlab/matrix.hpp"
#include "simtlab/matrix_io.hpp"
#include "simtlab/reference.hpp"

namespace simtlab::cli {

namespace {

namespace fs = std::filesystem;
using bench::Impl;
using bench::InputFill;

// Flag values that parse but make no sense together.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ec == std::errc{} ? end : buf.data());
}

std::string hex(std::uint64_t v) {
  std::array<char, 17> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + 16, v, 16);
  std::string s(buf.data(), end);
  return "0x" + std::string(16 - s.size(), '0') + s;
}

InputFill parse_fill(const std::string& s) {
  if (s == "random") return InputFill::random;
  if (s == "integer") return InputFill::integer;
  throw UsageError("unknown fill '" + s + "' (expected random or integer)");
}

Fill fill_for(InputFill f, std::uint64_t seed) {
  if (f == InputFill::integer) return SeededInteger{seed};
  return SeededRandom{seed};
}

std::vector<ScalarKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<ScalarKind> kinds;
  for (const auto& n : names) kinds.push_back(parse_scalar_kind(n));
  return kinds;
}

std::vector<Impl> parse_impls(const std::vector<std::string>& names) {
  std::vector<Impl> impls;
  for (const auto& n : names) impls.push_back(bench::parse_impl(n));
  return impls;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::optional<std::string> strassen_obstacle(const AnyMatrix& a, const AnyMatrix& b,
                                             std::size_t cutoff) {
  if (kind_of(a) == ScalarKind::c64) return "real_kind: Strassen is implemented for f32/f64 only";
  const std::size_t n = rows_of(a);
  if (cols_of(a) != n || rows_of(b) != n || cols_of(b) != n) {
    return "square: Strassen needs equal square operands";
  }
  if (!is_power_of_two(n)) return "power_of_two: side " + std::to_string(n) + " is not a power of two";
  if (cutoff == 0) return "cutoff: must be >= 1";
  return std::nullopt;
}

// Tolerances on rel_frobenius when the comparison is not required to be exact.
double tolerance(ScalarKind kind, Impl impl) {
  if (impl == Impl::strassen) return kind == ScalarKind::f64 ? 1e-12 : 1e-4;
  return kind == ScalarKind::f64 ? 1e-13 : 1e-6;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::size_t size = 64;
  std::vector<std::string> kinds{"f64"};
  std::size_t block = 16;
  std::uint64_t seed = 42;
  std::vector<std::string> impls;
  std::string fill = "random";
  std::string profile = "modern";
  std::size_t cutoff = 64;
  std::string a_path;
  std::string b_path;
  std::string dump_dir;
};

AnyMatrix compute(Impl impl, const AnyMatrix& a, const AnyMatrix& b,
                  const kernels::KernelOptions& kopts, std::size_t cutoff) {
  switch (impl) {
    case Impl::single_block: return kernels::run_matmul(kernels::MatmulKernel::single_block, a, b, kopts);
    case Impl::global: return kernels::run_matmul(kernels::MatmulKernel::global, a, b, kopts);
    case Impl::tiled: return kernels::run_matmul(kernels::MatmulKernel::tiled, a, b, kopts);
    case Impl::strassen: return matmul_strassen(a, b, StrassenConfig{cutoff});
    default: return matmul_sequential(a, b);
  }
}

int run_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  const bool explicit_impls = !o.impls.empty();
  std::vector<Impl> impls;
  if (explicit_impls) {
    for (Impl impl : parse_impls(o.impls)) {
      if (!bench::is_matmul(impl) || impl == Impl::seq) {
        throw UsageError("verify checks matmul implementations against seq; '" +
                         std::string(bench::to_string(impl)) + "' is not one");
      }
      impls.push_back(impl);
    }
  } else {
    impls = {Impl::single_block, Impl::global, Impl::tiled, Impl::strassen};
  }
  const InputFill fill = parse_fill(o.fill);
  const kernels::KernelOptions kopts{o.block, simt::profile_by_name(o.profile), 0};

  std::vector<std::pair<AnyMatrix, AnyMatrix>> problems;
  if (!o.a_path.empty() || !o.b_path.empty()) {
    if (o.a_path.empty() || o.b_path.empty()) throw UsageError("--a and --b go together");
    problems.emplace_back(read_matrix(o.a_path), read_matrix(o.b_path));
  } else {
    for (ScalarKind kind : parse_kinds(o.kinds)) {
      problems.emplace_back(make_any_matrix(o.size, o.size, kind, fill_for(fill, o.seed)),
                            make_any_matrix(o.size, o.size, kind, fill_for(fill, o.seed + 1)));
    }
  }
  if (!o.dump_dir.empty()) fs::create_directories(o.dump_dir);

  std::size_t failures = 0, checked = 0;
  bool infeasible = false;
  for (const auto& [a, b] : problems) {
    const ScalarKind kind = kind_of(a);
    if (kind_of(b) != kind) throw UsageError("operands have different kinds");
    if (cols_of(a) != rows_of(b)) {
      throw UsageError("inner dimensions differ: " + std::to_string(cols_of(a)) + " vs " +
                       std::to_string(rows_of(b)));
    }
    const auto ref = matmul_sequential(a, b);
    const bool exact = fill == InputFill::integer && kind == ScalarKind::f64;

    out << "verify " << rows_of(a) << "x" << cols_of(a) << "x" << cols_of(b) << " "
        << to_string(kind) << ", fill " << o.fill << ", block " << o.block << ", profile "
        << kopts.profile.label << ", workers " << simt::default_workers() << '\n';
    out << "  " << std::left << std::setw(14) << "seq" << "reference  checksum " << hex(checksum(ref))
        << '\n';
    const auto dump = [&](std::string_view name, const AnyMatrix& m) {
      if (o.dump_dir.empty()) return;
      write_matrix(fs::path(o.dump_dir) / (std::string(name) + "_" + std::string(to_string(kind)) + ".stmx"), m);
    };
    dump("seq", ref);

    for (Impl impl : impls) {
      const auto name = bench::to_string(impl);
      std::optional<AnyMatrix> c;
      std::string why;
      if (impl == Impl::strassen) {
        if (auto obstacle = strassen_obstacle(a, b, o.cutoff)) {
          why = *obstacle;
        } else {
          c = compute(impl, a, b, kopts, o.cutoff);
        }
      } else {
        try {
          c = compute(impl, a, b, kopts, o.cutoff);
        } catch (const simt::LaunchError& e) {
          why = e.violations().front().rule + ": " + e.violations().front().message;
        }
      }
      if (!c) {
        if (explicit_impls) {
          err << "simtlab verify: " << name << " infeasible (" << why << ")\n";
          infeasible = true;
        } else {
          out << "  " << std::left << std::setw(14) << name << "skipped (" << why << ")\n";
        }
        continue;
      }

      const auto metric = compare(*c, ref);
      const bool bitwise = bitwise_equal(*c, ref);
      const double tol = tolerance(kind, impl);
      const bool pass = exact ? bitwise : metric.rel_frobenius <= tol;
      ++checked;
      if (!pass) ++failures;
      out << "  " << std::left << std::setw(14) << name << "rel_frobenius " << fmt(metric.rel_frobenius)
          << "  max_abs " << fmt(metric.max_abs) << "  bitwise " << (bitwise ? "yes" : "no")
          << "  checksum " << hex(checksum(*c)) << "  "
          << (pass ? "ok" : "FAIL") << " (" << (exact ? "exact" : "tol " + fmt(tol)) << ")\n";
      dump(name, *c);
    }
  }

  out << checked - failures << " of " << checked << " within tolerance\n";
  if (failures > 0) return kVerifyFailed;
  if (infeasible) return kInfeasible;
  return kOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  std::vector<std::size_t> sizes{256, 512, 1024};
  std::vector<std::size_t> ew_sizes{4096};
  std::vector<std::string> kinds{"f32", "f64", "c64"};
  std::vector<std::string> impls{"seq",      "single_block",    "global",
                                 "tiled",    "strassen",        "elementwise_seq",
                                 "elementwise_kernel"};
  std::size_t block = 16;
  std::size_t reps = 3;
  std::string baseline;
  std::string csv;
  std::string plot;
  std::uint64_t seed = 42;
  std::string fill = "random";
  std::size_t cutoff = 64;
  std::string profile = "modern";
  bool quiet = false;
};

int run_bench(const BenchOptions& o, bool sizes_given, bool ew_given, std::ostream& out,
              std::ostream& err) {
  const auto kinds = parse_kinds(o.kinds);
  const auto impls = parse_impls(o.impls);
  const InputFill fill = parse_fill(o.fill);
  const auto profile = simt::profile_by_name(o.profile);

  Impl baseline = impls.front();
  if (!o.baseline.empty()) {
    baseline = bench::parse_impl(o.baseline);
    if (std::find(impls.begin(), impls.end(), baseline) == impls.end()) {
      throw UsageError("baseline '" + o.baseline + "' is not among --impls");
    }
  } else if (std::find(impls.begin(), impls.end(), Impl::seq) != impls.end()) {
    baseline = Impl::seq;
  }

  // --sizes also drives elementwise cases unless --ew-sizes is given.
  const auto& ew_sizes = ew_given || !sizes_given ? o.ew_sizes : o.sizes;

  const auto make = [&](Impl impl, ScalarKind kind, std::size_t n) {
    bench::BenchCase c;
    c.impl = impl;
    c.kind = kind;
    c.size = {n, bench::is_matmul(impl) ? n : 1, n};
    c.block_side = o.block;
    c.reps = o.reps;
    c.seed = o.seed;
    c.fill = fill;
    c.strassen_cutoff = o.cutoff;
    c.profile = profile;
    bench::validate_case(c);
    return c;
  };
  std::vector<bench::BenchCase> cases;
  for (std::size_t n : o.sizes) {
    for (ScalarKind k : kinds) {
      for (Impl impl : impls) {
        if (bench::is_matmul(impl)) cases.push_back(make(impl, k, n));
      }
    }
  }
  for (std::size_t n : ew_sizes) {
    for (ScalarKind k : kinds) {
      for (Impl impl : impls) {
        if (!bench::is_matmul(impl)) cases.push_back(make(impl, k, n));
      }
    }
  }
  if (cases.empty()) throw UsageError("empty benchmark lattice");

  auto report = bench::run_suite(cases, o.quiet ? nullptr : &err);

  std::string table;
  try {
    table = bench::speedup_table(report, baseline);
    bench::apply_speedups(report, baseline);
  } catch (const std::invalid_argument& e) {
    err << "simtlab bench: " << e.what() << '\n';
    if (!o.csv.empty()) bench::emit_csv(report, fs::path(o.csv));
    return kInfeasible;
  }
  out << table;
  if (!o.csv.empty()) bench::emit_csv(report, fs::path(o.csv));
  if (!o.plot.empty()) bench::emit_plot_data(report, fs::path(o.plot));
  return kOk;
}

// ---------------------------------------------------------------------------
// budget

struct BudgetOptions {
  std::size_t block = 16;
  std::size_t tiles = 2;
  std::size_t elem_bytes = 4;
  std::string profile = "modern";
};

int run_budget(const BudgetOptions& o, std::ostream& out) {
  const auto profile = simt::profile_by_name(o.profile);
  const std::size_t bytes = simt::shared_budget(o.block, o.tiles, o.elem_bytes);
  const std::size_t threads = o.block * o.block;
  const bool bytes_fit = bytes <= profile.shared_mem_bytes_per_block;
  const bool threads_fit = threads <= profile.max_threads_per_block;
  out << bytes << " B, " << (bytes_fit ? "fits" : "exceeds") << " ("
      << profile.shared_mem_bytes_per_block << " B limit)\n";
  out << threads << " threads per " << o.block << "x" << o.block << " block, "
      << (threads_fit ? "fits" : "exceeds") << " (" << profile.max_threads_per_block
      << " thread limit, " << profile.label << ")\n";
  return bytes_fit && threads_fit ? kOk : kInfeasible;
}

// ---------------------------------------------------------------------------
// demo

inline constexpr std::size_t kDemoCap = 8;

int run_demo(const std::vector<std::size_t>& grid, const std::vector<std::size_t>& block,
             std::ostream& out) {
  for (std::size_t v : {grid[0], grid[1], block[0], block[1]}) {
    if (v == 0 || v > kDemoCap) {
      throw UsageError("demo dimensions must be between 1 and " + std::to_string(kDemoCap) +
                       " per axis");
    }
  }
  const simt::Dim2 g{grid[0], grid[1]};
  const simt::Dim2 b{block[0], block[1]};
  const std::size_t rows = g.y * b.y;
  const std::size_t cols = g.x * b.x;

  // Same coordinate arithmetic as the matmul kernels: row from y, column from x.
  std::vector<std::string> lines(g.count() * b.count());
  simt::launch(
      {g, b, 0, simt::DeviceProfile::modern()},
      [&](simt::KernelContext& ctx) -> simt::ThreadTask {
        const auto bi = ctx.block_idx(), ti = ctx.thread_idx();
        const std::size_t row = bi.y * b.y + ti.y;
        const std::size_t col = bi.x * b.x + ti.x;
        lines[(bi.y * g.x + bi.x) * b.count() + ti.y * b.x + ti.x] =
            "block (x=" + std::to_string(bi.x) + ", y=" + std::to_string(bi.y) + ") thread (x=" +
            std::to_string(ti.x) + ", y=" + std::to_string(ti.y) + ") -> row " +
            std::to_string(row) + ", col " + std::to_string(col);
        co_return;
      },
      {1});

  out << "grid " << simt::to_string(g) << ", block " << simt::to_string(b) << ": C is " << rows
      << "x" << cols << ", one element per thread\n";
  for (const auto& line : lines) out << line << '\n';
  return kOk;
}

template <class F>
int guarded(std::string_view command, std::ostream& err, F&& body) {
  const std::string prefix = "simtlab " + std::string(command) + ": ";
  try {
    return body();
  } catch (const UsageError& e) {
    err << prefix << e.what() << '\n';
    return kUsage;
  } catch (const simt::LaunchError& e) {
    err << prefix << e.what() << '\n';
    return kInfeasible;
  } catch (const MatrixIoError& e) {
    err << prefix << e.what() << '\n';
    return kIoError;
  } catch (const bench::ReportIoError& e) {
    err << prefix << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << prefix << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << prefix << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << prefix << e.what() << '\n';
    return kVerifyFailed;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Host-side SIMT model of classic GPU matrix kernels", "simtlab"};
  app.require_subcommand(1);
  app.footer("Exit status: 0 ok, 1 verification failed, 2 usage, 3 infeasible config, 4 I/O.\n"
             "SIMT_WORKERS sets the number of host workers.");

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Check kernels against the sequential product");
  verify->add_option("--size", vo.size, "Side of the square operands")->check(CLI::PositiveNumber)->capture_default_str();
  verify->add_option("--kind,--kinds", vo.kinds, "f32, f64, c64 (comma list)")->delimiter(',')->capture_default_str();
  verify->add_option("--block", vo.block, "Block side for kernel launches")->check(CLI::PositiveNumber)->capture_default_str();
  verify->add_option("--seed", vo.seed, "Seed for A; B uses seed + 1")->capture_default_str();
  verify->add_option("--impl,--impls", vo.impls, "single_block, global, tiled, strassen (default all)")->delimiter(',');
  verify->add_option("--fill", vo.fill, "random or integer")->capture_default_str();
  verify->add_option("--profile", vo.profile, "legacy or modern")->capture_default_str();
  verify->add_option("--cutoff", vo.cutoff, "Strassen cutoff side")->check(CLI::PositiveNumber)->capture_default_str();
  verify->add_option("--a", vo.a_path, "Read A from an STMX file");
  verify->add_option("--b", vo.b_path, "Read B from an STMX file");
  verify->add_option("--dump", vo.dump_dir, "Write every output matrix as STMX into this directory");

  BenchOptions bo;
  auto* bench_cmd = app.add_subcommand("bench", "Time implementations and print a speedup table");
  auto* sizes_opt = bench_cmd->add_option("--sizes", bo.sizes, "Matmul sides (comma list)")
                        ->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
  auto* ew_opt = bench_cmd->add_option("--ew-sizes", bo.ew_sizes, "Elementwise sides (comma list)")
                     ->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--kinds,--kind", bo.kinds, "Scalar kinds (comma list)")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--impls,--impl", bo.impls, "Implementations (comma list)")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--block", bo.block, "Block side")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--reps", bo.reps, "Repetitions per case")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--baseline", bo.baseline, "Speedup baseline (default seq, else first impl)");
  bench_cmd->add_option("--csv", bo.csv, "Write the report as CSV");
  bench_cmd->add_option("--plot", bo.plot, "Write plot data grouped per figure");
  bench_cmd->add_option("--seed", bo.seed, "Input seed")->capture_default_str();
  bench_cmd->add_option("--fill", bo.fill, "random or integer")->capture_default_str();
  bench_cmd->add_option("--cutoff", bo.cutoff, "Strassen cutoff side")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--profile", bo.profile, "legacy or modern")->capture_default_str();
  bench_cmd->add_flag("--quiet", bo.quiet, "No per-case progress on stderr");

  BudgetOptions go;
  auto* budget = app.add_subcommand("budget", "Shared-memory budget of a tiled launch");
  budget->add_option("--block", go.block, "Block side")->required()->check(CLI::PositiveNumber);
  budget->add_option("--tiles", go.tiles, "Tiles held in shared memory")->check(CLI::PositiveNumber)->capture_default_str();
  budget->add_option("--elem-bytes", go.elem_bytes, "Bytes per element")->check(CLI::PositiveNumber)->capture_default_str();
  budget->add_option("--profile", go.profile, "legacy or modern")->capture_default_str();

  std::vector<std::size_t> demo_grid{1, 1};
  std::vector<std::size_t> demo_block{3, 3};
  auto* demo = app.add_subcommand("demo", "Print which thread owns which output element");
  demo->add_option("--grid", demo_grid, "gx,gy (each <= 8)")->delimiter(',')->expected(2)->capture_default_str();
  demo->add_option("--block", demo_block, "bx,by (each <= 8)")->delimiter(',')->expected(2)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "simtlab: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  if (*verify) return guarded("verify", err, [&] { return run_verify(vo, out, err); });
  if (*bench_cmd) {
    return guarded("bench", err, [&] {
      return run_bench(bo, sizes_opt->count() > 0, ew_opt->count() > 0, out, err);
    });
  }
  if (*budget) return guarded("budget", err, [&] { return run_budget(go, out); });
  return guarded("demo", err, [&] { return run_demo(demo_grid, demo_block, out); });
}

}  // namespace simtlab::cli
