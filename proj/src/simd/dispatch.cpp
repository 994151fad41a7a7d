#include <cstdlib>
#include <stdexcept>
#include <string>

#include "simtlab/simd/row_ops.hpp"

namespace simtlab::simd {

namespace {

std::vector<Isa> detect() {
  std::vector<Isa> isas{Isa::scalar};
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) isas.push_back(Isa::avx2);
#elif defined(__aarch64__)
  isas.push_back(Isa::neon);
#endif
  return isas;
}

Isa choose() {
  const auto& isas = available_isas();
  if (const char* env = std::getenv("SIMTLAB_ISA"); env != nullptr && *env != '\0') {
    for (Isa isa : isas) {
      if (to_string(isa) == env) return isa;
    }
    throw std::invalid_argument(std::string("SIMTLAB_ISA=") + env +
                                " is not available on this host");
  }
  return isas.back();
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

const std::vector<Isa>& available_isas() {
  static const std::vector<Isa> isas = detect();
  return isas;
}

Isa active_isa() {
  static const Isa isa = choose();
  return isa;
}

template <Scalar T>
const RowOps<T>& row_ops(Isa isa) {
  bool supported = false;
  for (Isa a : available_isas()) supported = supported || a == isa;
  if (!supported) {
    throw std::invalid_argument("ISA " + std::string(to_string(isa)) +
                                " is not available on this host");
  }
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return avx2_row_ops<T>();
#elif defined(__aarch64__)
    case Isa::neon: return neon_row_ops<T>();
#endif
    default: return scalar_row_ops<T>();
  }
}

template const RowOps<float>& row_ops<float>(Isa);
template const RowOps<double>& row_ops<double>(Isa);
template const RowOps<c64>& row_ops<c64>(Isa);

}  // namespace simtlab::simd
