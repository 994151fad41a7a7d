#include "simtlab/scalar.hpp"

#include <stdexcept>
#include <string>

namespace simtlab {

std::string_view to_string(ScalarKind kind) noexcept {
  switch (kind) {
    case ScalarKind::f32: return "f32";
    case ScalarKind::f64: return "f64";
    case ScalarKind::c64: return "c64";
  }
  return "?";
}

ScalarKind parse_scalar_kind(std::string_view text) {
  if (text == "f32" || text == "float32") return ScalarKind::f32;
  if (text == "f64" || text == "float64") return ScalarKind::f64;
  if (text == "c64" || text == "complex64") return ScalarKind::c64;
  throw std::invalid_argument("unknown scalar kind '" + std::string(text) + "'");
}

}  // namespace simtlab
