#pragma once

#include <cstdint>
#include <string>

#include "lelong/quadrature.hpp"

namespace lelong {

/// Requested evaluation route. Auto picks closed form when the weight's trace
/// on the current is a pure power and Monte Carlo otherwise.
enum class Engine { Auto, Closed, Quad, MonteCarlo };

/// Route that actually produced a value.
enum class Method { ClosedForm, Quadrature, MonteCarlo };

struct McOptions {
  long samples = 200000;
  std::uint64_t seed = 0;
  int threads = 0;  ///< 0: hardware concurrency
};

struct EvalOptions {
  Engine engine = Engine::Auto;
  QuadratureOptions quad = default_quadrature_options();
  McOptions mc;
};

std::string to_string(Engine engine);
std::string to_string(Method method);
Engine parse_engine(const std::string& text);

}  // namespace lelong
