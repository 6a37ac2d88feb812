#pragma once

#include <span>

#include "lelong/current_model.hpp"
#include "lelong/linalg.hpp"

namespace lelong {

/// A Hermitian coefficient matrix repeated `count` times in a wedge product.
struct FormFactor {
  const CMat* matrix = nullptr;
  int count = 0;
};

/// Mixed discriminant D(H_1, ..., H_m), normalised so that D(H, ..., H) = det H.
double mixed_discriminant(std::span<const FormFactor> factors);

/// Lebesgue density of w_1 ^ ... ^ w_m on C^m, where w = (i/pi) sum H_jk dz_j ^ dzbar_k.
double top_form_density(std::span<const FormFactor> factors);

/// Which of the three measures of a current against a weight.
enum class FormKind {
  Mass,  ///< T ^ beta_phi^p
  Ddc,   ///< dd^c T ^ beta_phi^{p-1}, absolutely continuous part
  Alpha  ///< T ^ alpha_phi^p
};

struct PointDensity {
  double phi = 0.0;
  double density = 0.0;
};

/// Pointwise density of the chosen measure at z in the integration space of
/// the current (C^p for subspace currents, C^n for smooth ones). `field` is the
/// weight restricted to that space.
PointDensity form_density(const ModelCurrent& current, const Weight& field, FormKind kind,
                          std::span<const cplx> z);

/// Complex Hessian of u(|z|) on C^m.
CMat density_hessian(const RadialDensity& density, std::span<const cplx> z);

}  // namespace lelong
