#include "lelong/forms.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace lelong {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

int dimension(std::span<const FormFactor> factors) {
  int m = 0;
  for (const auto& f : factors) m += f.count;
  return m;
}

}  // namespace

double mixed_discriminant(std::span<const FormFactor> factors) {
  const int m = dimension(factors);
  std::vector<const FormFactor*> used;
  for (const auto& f : factors) {
    if (f.count > 0) used.push_back(&f);
  }
  if (used.size() == 1) return used.front()->matrix->determinant().real();

  // Polarisation: m! D = sum over sub-multisets of (-1)^{m-|S|} det(sum_S H).
  const int dim = static_cast<int>(used.front()->matrix->rows());
  double total = 0.0;
  std::vector<int> pick(used.size(), 0);
  while (true) {
    int size = 0;
    double weight = 1.0;
    CMat sum = CMat::Zero(dim, dim);
    for (std::size_t g = 0; g < used.size(); ++g) {
      size += pick[g];
      weight *= binomial(used[g]->count, pick[g]);
      if (pick[g] > 0) sum += static_cast<double>(pick[g]) * *used[g]->matrix;
    }
    if (size > 0) {
      const double sign = (m - size) % 2 == 0 ? 1.0 : -1.0;
      total += sign * weight * sum.determinant().real();
    }
    std::size_t g = 0;
    while (g < used.size() && pick[g] == used[g]->count) pick[g++] = 0;
    if (g == used.size()) break;
    ++pick[g];
  }
  return total / factorial(m);
}

double top_form_density(std::span<const FormFactor> factors) {
  const int m = dimension(factors);
  return factorial(m) * std::pow(2.0 / std::numbers::pi, m) * mixed_discriminant(factors);
}

CMat density_hessian(const RadialDensity& density, std::span<const cplx> z) {
  const int m = static_cast<int>(z.size());
  double s = 0.0;
  for (const auto& c : z) s += std::norm(c);
  CVec zbar(m);
  for (int j = 0; j < m; ++j) zbar(j) = std::conj(z[j]);
  // g' on the complement of zbar, (s g')' along it; written with the
  // projector so the radial eigenvalue is not a difference of large terms.
  const CMat proj = (zbar * zbar.adjoint()) / s;
  CMat h = density.dg(s) * (CMat::Identity(m, m) - proj) + density.d_sdg(s) * proj;
  return h;
}

PointDensity form_density(const ModelCurrent& current, const Weight& field, FormKind kind,
                          std::span<const cplx> z) {
  const int m = current.integration_dim();
  const int q = current.background_power();
  const int p = current.bidim();
  const CMat eye = CMat::Identity(m, m);

  PointDensity out;
  CVec grad(m);
  CMat hphi(m, m);
  field.derivatives(z, out.phi, grad, hphi);

  double rho2 = 0.0;
  for (const auto& c : z) rho2 += std::norm(c);
  switch (kind) {
    case FormKind::Mass: {
      const FormFactor f[] = {{&eye, q}, {&hphi, p}};
      out.density = current.density().g(rho2) * top_form_density(f);
      break;
    }
    case FormKind::Ddc: {
      const CMat hu = density_hessian(current.density(), z);
      const FormFactor f[] = {{&hu, 1}, {&eye, q}, {&hphi, p - 1}};
      out.density = top_form_density(f);
      break;
    }
    case FormKind::Alpha: {
      const CMat hlog = field.log_hessian(z);
      const FormFactor f[] = {{&eye, q}, {&hlog, p}};
      out.density = current.density().g(rho2) * top_form_density(f);
      break;
    }
  }
  return out;
}

}  // namespace lelong
