#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lelong/linalg.hpp"

namespace lelong {

/// Ball of radius `ball_radius` centred at the origin of C^n.
struct Domain {
  double ball_radius = 1.0;
  int ambient_dim = 2;
};

/// c * rho^{2a}
struct Monomial {
  double coeff = 0.0;
  double exponent = 0.0;
};

/// e * ( -(-log rho^2)^delta ),  0 < delta <= 1
struct LogPower {
  double coeff = 0.0;
  double delta = 1.0;
};

/// u(rho) = sum c_m rho^{2a_m} + d log rho^2 - sum e_j (-log rho^2)^{delta_j}.
///
/// Most of the machinery works in s = rho^2; `g`, `dg`, `d2g` are u and its
/// first two derivatives as functions of s.
class RadialDensity {
 public:
  RadialDensity() = default;
  explicit RadialDensity(std::vector<Monomial> monomials, double log_coeff = 0.0,
                         std::vector<LogPower> log_powers = {});

  const std::vector<Monomial>& monomials() const { return monomials_; }
  double log_coeff() const { return log_coeff_; }
  const std::vector<LogPower>& log_powers() const { return log_powers_; }

  bool has_log_terms() const;
  bool is_zero() const;

  double operator()(double rho) const { return g(rho * rho); }
  double g(double s) const;
  double dg(double s) const;
  double d2g(double s) const;
  /// (s g'(s))' = g' + s g'', the radial eigenvalue of the complex Hessian.
  double d_sdg(double s) const;

  /// Euclidean Laplacian of u(|w|) in R^{2p}, away from the origin.
  double laplacian(double rho, int p) const;

  RadialDensity scaled(double lambda) const;
  friend RadialDensity operator+(const RadialDensity& a, const RadialDensity& b);

 private:
  std::vector<Monomial> monomials_;
  double log_coeff_ = 0.0;
  std::vector<LogPower> log_powers_;
};

/// dd^c of u(|w|)[C^p]: a point mass at 0 (dd^c units) plus a radial density
/// given as the Euclidean Laplacian.
struct LaplacianDecomposition {
  double atom_mass = 0.0;
  std::function<double(double)> ac_density;
};

LaplacianDecomposition laplacian_decomposition(const RadialDensity& density, int p);

enum class CurrentKind { Subspace, Smooth };
enum class SignClass { Zero, Nonpositive, Nonnegative, Mixed };

struct PshReport {
  bool passed = false;
  double atom_mass = 0.0;
  double min_ac_density = 0.0;
  double min_eigen_sum = 0.0;
  std::optional<double> first_failure_rho;
  std::string message;
};

/// T = u(|w|)[z_1 = ... = z_{n-p} = 0]  (Subspace), or
/// T = u(|z|) beta_0^{n-p}               (Smooth),  beta_0 = dd^c|z|^2.
///
/// Construction checks the structural invariants and runs the psh and sign
/// checks once; the results are cached.
class ModelCurrent {
 public:
  ModelCurrent(CurrentKind kind, Domain domain, int bidim, RadialDensity density);

  CurrentKind kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  int ambient_dim() const { return domain_.ambient_dim; }
  int bidim() const { return bidim_; }
  const RadialDensity& density() const { return density_; }
  SignClass sign_class() const { return sign_class_; }
  const PshReport& psh_report() const { return psh_; }
  bool is_psh() const { return psh_.passed; }
  bool nonpositive() const;
  bool nonnegative() const;

  /// Complex dimension of the space the density lives on (p or n).
  int integration_dim() const;
  /// Number of beta_0 factors in the wedge products (0 or n-p).
  int background_power() const;

  ModelCurrent with_density(RadialDensity density) const;

 private:
  CurrentKind kind_;
  Domain domain_;
  int bidim_;
  RadialDensity density_;
  SignClass sign_class_ = SignClass::Mixed;
  PshReport psh_;
};

PshReport validate_psh(const ModelCurrent& current);
SignClass compute_sign_class(const RadialDensity& density, double ball_radius);

/// Geometric validation grid: 512 points in (R 1e-6, R].
std::vector<double> validation_grid(double ball_radius);

inline constexpr double kPshTolerance = 1e-12;

/// Named values substituted for "$name" strings in a spec document.
using SpecParameters = std::map<std::string, double, std::less<>>;

/// Parses the current JSON schema and rejects non-psh currents.
ModelCurrent parse_current(std::string_view json_text, const SpecParameters& params = {});

enum class WeightKind { IsotropicPower, Anisotropic, Shifted };

/// phi(z) = scale * base(z)^exponent, where base is
///   offset + |z - center|^2          (IsotropicPower, Shifted)
///   sum_j |z_j|^{2 b_j}              (Anisotropic).
/// log(base) is psh in every case, so phi and log(phi) are psh.
class Weight {
 public:
  static Weight isotropic_power(const Domain& domain, double k,
                                std::optional<double> radius = std::nullopt);
  static Weight anisotropic(const Domain& domain, std::vector<double> b,
                            std::optional<double> radius = std::nullopt);
  static Weight shifted(const Domain& domain, std::vector<cplx> center, double k,
                        std::optional<double> radius = std::nullopt);

  WeightKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double exponent() const { return exponent_; }
  double scale() const { return scale_; }
  double offset() const { return offset_; }
  const std::vector<double>& b() const { return b_; }
  const std::vector<cplx>& center() const { return center_; }
  /// R(phi): B_phi(R) is relatively compact in the domain ball.
  double domain_radius() const { return radius_; }

  /// phi^j
  Weight power(double j) const;
  /// s * phi
  Weight scaled(double s) const;
  /// Same weight with an explicit R(phi); rejects radii that are not semi-exhaustive.
  Weight with_radius(double radius, const Domain& domain) const;

  double value(std::span<const cplx> z) const;
  /// Value, holomorphic gradient (d phi / d z_j) and complex Hessian
  /// (d^2 phi / dz_j dzbar_k).
  void derivatives(std::span<const cplx> z, double& phi, CVec& grad, CMat& hess) const;
  /// Complex Hessian of log phi.
  CMat log_hessian(std::span<const cplx> z) const;

  /// Every z with phi(z) < r satisfies |z| <= bounding_radius(r).
  double bounding_radius(double r) const;
  /// Supremum of radii r with B_phi(r) inside the open ball of radius `ball`.
  double exhaustion_limit(double ball) const;

  /// Trace on the coordinate subspace {z_1 = ... = z_{n-p} = 0}.
  Weight restricted_to_tail(int p) const;
  /// k with phi = scale * |z|^{2k}, when phi has that form.
  std::optional<double> pure_power_exponent() const;

 private:
  Weight() = default;
  void set_radius(const Domain& domain, std::optional<double> radius);
  double base_value(std::span<const cplx> z) const;

  WeightKind kind_ = WeightKind::IsotropicPower;
  int dim_ = 0;
  double exponent_ = 1.0;
  double scale_ = 1.0;
  double offset_ = 0.0;
  std::vector<double> b_;
  std::vector<cplx> center_;
  double radius_ = 0.0;
};

/// Parses either the JSON weight schema or the micro-syntax
/// `pow:k=K`, `aniso:b=B1,B2,...`, `shifted:k=K,c=RE:IM;RE:IM`
/// (optional `,R=...` and `,s=...` for the domain radius and a scale factor).
Weight parse_weight(std::string_view text, const Domain& domain,
                    const SpecParameters& params = {});

struct PurePower {
  double k = 1.0;
  double scale = 1.0;
};

/// Weight on the integration space of a current, with its pure-power form
/// when the trace is scale * rho^{2k}.
struct RestrictedWeight {
  Weight field;
  std::optional<PurePower> pure;
  std::string warning;

  bool is_pure() const { return pure.has_value(); }
};

RestrictedWeight restrict_weight(const Weight& weight, const ModelCurrent& current);

/// {k > 0 : phi^k in PSH(T, Omega)} as an interval (k_min, k_max).
struct PowersDomain {
  double k_min = 0.0;
  double k_max = 0.0;
  bool min_included = false;
  std::string basis;

  bool contains(double k) const;
  bool unbounded() const;
};

PowersDomain powers_domain(const ModelCurrent& current, const Weight& weight);

std::string to_string(CurrentKind kind);
std::string to_string(SignClass sign);

}  // namespace lelong
