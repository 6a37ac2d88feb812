#include "lelong/current_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lelong/errors.hpp"

namespace lelong {

namespace {

bool is_finite(double x) { return std::isfinite(x); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- density

RadialDensity::RadialDensity(std::vector<Monomial> monomials, double log_coeff,
                             std::vector<LogPower> log_powers)
    : monomials_(std::move(monomials)), log_coeff_(log_coeff), log_powers_(std::move(log_powers)) {
  for (const auto& m : monomials_) {
    if (!is_finite(m.coeff) || !is_finite(m.exponent) || m.exponent < 0.0) {
      throw InputError("monomial exponents must be finite and nonnegative");
    }
  }
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    for (std::size_t j = i + 1; j < monomials_.size(); ++j) {
      if (monomials_[i].exponent == monomials_[j].exponent) {
        throw InputError("monomial exponents must be pairwise distinct");
      }
    }
  }
  if (!is_finite(log_coeff_)) throw InputError("log coefficient must be finite");
  for (const auto& lp : log_powers_) {
    if (!is_finite(lp.coeff) || !(lp.delta > 0.0 && lp.delta <= 1.0)) {
      throw InputError("log-power exponents must lie in (0, 1]");
    }
  }
}

bool RadialDensity::has_log_terms() const {
  if (log_coeff_ != 0.0) return true;
  return std::any_of(log_powers_.begin(), log_powers_.end(),
                     [](const LogPower& lp) { return lp.coeff != 0.0; });
}

bool RadialDensity::is_zero() const {
  return !has_log_terms() && std::all_of(monomials_.begin(), monomials_.end(),
                                         [](const Monomial& m) { return m.coeff == 0.0; });
}

double RadialDensity::g(double s) const {
  double v = 0.0;
  for (const auto& m : monomials_) v += m.coeff * std::pow(s, m.exponent);
  if (log_coeff_ != 0.0) v += log_coeff_ * std::log(s);
  for (const auto& lp : log_powers_) {
    if (lp.coeff != 0.0) v -= lp.coeff * std::pow(-std::log(s), lp.delta);
  }
  return v;
}

double RadialDensity::dg(double s) const {
  double v = 0.0;
  for (const auto& m : monomials_) {
    if (m.exponent != 0.0) v += m.coeff * m.exponent * std::pow(s, m.exponent - 1.0);
  }
  if (log_coeff_ != 0.0) v += log_coeff_ / s;
  for (const auto& lp : log_powers_) {
    if (lp.coeff == 0.0) continue;
    const double L = -std::log(s);
    const double lterm = lp.delta == 1.0 ? 1.0 : std::pow(L, lp.delta - 1.0);
    v += lp.coeff * lp.delta * lterm / s;
  }
  return v;
}

double RadialDensity::d2g(double s) const {
  double v = 0.0;
  for (const auto& m : monomials_) {
    const double a = m.exponent;
    if (a != 0.0 && a != 1.0) v += m.coeff * a * (a - 1.0) * std::pow(s, a - 2.0);
  }
  if (log_coeff_ != 0.0) v -= log_coeff_ / (s * s);
  for (const auto& lp : log_powers_) {
    if (lp.coeff == 0.0) continue;
    const double L = -std::log(s);
    const double d = lp.delta;
    const double first = d == 1.0 ? 0.0 : (d - 1.0) * std::pow(L, d - 2.0);
    const double second = d == 1.0 ? 1.0 : std::pow(L, d - 1.0);
    v -= lp.coeff * d * (first + second) / (s * s);
  }
  return v;
}

double RadialDensity::d_sdg(double s) const {
  // Term by term, so the log contributions cancel exactly.
  double v = 0.0;
  for (const auto& m : monomials_) {
    if (m.exponent != 0.0) v += m.coeff * m.exponent * m.exponent * std::pow(s, m.exponent - 1.0);
  }
  for (const auto& lp : log_powers_) {
    if (lp.coeff == 0.0 || lp.delta == 1.0) continue;
    const double L = -std::log(s);
    v -= lp.coeff * lp.delta * (lp.delta - 1.0) * std::pow(L, lp.delta - 2.0) / s;
  }
  return v;
}

double RadialDensity::laplacian(double rho, int p) const {
  const double s = rho * rho;
  const double radial = d_sdg(s);
  return 4.0 * (p == 1 ? radial : (p - 1) * dg(s) + radial);
}

RadialDensity RadialDensity::scaled(double lambda) const {
  RadialDensity out = *this;
  for (auto& m : out.monomials_) m.coeff *= lambda;
  out.log_coeff_ *= lambda;
  for (auto& lp : out.log_powers_) lp.coeff *= lambda;
  return out;
}

RadialDensity operator+(const RadialDensity& a, const RadialDensity& b) {
  std::vector<Monomial> mons = a.monomials_;
  for (const auto& m : b.monomials_) {
    auto it = std::find_if(mons.begin(), mons.end(),
                           [&](const Monomial& x) { return x.exponent == m.exponent; });
    if (it != mons.end()) {
      it->coeff += m.coeff;
    } else {
      mons.push_back(m);
    }
  }
  std::vector<LogPower> lps = a.log_powers_;
  lps.insert(lps.end(), b.log_powers_.begin(), b.log_powers_.end());
  return RadialDensity(std::move(mons), a.log_coeff_ + b.log_coeff_, std::move(lps));
}

LaplacianDecomposition laplacian_decomposition(const RadialDensity& density, int p) {
  LaplacianDecomposition out;
  if (p == 1) {
    // dd^c log|w|^2 = 2 delta_0 on C; a log-power with delta = 1 is a log term.
    double log_total = density.log_coeff();
    for (const auto& lp : density.log_powers()) {
      if (lp.delta == 1.0) log_total += lp.coeff;
    }
    out.atom_mass = 2.0 * log_total;
  }
  out.ac_density = [density, p](double rho) { return density.laplacian(rho, p); };
  return out;
}

// ---------------------------------------------------------------- currents

std::vector<double> validation_grid(double ball_radius) {
  constexpr int kPoints = 512;
  std::vector<double> grid(kPoints);
  const double lo = std::log(ball_radius * 1e-6);
  const double hi = std::log(ball_radius);
  for (int i = 0; i < kPoints; ++i) {
    // (lo, hi]: the first point sits one step above the open endpoint.
    grid[i] = std::exp(lo + (hi - lo) * (i + 1) / kPoints);
  }
  grid.back() = ball_radius;
  return grid;
}

SignClass compute_sign_class(const RadialDensity& density, double ball_radius) {
  bool nonpos = true;
  bool nonneg = true;
  for (double rho : validation_grid(ball_radius)) {
    const double u = density(rho);
    if (u > kPshTolerance) nonpos = false;
    if (u < -kPshTolerance) nonneg = false;
  }
  if (nonpos && nonneg) return SignClass::Zero;
  if (nonpos) return SignClass::Nonpositive;
  if (nonneg) return SignClass::Nonnegative;
  return SignClass::Mixed;
}

ModelCurrent::ModelCurrent(CurrentKind kind, Domain domain, int bidim, RadialDensity density)
    : kind_(kind), domain_(domain), bidim_(bidim), density_(std::move(density)) {
  const int n = domain_.ambient_dim;
  if (n < 1 || n > kMaxDim) {
    throw InputError("ambient dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (!(domain_.ball_radius > 0.0) || !is_finite(domain_.ball_radius)) {
    throw InputError("ball_radius must be positive");
  }
  if (bidim_ < 1 || bidim_ > n) throw InputError("bidimension p must satisfy 1 <= p <= n");
  if (kind_ == CurrentKind::Subspace && bidim_ > n - 1) {
    throw InputError("subspace currents need p <= n - 1");
  }
  if (density_.has_log_terms() && domain_.ball_radius > 1.0) {
    throw InputError("ball_radius must be <= 1 when the density has log terms");
  }
  sign_class_ = compute_sign_class(density_, domain_.ball_radius);
  psh_ = validate_psh(*this);
}

bool ModelCurrent::nonpositive() const {
  return sign_class_ == SignClass::Nonpositive || sign_class_ == SignClass::Zero;
}

bool ModelCurrent::nonnegative() const {
  return sign_class_ == SignClass::Nonnegative || sign_class_ == SignClass::Zero;
}

int ModelCurrent::integration_dim() const {
  return kind_ == CurrentKind::Subspace ? bidim_ : domain_.ambient_dim;
}

int ModelCurrent::background_power() const {
  return kind_ == CurrentKind::Subspace ? 0 : domain_.ambient_dim - bidim_;
}

ModelCurrent ModelCurrent::with_density(RadialDensity density) const {
  return ModelCurrent(kind_, domain_, bidim_, std::move(density));
}

PshReport validate_psh(const ModelCurrent& current) {
  // dd^c T >= 0. On the integration space C^m the radial density has complex
  // Hessian eigenvalues g' (m-1 times) and g' + s g''; T carries q = m - p
  // factors of beta_0, so every sum of q+1 eigenvalues must be >= 0. For m = 1
  // this is the Laplacian condition plus the sign of the atom.
  const int m = current.integration_dim();
  const int q = current.background_power();
  const auto& u = current.density();
  const auto dec = laplacian_decomposition(u, m);

  PshReport rep;
  rep.atom_mass = dec.atom_mass;
  rep.min_ac_density = std::numeric_limits<double>::infinity();
  rep.min_eigen_sum = std::numeric_limits<double>::infinity();
  if (dec.atom_mass < 0.0) {
    rep.message = "negative point mass " + fmt(dec.atom_mass) + " at the origin";
    rep.first_failure_rho = 0.0;
  }
  for (double rho : validation_grid(current.domain().ball_radius)) {
    const double s = rho * rho;
    const double lap = dec.ac_density(rho);
    const double l1 = u.dg(s);
    const double l2 = u.d_sdg(s);
    double esum = q * l1 + l2;
    if (q + 1 <= m - 1) esum = std::min(esum, (q + 1) * l1);
    rep.min_ac_density = std::min(rep.min_ac_density, lap);
    rep.min_eigen_sum = std::min(rep.min_eigen_sum, esum);
    if (!rep.first_failure_rho && (lap < -kPshTolerance || esum < -kPshTolerance)) {
      rep.first_failure_rho = rho;
      rep.message = lap < -kPshTolerance
                        ? "Laplacian " + fmt(lap) + " < 0 at rho = " + fmt(rho)
                        : "complex Hessian eigenvalue sum " + fmt(esum) + " < 0 at rho = " + fmt(rho);
    }
  }
  rep.passed = !rep.first_failure_rho.has_value();
  if (rep.passed) rep.message = "ok";
  return rep;
}

// ---------------------------------------------------------------- weights

Weight Weight::isotropic_power(const Domain& domain, double k, std::optional<double> radius) {
  if (!(k > 0.0) || !is_finite(k)) throw InputError("weight exponent k must be positive");
  Weight w;
  w.kind_ = WeightKind::IsotropicPower;
  w.dim_ = domain.ambient_dim;
  w.exponent_ = k;
  w.center_.assign(w.dim_, cplx{});
  w.set_radius(domain, radius);
  return w;
}

Weight Weight::anisotropic(const Domain& domain, std::vector<double> b, std::optional<double> radius) {
  if (static_cast<int>(b.size()) != domain.ambient_dim) {
    throw InputError("anisotropic weight needs one exponent per coordinate");
  }
  for (double bj : b) {
    if (!(bj > 0.0) || !is_finite(bj)) throw InputError("anisotropic exponents must be positive");
  }
  Weight w;
  w.kind_ = WeightKind::Anisotropic;
  w.dim_ = domain.ambient_dim;
  w.b_ = std::move(b);
  w.set_radius(domain, radius);
  return w;
}

Weight Weight::shifted(const Domain& domain, std::vector<cplx> center, double k,
                       std::optional<double> radius) {
  if (static_cast<int>(center.size()) != domain.ambient_dim) {
    throw InputError("shifted weight centre must have n coordinates");
  }
  if (!(k > 0.0) || !is_finite(k)) throw InputError("weight exponent k must be positive");
  Weight w;
  w.kind_ = WeightKind::Shifted;
  w.dim_ = domain.ambient_dim;
  w.exponent_ = k;
  w.center_ = std::move(center);
  w.set_radius(domain, radius);
  return w;
}

void Weight::set_radius(const Domain& domain, std::optional<double> radius) {
  const double limit = exhaustion_limit(domain.ball_radius);
  if (!(limit > 0.0)) throw InputError("weight sublevel sets never fit inside the domain");
  if (radius) {
    if (!(*radius > 0.0) || !(*radius < limit)) {
      throw InputError("R(phi) = " + fmt(*radius) + " is not semi-exhaustive: B_phi(R) must be "
                       "relatively compact in the ball (need R < " + fmt(limit) + ")");
    }
    radius_ = *radius;
  } else {
    radius_ = 0.99 * limit;
  }
}

Weight Weight::with_radius(double radius, const Domain& domain) const {
  Weight w = *this;
  w.set_radius(domain, radius);
  return w;
}

Weight Weight::power(double j) const {
  if (!(j > 0.0)) throw InputError("weight power must be positive");
  Weight w = *this;
  w.exponent_ *= j;
  w.scale_ = std::pow(scale_, j);
  w.radius_ = std::pow(radius_, j);
  return w;
}

Weight Weight::scaled(double s) const {
  if (!(s > 0.0)) throw InputError("weight scale must be positive");
  Weight w = *this;
  w.scale_ *= s;
  w.radius_ *= s;
  return w;
}

double Weight::base_value(std::span<const cplx> z) const {
  double base = 0.0;
  if (kind_ == WeightKind::Anisotropic) {
    for (int j = 0; j < dim_; ++j) base += std::pow(std::norm(z[j]), b_[j]);
  } else {
    base = offset_;
    for (int j = 0; j < dim_; ++j) base += std::norm(z[j] - center_[j]);
  }
  return base;
}

double Weight::value(std::span<const cplx> z) const {
  return scale_ * std::pow(base_value(z), exponent_);
}

void Weight::derivatives(std::span<const cplx> z, double& phi, CVec& grad, CMat& hess) const {
  const int m = dim_;
  CVec gb(m);
  CMat hb = CMat::Zero(m, m);
  if (kind_ == WeightKind::Anisotropic) {
    for (int j = 0; j < m; ++j) {
      const double r2 = std::norm(z[j]);
      const double f = b_[j] * std::pow(r2, b_[j] - 1.0);
      gb(j) = f * std::conj(z[j]);
      hb(j, j) = b_[j] * f;
    }
  } else {
    for (int j = 0; j < m; ++j) gb(j) = std::conj(z[j] - center_[j]);
    hb.diagonal().setOnes();
  }
  const double base = base_value(z);
  const double k = exponent_;
  phi = scale_ * std::pow(base, k);
  const double d1 = scale_ * k * std::pow(base, k - 1.0);
  const double d2 = k == 1.0 ? 0.0 : scale_ * k * (k - 1.0) * std::pow(base, k - 2.0);
  grad = d1 * gb;
  hess = d1 * hb + d2 * (gb * gb.adjoint());
}

CMat Weight::log_hessian(std::span<const cplx> z) const {
  // Hessian of log(base) written so that directions in which log(base) is
  // pluriharmonic come out as exact zeros rather than differences of 1/base
  // sized terms.
  const int m = dim_;
  if (kind_ == WeightKind::Anisotropic) {
    std::vector<double> parts(m);
    CVec g(m);
    std::vector<double> f(m);
    for (int j = 0; j < m; ++j) {
      const double r2 = std::norm(z[j]);
      parts[j] = std::pow(r2, b_[j]);
      f[j] = b_[j] * std::pow(r2, b_[j] - 1.0);
      g(j) = f[j] * std::conj(z[j]);
    }
    double base = 0.0;
    for (double v : parts) base += v;
    CMat h = -(g * g.adjoint()) / base;
    for (int j = 0; j < m; ++j) {
      double others = 0.0;
      for (int i = 0; i < m; ++i) {
        if (i != j) others += parts[i];
      }
      h(j, j) = b_[j] * f[j] * others / base;
    }
    return (exponent_ / base) * h;
  }
  CVec w(m);
  double ww = 0.0;
  for (int j = 0; j < m; ++j) {
    w(j) = std::conj(z[j] - center_[j]);
    ww += std::norm(z[j] - center_[j]);
  }
  const double base = offset_ + ww;
  CMat id = CMat::Identity(m, m);
  if (ww == 0.0) return (exponent_ / base) * id;
  const CMat proj = (w * w.adjoint()) / ww;
  return (exponent_ / base) * ((id - proj) + (offset_ / base) * proj);
}

double Weight::bounding_radius(double r) const {
  const double beta = std::pow(r / scale_, 1.0 / exponent_);
  if (kind_ == WeightKind::Anisotropic) {
    double sum = 0.0;
    for (double bj : b_) sum += std::pow(beta, 1.0 / bj);
    return std::sqrt(sum);
  }
  double cnorm = 0.0;
  for (const auto& c : center_) cnorm += std::norm(c);
  return std::sqrt(cnorm) + std::sqrt(std::max(beta - offset_, 0.0));
}

double Weight::exhaustion_limit(double ball) const {
  if (kind_ == WeightKind::Anisotropic) {
    // Largest base level whose bounding box of axis radii fits in the ball.
    auto fits = [&](double beta) {
      double sum = 0.0;
      for (double bj : b_) sum += std::pow(beta, 1.0 / bj);
      return sum <= ball * ball;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (fits(hi)) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (fits(mid) ? lo : hi) = mid;
    }
    return scale_ * std::pow(lo, exponent_);
  }
  double cnorm = 0.0;
  for (const auto& c : center_) cnorm += std::norm(c);
  const double gap = ball - std::sqrt(cnorm);
  if (gap <= 0.0) return 0.0;
  return scale_ * std::pow(gap * gap + offset_, exponent_);
}

Weight Weight::restricted_to_tail(int p) const {
  if (p < 1 || p > dim_) throw InputError("restriction dimension out of range");
  Weight w = *this;
  const int head = dim_ - p;
  w.dim_ = p;
  if (kind_ == WeightKind::Anisotropic) {
    w.b_.assign(b_.begin() + head, b_.end());
  } else {
    for (int j = 0; j < head; ++j) w.offset_ += std::norm(center_[j]);
    w.center_.assign(center_.begin() + head, center_.end());
  }
  return w;
}

std::optional<double> Weight::pure_power_exponent() const {
  if (kind_ == WeightKind::Anisotropic) {
    const double b0 = b_.front();
    const bool equal = std::all_of(b_.begin(), b_.end(), [&](double b) { return b == b0; });
    if (equal && (b0 == 1.0 || dim_ == 1)) return exponent_ * b0;
    return std::nullopt;
  }
  const bool centred = offset_ == 0.0 && std::all_of(center_.begin(), center_.end(),
                                                     [](const cplx& c) { return c == cplx{}; });
  if (centred) return exponent_;
  return std::nullopt;
}

RestrictedWeight restrict_weight(const Weight& weight, const ModelCurrent& current) {
  if (weight.dim() != current.ambient_dim()) {
    throw InputError("weight dimension does not match the current's ambient dimension");
  }
  RestrictedWeight out{current.kind() == CurrentKind::Subspace
                           ? weight.restricted_to_tail(current.bidim())
                           : weight,
                       std::nullopt, {}};
  if (auto k = out.field.pure_power_exponent()) {
    out.pure = PurePower{*k, out.field.scale()};
  } else if (weight.kind() == WeightKind::Shifted && current.kind() == CurrentKind::Subspace &&
             out.field.offset() > 0.0) {
    out.warning = "weight centre is off the support of the current; sublevel sets are off-centre "
                  "balls (Monte Carlo only)";
  }
  return out;
}

bool PowersDomain::contains(double k) const {
  if (!(k > 0.0)) return false;
  const bool above = min_included ? k >= k_min : k > k_min;
  return above && k < k_max;
}

bool PowersDomain::unbounded() const { return std::isinf(k_max); }

PowersDomain powers_domain(const ModelCurrent& current, const Weight& weight) {
  const auto rw = restrict_weight(weight, current);
  PowersDomain dom;
  dom.k_max = std::numeric_limits<double>::infinity();
  if (rw.is_pure()) {
    // u * (dd^c rho^{2k})^p has density |u| rho^{2kp-1} up to constants, and
    // every density term is at worst logarithmic at 0.
    dom.k_min = 0.0;
    dom.basis = "pure power trace: u times the radial measure is integrable for every k > 0";
    return dom;
  }
  // All three weight kinds are continuous psh with psh logarithm, so phi^k is
  // continuous and locally bounded for every k > 0 and the Monge-Ampere
  // products are well defined (Bedford-Taylor). The C^2 threshold is reported
  // alongside for reference.
  dom.k_min = 0.0;
  double c2 = 0.0;
  if (rw.field.kind() == WeightKind::Anisotropic) {
    for (double b : rw.field.b()) c2 = std::max(c2, 1.0 / (rw.field.exponent() * b));
  } else if (rw.field.offset() == 0.0) {
    c2 = 1.0 / rw.field.exponent();
  }
  dom.basis = "continuous log-psh weight; phi^k is C^2 for k >= " + fmt(c2);
  return dom;
}

std::string to_string(CurrentKind kind) {
  return kind == CurrentKind::Subspace ? "subspace" : "smooth";
}

std::string to_string(SignClass sign) {
  switch (sign) {
    case SignClass::Zero: return "zero";
    case SignClass::Nonpositive: return "nonpositive";
    case SignClass::Nonnegative: return "nonnegative";
    case SignClass::Mixed: return "mixed";
  }
  return "mixed";
}

}  // namespace lelong
