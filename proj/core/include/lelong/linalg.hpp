#pragma once

#include <complex>

#include <Eigen/Dense>

namespace lelong {

/// Largest complex dimension handled by the pointwise form machinery.
inline constexpr int kMaxDim = 6;

using cplx = std::complex<double>;
using CVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

}  // namespace lelong
