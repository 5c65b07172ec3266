#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace metaradar {

using cdouble = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CRowVec = Eigen::RowVectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cdouble kImag{0.0, 1.0};

/// vec(M): column-major stacking, matching vec(ABC) = (C^T (x) A) vec(B).
inline CVec vec_of(const CMat& m) {
  return Eigen::Map<const CVec>(m.data(), m.size());
}

inline CMat mat_of(const CVec& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const CMat>(v.data(), rows, cols);
}

}  // namespace metaradar
