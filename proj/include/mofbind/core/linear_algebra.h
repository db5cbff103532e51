#pragma once
#include <Eigen/Dense>

namespace mofbind {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar> using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar> using Mat3T = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar> using Vec3T = Eigen::Matrix<Scalar, 3, 1>;

using Mat = MatX<double>;
using Vec = VecX<double>;
using Mat3 = Mat3T<double>;
using Vec3 = Vec3T<double>;
using IVec3 = Eigen::Matrix<int, 3, 1>;
using Index = Eigen::Index;

/// S^{-1/2} for a symmetric positive definite matrix.
template <typename Derived>
MatX<typename Derived::Scalar>
inverse_sqrt(const Eigen::MatrixBase<Derived> &s) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<MatX<Scalar>> eig(s);
  return eig.eigenvectors() *
         eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

/// Orthonormalize the columns of `c` in the metric `s` (symmetric/Löwdin):
/// returns c (c^T s c)^{-1/2}.
template <typename DerivedC, typename DerivedS>
MatX<typename DerivedC::Scalar>
symmetric_orthonormalize(const Eigen::MatrixBase<DerivedC> &c,
                         const Eigen::MatrixBase<DerivedS> &s) {
  using Scalar = typename DerivedC::Scalar;
  MatX<Scalar> m = c.transpose() * s * c;
  return c * inverse_sqrt(m);
}

/// Orthonormal basis (columns) for the orthogonal complement of the
/// column span of an orthonormal `q` (rows = ambient dimension).
template <typename Derived>
MatX<typename Derived::Scalar>
orthogonal_complement(const Eigen::MatrixBase<Derived> &q) {
  using Scalar = typename Derived::Scalar;
  const Index n = q.rows();
  const Index k = q.cols();
  MatX<Scalar> proj = MatX<Scalar>::Identity(n, n) - q * q.transpose();
  Eigen::SelfAdjointEigenSolver<MatX<Scalar>> eig(proj);
  // eigenvalues ascending: the last n-k are (numerically) one
  return eig.eigenvectors().rightCols(n - k);
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar max_abs_diff(const Eigen::MatrixBase<DerivedA> &a,
                                       const Eigen::MatrixBase<DerivedB> &b) {
  return (a - b).cwiseAbs().maxCoeff();
}

} // namespace mofbind
