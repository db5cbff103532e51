#pragma once
#include <array>
#include <mofbind/core/linear_algebra.h>
#include <vector>

namespace mofbind {

/// Dense rank-4 tensor, row-major (last index fastest). The storage can be
/// viewed as a (d0*d1) x (d2*d3) row-major matrix for GEMM-style
/// contractions.
template <typename Scalar> class Tensor4T {
public:
  using RowMajorMat =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Tensor4T() = default;
  Tensor4T(Index d0, Index d1, Index d2, Index d3)
      : m_dims{d0, d1, d2, d3},
        m_data(static_cast<std::size_t>(d0 * d1 * d2 * d3), Scalar(0)) {}

  static Tensor4T cube(Index n) { return Tensor4T(n, n, n, n); }

  Index dim(int i) const { return m_dims[i]; }
  const std::array<Index, 4> &dims() const { return m_dims; }
  Index size() const { return static_cast<Index>(m_data.size()); }
  bool empty() const { return m_data.empty(); }

  Scalar &operator()(Index i, Index j, Index k, Index l) {
    return m_data[offset(i, j, k, l)];
  }
  Scalar operator()(Index i, Index j, Index k, Index l) const {
    return m_data[offset(i, j, k, l)];
  }

  Scalar *data() { return m_data.data(); }
  const Scalar *data() const { return m_data.data(); }

  Eigen::Map<RowMajorMat> as_matrix() {
    return {m_data.data(), m_dims[0] * m_dims[1], m_dims[2] * m_dims[3]};
  }
  Eigen::Map<const RowMajorMat> as_matrix() const {
    return {m_data.data(), m_dims[0] * m_dims[1], m_dims[2] * m_dims[3]};
  }
  Eigen::Map<VecX<Scalar>> as_vector() { return {m_data.data(), size()}; }
  Eigen::Map<const VecX<Scalar>> as_vector() const {
    return {m_data.data(), size()};
  }

  void set_zero() { std::fill(m_data.begin(), m_data.end(), Scalar(0)); }

private:
  std::size_t offset(Index i, Index j, Index k, Index l) const {
    return static_cast<std::size_t>(
        ((i * m_dims[1] + j) * m_dims[2] + k) * m_dims[3] + l);
  }

  std::array<Index, 4> m_dims{0, 0, 0, 0};
  std::vector<Scalar> m_data;
};

using Tensor4 = Tensor4T<double>;

/// (pq|rs) -> sum_{PQRS} c1_{Pp} c2_{Qq} c3_{Rr} c4_{Ss} (PQ|RS).
/// Each coefficient matrix is (AO dim) x (target dim).
template <typename Scalar>
Tensor4T<Scalar> transform4(const Tensor4T<Scalar> &t, const MatX<Scalar> &c1,
                            const MatX<Scalar> &c2, const MatX<Scalar> &c3,
                            const MatX<Scalar> &c4) {
  using RowMajorMat = typename Tensor4T<Scalar>::RowMajorMat;
  const Index n0 = t.dim(0), n1 = t.dim(1), n2 = t.dim(2), n3 = t.dim(3);
  const Index m0 = c1.cols(), m1 = c2.cols(), m2 = c3.cols(), m3 = c4.cols();
  // ket half: for each (P,Q) row transform the (R,S) block
  RowMajorMat half(n0 * n1, m2 * m3);
  const auto full = t.as_matrix();
  for (Index pq = 0; pq < n0 * n1; ++pq) {
    Eigen::Map<const RowMajorMat> block(full.row(pq).data(), n2, n3);
    RowMajorMat x = c3.transpose() * block * c4;
    half.row(pq) = Eigen::Map<const VecX<Scalar>>(x.data(), m2 * m3);
  }
  // bra half: for each (r,s) column transform the (P,Q) block
  Tensor4T<Scalar> result(m0, m1, m2, m3);
  auto out = result.as_matrix();
  RowMajorMat block(n0, n1);
  for (Index rs = 0; rs < m2 * m3; ++rs) {
    for (Index p = 0; p < n0; ++p)
      for (Index q = 0; q < n1; ++q)
        block(p, q) = half(p * n1 + q, rs);
    RowMajorMat x = c1.transpose() * block * c2;
    for (Index p = 0; p < m0; ++p)
      for (Index q = 0; q < m1; ++q)
        out(p * m1 + q, rs) = x(p, q);
  }
  return result;
}

} // namespace mofbind
