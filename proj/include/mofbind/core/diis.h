#pragma once
#include <deque>
#include <mofbind/core/linear_algebra.h>

namespace mofbind {

/// Pulay extrapolation over the last `max_size` (value, error) pairs.
template <typename Scalar> class Diis {
public:
  explicit Diis(int max_size = 8) : m_max_size(max_size) {}

  void push(VecX<Scalar> value, VecX<Scalar> error) {
    m_values.push_back(std::move(value));
    m_errors.push_back(std::move(error));
    if (static_cast<int>(m_values.size()) > m_max_size) {
      m_values.pop_front();
      m_errors.pop_front();
    }
  }

  std::size_t size() const { return m_values.size(); }
  void clear() {
    m_values.clear();
    m_errors.clear();
  }

  /// Minimizes |sum_i c_i e_i| subject to sum_i c_i = 1.
  VecX<Scalar> extrapolate() const {
    const auto m = static_cast<Index>(m_values.size());
    if (m < 2)
      return m_values.back();
    MatX<Scalar> b = MatX<Scalar>::Zero(m + 1, m + 1);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j <= i; ++j)
        b(i, j) = b(j, i) = m_errors[static_cast<std::size_t>(i)].dot(
            m_errors[static_cast<std::size_t>(j)]);
    // Scale for conditioning; the constraint row is unaffected.
    const Scalar scale = b.topLeftCorner(m, m).diagonal().maxCoeff();
    if (scale > Scalar(0))
      b.topLeftCorner(m, m) /= scale;
    b.row(m).head(m).setOnes();
    b.col(m).head(m).setOnes();
    VecX<Scalar> rhs = VecX<Scalar>::Zero(m + 1);
    rhs(m) = Scalar(1);
    const VecX<Scalar> c = b.completeOrthogonalDecomposition().solve(rhs);
    VecX<Scalar> out = VecX<Scalar>::Zero(m_values.back().size());
    for (Index i = 0; i < m; ++i)
      out += c(i) * m_values[static_cast<std::size_t>(i)];
    return out;
  }

private:
  int m_max_size;
  std::deque<VecX<Scalar>> m_values;
  std::deque<VecX<Scalar>> m_errors;
};

} // namespace mofbind
