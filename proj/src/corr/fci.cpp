#include <algorithm>
#include <bit>
#include <cstdint>
#include <fmt/core.h>
#include <mofbind/core/error.h>
#include <mofbind/corr/correlation.h>
#include <mofbind/corr/spin_orbitals.h>

namespace mofbind::corr {

namespace {

using Det = std::uint32_t;

/// a_p |det>; returns false when orbital p is empty.
bool annihilate(Det &det, Index p, int &sign) {
  const Det bit = Det{1} << p;
  if (!(det & bit))
    return false;
  if (std::popcount(det & (bit - 1)) & 1)
    sign = -sign;
  det &= ~bit;
  return true;
}

/// a_p^dagger |det>; returns false when orbital p is occupied.
bool create(Det &det, Index p, int &sign) {
  const Det bit = Det{1} << p;
  if (det & bit)
    return false;
  if (std::popcount(det & (bit - 1)) & 1)
    sign = -sign;
  det |= bit;
  return true;
}

} // namespace

CorrelatedSolution fci_oracle(const MoIntegrals &mo, const OrbitalWindow &w) {
  w.validate(mo);
  const SpinOrbitalSystem so(mo, w);
  if (so.n > kFciMaxSpinOrbitals)
    throw ArgumentError(fmt::format(
        "FCI oracle window has {} spin orbitals (limit {})", so.n,
        kFciMaxSpinOrbitals));
  CorrelatedSolution sol;
  sol.solver = Solver::FCI;
  sol.mode = mo.mode;
  sol.window = w;
  sol.amplitudes = Amplitudes::zeros(w);
  const Index n = so.n, o = so.o;

  // Effective one-body operator: Fock minus the active occupied mean field.
  Mat h = so.f;
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q)
      for (Index i = 0; i < o; ++i)
        h(p, q) -= so.g(p, i, q, i);

  Det alpha_mask = 0;
  for (Index p = 0; p < n; ++p)
    if (so.spin[static_cast<std::size_t>(p)] == 0)
      alpha_mask |= Det{1} << p;
  const Det ref = (Det{1} << o) - 1;
  const int n_alpha = std::popcount(ref & alpha_mask);
  const int n_beta = std::popcount(ref & ~alpha_mask);

  std::vector<Det> dets;
  for (Det d = 0; d < (Det{1} << n); ++d)
    if (std::popcount(d & alpha_mask) == n_alpha &&
        std::popcount(d & ~alpha_mask) == n_beta)
      dets.push_back(d);
  const auto index_of = [&](Det d) {
    return static_cast<Index>(std::lower_bound(dets.begin(), dets.end(), d) -
                              dets.begin());
  };

  const auto dim = static_cast<Index>(dets.size());
  Mat H = Mat::Zero(dim, dim);
  for (Index col = 0; col < dim; ++col) {
    const Det d0 = dets[static_cast<std::size_t>(col)];
    for (Index p = 0; p < n; ++p)
      for (Index q = 0; q < n; ++q) {
        if (h(p, q) == 0.0)
          continue;
        Det d = d0;
        int sign = 1;
        if (annihilate(d, q, sign) && create(d, p, sign))
          H(index_of(d), col) += sign * h(p, q);
      }
    for (Index r = 0; r < n; ++r)
      for (Index s = r + 1; s < n; ++s) {
        Det ds = d0;
        int s1 = 1;
        if (!annihilate(ds, r, s1) || !annihilate(ds, s, s1))
          continue;
        for (Index p = 0; p < n; ++p)
          for (Index q = p + 1; q < n; ++q) {
            const double g = so.g(p, q, r, s);
            if (g == 0.0)
              continue;
            Det d = ds;
            int sign = s1;
            // a_p^+ a_q^+ a_s a_r |d0>
            if (create(d, q, sign) && create(d, p, sign))
              H(index_of(d), col) += sign * g;
          }
      }
  }

  Eigen::SelfAdjointEigenSolver<Mat> eig(H);
  const Vec c = eig.eigenvectors().col(0);
  const Index i_ref = index_of(ref);
  const double e0 = H(i_ref, i_ref);
  sol.energy = eig.eigenvalues()(0) - e0;

  const double c0 = c(i_ref);
  if (std::abs(c0) < 1e-8)
    throw NumericalError(
        "FCI ground state has no weight on the reference determinant");
  const Index v = so.v;
  Mat t1 = Mat::Zero(o, v);
  Tensor4 t2(o, o, v, v);
  for (Index i = 0; i < o; ++i)
    for (Index a = 0; a < v; ++a) {
      Det d = ref;
      int sign = 1;
      if (annihilate(d, i, sign) && create(d, o + a, sign) &&
          std::binary_search(dets.begin(), dets.end(), d))
        t1(i, a) = sign * c(index_of(d)) / c0;
    }
  for (Index i = 0; i < o; ++i)
    for (Index j = i + 1; j < o; ++j)
      for (Index a = 0; a < v; ++a)
        for (Index b = a + 1; b < v; ++b) {
          Det d = ref;
          int sign = 1;
          // a_a^+ a_b^+ a_j a_i |ref>
          if (!annihilate(d, i, sign) || !annihilate(d, j, sign) ||
              !create(d, o + b, sign) || !create(d, o + a, sign) ||
              !std::binary_search(dets.begin(), dets.end(), d))
            continue;
          const double c2 = sign * c(index_of(d)) / c0;
          const double t = c2 - (t1(i, a) * t1(j, b) - t1(i, b) * t1(j, a));
          t2(i, j, a, b) = t;
          t2(j, i, a, b) = -t;
          t2(i, j, b, a) = -t;
          t2(j, i, b, a) = t;
        }
  sol.amplitudes = so.to_blocks(w, t1, t2);
  return sol;
}

} // namespace mofbind::corr
