#include <cmath>
#include <fmt/format.h>
#include <mofbind/core/error.h>
#include <mofbind/ewf/embedding.h>
#include <mofbind/qm/mo_integrals.h>

namespace mofbind::ewf {

namespace {

Mat hcat(const Mat &a, const Mat &b) {
  Mat out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

/// Rotate the columns of `c` so that the Fock matrix is diagonal within
/// their span, orbital energies ascending.
Mat semicanonicalize(const Mat &c, const Mat &fock) {
  if (c.cols() == 0)
    return c;
  Eigen::SelfAdjointEigenSolver<Mat> eig(c.transpose() * fock * c);
  return c * eig.eigenvectors();
}

/// Orbitals of `c` (occupied or virtual MOs) that overlap the fragment.
/// Right singular vectors of Q^T S C: fragment-dominated ones (sigma^2 >
/// 1/2) lie in the fragment, the rest carry a DMET bath orbital whose
/// entanglement value sigma sqrt(1 - sigma^2) must exceed the cutoff.
Mat dmet_orbitals(const Mat &q, const Mat &s, const Mat &c, double cutoff) {
  if (c.cols() == 0 || q.cols() == 0)
    return Mat(c.rows(), 0);
  const Mat o = q.transpose() * s * c;
  Eigen::JacobiSVD<Mat> svd(o, Eigen::ComputeFullV);
  const Vec &sigma = svd.singularValues();
  std::vector<Index> keep;
  for (Index k = 0; k < sigma.size(); ++k) {
    const double x = std::min(sigma(k), 1.0);
    if (x * x > 0.5 || x * std::sqrt(1.0 - x * x) > cutoff)
      keep.push_back(k);
  }
  return c * svd.matrixV()(Eigen::all, keep);
}

/// Environment natural orbitals of a correlation density `d` given in the
/// orbital basis `space`; `cluster` are orbitals already in the cluster
/// (inside the span of `space`). Keeps occupations >= eta.
Mat natural_orbitals(const Mat &space, const Mat &d, const Mat &cluster,
                     const Mat &s, double eta) {
  const Mat inside = space.transpose() * s * cluster;
  const Mat env = orthogonal_complement(inside);
  if (env.cols() == 0)
    return Mat(space.rows(), 0);
  Eigen::SelfAdjointEigenSolver<Mat> eig(env.transpose() * d * env);
  std::vector<Index> keep;
  for (Index k = eig.eigenvalues().size() - 1; k >= 0; --k)
    if (eig.eigenvalues()(k) >= eta)
      keep.push_back(k);
  return space * env * eig.eigenvectors()(Eigen::all, keep);
}

/// Virtual-virtual block of the unrelaxed MP2 one-body density per spin.
std::array<Mat, 2> virtual_density(const corr::Amplitudes &t,
                                   const corr::OrbitalWindow &w) {
  using RowMat = Tensor4::RowMajorMat;
  std::array<Mat, 2> d;
  for (int s = 0; s < 2; ++s) {
    const Index no = w.n_occ(s), nv = w.n_vir(s);
    d[s] = Mat::Zero(nv, nv);
    const auto &t2 = s == 0 ? t.t2aa : t.t2bb;
    for (Index ij = 0; ij < no * no; ++ij) {
      Eigen::Map<const RowMat> b(t2.data() + ij * nv * nv, nv, nv);
      d[s] += 0.5 * b * b.transpose();
    }
  }
  const Index nva = w.n_vir(0), nvb = w.n_vir(1);
  for (Index ij = 0; ij < w.n_occ(0) * w.n_occ(1); ++ij) {
    Eigen::Map<const RowMat> b(t.t2ab.data() + ij * nva * nvb, nva, nvb);
    d[0] += b * b.transpose();
    d[1] += b.transpose() * b;
  }
  return d;
}

/// Occupied hole density (1 - D_occ) of the unrelaxed MP2 density per spin.
std::array<Mat, 2> hole_density(const corr::Amplitudes &t,
                                const corr::OrbitalWindow &w) {
  using RowMat = Tensor4::RowMajorMat;
  std::array<Mat, 2> d;
  for (int s = 0; s < 2; ++s) {
    const Index no = w.n_occ(s), nv = w.n_vir(s);
    const auto &t2 = s == 0 ? t.t2aa : t.t2bb;
    Eigen::Map<const RowMat> x(t2.data(), no, no * nv * nv);
    d[s] = 0.5 * x * x.transpose();
  }
  const Index na = w.n_occ(0), nb = w.n_occ(1);
  const Index vv = w.n_vir(0) * w.n_vir(1);
  Eigen::Map<const RowMat> x(t.t2ab.data(), na, nb * vv);
  d[0] += x * x.transpose();
  for (Index k = 0; k < na; ++k) {
    Eigen::Map<const RowMat> b(t.t2ab.data() + k * nb * vv, nb, vv);
    d[1] += b * b.transpose();
  }
  return d;
}

/// MP2 amplitudes over occupied orbitals `occ` and virtual orbitals `vir`
/// (both semicanonical) of the full reference.
corr::CorrelatedSolution generating_mp2(const EmbeddingSystem &system,
                                        const std::array<Mat, 2> &occ,
                                        const std::array<Mat, 2> &vir) {
  std::array<Mat, 2> c;
  std::array<int, 2> n_occ{};
  for (int s = 0; s < 2; ++s) {
    c[s] = hcat(occ[s], vir[s]);
    n_occ[s] = static_cast<int>(occ[s].cols());
  }
  const auto mo = qm::mo_transform(system.ints, system.fock, c, n_occ,
                                   system.mf.mode, system.mf.energy);
  return corr::mp2(mo, corr::OrbitalWindow::full(mo));
}

} // namespace

FragmentCluster build_bath(const EmbeddingSystem &system,
                           const FragmentSpace &fragment, double eta,
                           const BathOptions &opts) {
  if (!(eta > 0.0))
    throw ArgumentError(fmt::format(
        "bath threshold eta must be positive (got {}); use the DMET-only "
        "setting (eta = inf) for the large-eta limit",
        eta));
  const Mat &s = system.ints.S;
  const int nspin = system.n_spin_channels();

  FragmentCluster out;
  out.fragment = fragment;
  out.eta = eta;

  // Restricted references build the alpha channel and mirror it.
  const auto mirror = [nspin](auto &pair) {
    if (nspin == 1)
      pair[1] = pair[0];
  };
  std::array<Mat, 2> co, cv, all_occ, all_vir;
  for (int sp = 0; sp < nspin; ++sp) {
    const Mat &f = system.fock[sp];
    all_occ[sp] = semicanonicalize(system.occupied(sp), f);
    all_vir[sp] = semicanonicalize(system.virtuals(sp), f);
    co[sp] = semicanonicalize(
        dmet_orbitals(fragment.orbitals[sp], s, all_occ[sp],
                      opts.dmet_threshold),
        f);
    cv[sp] = semicanonicalize(
        dmet_orbitals(fragment.orbitals[sp], s, all_vir[sp],
                      opts.dmet_threshold),
        f);
    out.n_dmet_bath[sp] = std::max<int>(
        0, static_cast<int>(co[sp].cols() + cv[sp].cols() - fragment.size()));
  }
  mirror(co);
  mirror(cv);
  mirror(all_occ);
  mirror(all_vir);
  mirror(out.n_dmet_bath);

  std::array<Mat, 2> bno_occ, bno_vir;
  for (int sp = 0; sp < 2; ++sp) {
    bno_occ[sp] = Mat(s.rows(), 0);
    bno_vir[sp] = Mat(s.rows(), 0);
  }
  if (std::isfinite(eta)) {
    const auto vir_gen = generating_mp2(system, co, all_vir);
    const auto dv = virtual_density(vir_gen.amplitudes, vir_gen.window);
    const auto occ_gen = generating_mp2(system, all_occ, cv);
    const auto dh = hole_density(occ_gen.amplitudes, occ_gen.window);
    for (int sp = 0; sp < nspin; ++sp) {
      bno_vir[sp] = natural_orbitals(all_vir[sp], dv[sp], cv[sp], s, eta);
      bno_occ[sp] = natural_orbitals(all_occ[sp], dh[sp], co[sp], s, eta);
    }
  }

  for (int sp = 0; sp < nspin; ++sp) {
    out.n_bno_occ[sp] = static_cast<int>(bno_occ[sp].cols());
    out.n_bno_vir[sp] = static_cast<int>(bno_vir[sp].cols());
    const Mat occ = semicanonicalize(hcat(co[sp], bno_occ[sp]), system.fock[sp]);
    const Mat vir = semicanonicalize(hcat(cv[sp], bno_vir[sp]), system.fock[sp]);
    out.coefficients[sp] = hcat(occ, vir);
    out.n_occ[sp] = static_cast<int>(occ.cols());
  }
  mirror(out.n_bno_occ);
  mirror(out.n_bno_vir);
  mirror(out.coefficients);
  mirror(out.n_occ);
  out.integrals =
      qm::mo_transform(system.ints, system.fock, out.coefficients, out.n_occ,
                       system.mf.mode, system.mf.energy);
  return out;
}

} // namespace mofbind::ewf
