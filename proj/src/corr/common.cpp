#include <algorithm>
#include <fmt/core.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/corr/correlation.h>
#include <set>

namespace mofbind::corr {

std::string_view to_string(Solver solver) {
  switch (solver) {
  case Solver::MP2:
    return "mp2";
  case Solver::CCSD:
    return "ccsd";
  case Solver::FCI:
    return "fci";
  }
  return "?";
}

Solver solver_from_string(std::string_view name) {
  const auto s = text::lower(text::trim(name));
  if (s == "mp2")
    return Solver::MP2;
  if (s == "ccsd")
    return Solver::CCSD;
  if (s == "fci")
    return Solver::FCI;
  throw ArgumentError(
      fmt::format("unknown solver '{}' (expected mp2, ccsd or fci)", name));
}

OrbitalWindow OrbitalWindow::full(const MoIntegrals &mo) {
  return frozen_core(mo, 0);
}

OrbitalWindow OrbitalWindow::frozen_core(const MoIntegrals &mo, int n_core) {
  OrbitalWindow w;
  for (int s = 0; s < 2; ++s) {
    if (n_core > mo.n_occ[s])
      throw ArgumentError(fmt::format(
          "cannot freeze {} core orbitals with {} occupied", n_core,
          mo.n_occ[s]));
    for (Index i = n_core; i < mo.n_occ[s]; ++i)
      w.occ[s].push_back(i);
    for (Index a = mo.n_occ[s]; a < mo.n_orbitals(s); ++a)
      w.vir[s].push_back(a);
  }
  return w;
}

void OrbitalWindow::validate(const MoIntegrals &mo) const {
  for (int s = 0; s < 2; ++s) {
    std::set<Index> seen;
    for (Index i : occ[s]) {
      if (i < 0 || i >= mo.n_occ[s])
        throw ArgumentError(fmt::format(
            "window orbital {} (spin {}) is not occupied in the reference", i,
            s));
      if (!seen.insert(i).second)
        throw ArgumentError(fmt::format("window orbital {} repeated", i));
    }
    for (Index a : vir[s]) {
      if (a < mo.n_occ[s] || a >= mo.n_orbitals(s))
        throw ArgumentError(fmt::format(
            "window orbital {} (spin {}) is not virtual in the reference", a,
            s));
      if (!seen.insert(a).second)
        throw ArgumentError(fmt::format("window orbital {} repeated", a));
    }
  }
}

Amplitudes Amplitudes::zeros(const OrbitalWindow &w) {
  Amplitudes t;
  for (int s = 0; s < 2; ++s)
    t.t1[s] = Mat::Zero(w.n_occ(s), w.n_vir(s));
  t.t2aa = Tensor4(w.n_occ(0), w.n_occ(0), w.n_vir(0), w.n_vir(0));
  t.t2ab = Tensor4(w.n_occ(0), w.n_occ(1), w.n_vir(0), w.n_vir(1));
  t.t2bb = Tensor4(w.n_occ(1), w.n_occ(1), w.n_vir(1), w.n_vir(1));
  return t;
}

Tensor4 ovov_integrals(const MoIntegrals &mo, const OrbitalWindow &w, int s1,
                       int s2) {
  if (s1 > s2)
    throw ArgumentError("ovov_integrals expects s1 <= s2");
  const auto &g = mo.eri(s1, s2);
  const auto &o1 = w.occ[s1], &v1 = w.vir[s1];
  const auto &o2 = w.occ[s2], &v2 = w.vir[s2];
  Tensor4 out(w.n_occ(s1), w.n_vir(s1), w.n_occ(s2), w.n_vir(s2));
  for (std::size_t i = 0; i < o1.size(); ++i)
    for (std::size_t a = 0; a < v1.size(); ++a)
      for (std::size_t j = 0; j < o2.size(); ++j)
        for (std::size_t b = 0; b < v2.size(); ++b)
          out(static_cast<Index>(i), static_cast<Index>(a),
              static_cast<Index>(j), static_cast<Index>(b)) =
              g(o1[i], v1[a], o2[j], v2[b]);
  return out;
}

double amplitude_energy(const MoIntegrals &mo, const OrbitalWindow &w,
                        const Amplitudes &t) {
  double e = 0.0;
  for (int s = 0; s < 2; ++s)
    for (Index i = 0; i < w.n_occ(s); ++i)
      for (Index a = 0; a < w.n_vir(s); ++a)
        e += mo.fock[s](w.occ[s][static_cast<std::size_t>(i)],
                        w.vir[s][static_cast<std::size_t>(a)]) *
             t.t1[s](i, a);

  for (int s = 0; s < 2; ++s) {
    const auto g = ovov_integrals(mo, w, s, s);
    const auto &t2 = s == 0 ? t.t2aa : t.t2bb;
    const Mat &t1 = t.t1[s];
    const Index no = w.n_occ(s), nv = w.n_vir(s);
    for (Index i = 0; i < no; ++i)
      for (Index j = 0; j < no; ++j)
        for (Index a = 0; a < nv; ++a)
          for (Index b = 0; b < nv; ++b) {
            const double tau =
                t2(i, j, a, b) + t1(i, a) * t1(j, b) - t1(i, b) * t1(j, a);
            e += 0.25 * (g(i, a, j, b) - g(i, b, j, a)) * tau;
          }
  }
  const auto g = ovov_integrals(mo, w, 0, 1);
  for (Index i = 0; i < w.n_occ(0); ++i)
    for (Index j = 0; j < w.n_occ(1); ++j)
      for (Index a = 0; a < w.n_vir(0); ++a)
        for (Index b = 0; b < w.n_vir(1); ++b)
          e += g(i, a, j, b) *
               (t.t2ab(i, j, a, b) + t.t1[0](i, a) * t.t1[1](j, b));
  return e;
}

double projected_amplitude_energy(const MoIntegrals &mo, const OrbitalWindow &w,
                                  const Amplitudes &t,
                                  const std::array<Mat, 2> &occ_projector) {
  for (int s = 0; s < 2; ++s)
    if (occ_projector[s].rows() != w.n_occ(s) ||
        occ_projector[s].cols() != w.n_occ(s))
      throw ArgumentError(fmt::format(
          "projector is {}x{} but the window has {} occupied orbitals",
          occ_projector[s].rows(), occ_projector[s].cols(), w.n_occ(s)));
  double e = 0.0;
  for (int s = 0; s < 2; ++s) {
    const Mat pt1 = occ_projector[s] * t.t1[s];
    for (Index i = 0; i < w.n_occ(s); ++i)
      for (Index a = 0; a < w.n_vir(s); ++a)
        e += mo.fock[s](w.occ[s][static_cast<std::size_t>(i)],
                        w.vir[s][static_cast<std::size_t>(a)]) *
             pt1(i, a);
  }

  for (int s = 0; s < 2; ++s) {
    const auto g = ovov_integrals(mo, w, s, s);
    const auto &t2 = s == 0 ? t.t2aa : t.t2bb;
    const Mat &t1 = t.t1[s];
    const Mat &p = occ_projector[s];
    const Index no = w.n_occ(s), nv = w.n_vir(s);
    // w(k, j, a, b) = sum_i P(i, k) <ij||ab>
    Tensor4 wgt(no, no, nv, nv);
    for (Index i = 0; i < no; ++i)
      for (Index j = 0; j < no; ++j)
        for (Index a = 0; a < nv; ++a)
          for (Index b = 0; b < nv; ++b) {
            const double anti = g(i, a, j, b) - g(i, b, j, a);
            for (Index k = 0; k < no; ++k)
              wgt(k, j, a, b) += p(i, k) * anti;
          }
    for (Index k = 0; k < no; ++k)
      for (Index j = 0; j < no; ++j)
        for (Index a = 0; a < nv; ++a)
          for (Index b = 0; b < nv; ++b) {
            const double tau =
                t2(k, j, a, b) + t1(k, a) * t1(j, b) - t1(k, b) * t1(j, a);
            e += 0.25 * wgt(k, j, a, b) * tau;
          }
  }

  const auto g = ovov_integrals(mo, w, 0, 1);
  const Mat &pa = occ_projector[0];
  const Mat &pb = occ_projector[1];
  const Index na = w.n_occ(0), nb = w.n_occ(1);
  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < nb; ++j)
      for (Index a = 0; a < w.n_vir(0); ++a)
        for (Index b = 0; b < w.n_vir(1); ++b) {
          double proj = 0.0;
          for (Index k = 0; k < na; ++k)
            proj += pa(i, k) * (t.t2ab(k, j, a, b) + t.t1[0](k, a) * t.t1[1](j, b));
          for (Index l = 0; l < nb; ++l)
            proj += pb(j, l) * (t.t2ab(i, l, a, b) + t.t1[0](i, a) * t.t1[1](l, b));
          e += 0.5 * g(i, a, j, b) * proj;
        }
  return e;
}

CorrelatedSolution solve(Solver solver, const MoIntegrals &mo,
                         const OrbitalWindow &w) {
  switch (solver) {
  case Solver::MP2:
    return mp2(mo, w);
  case Solver::CCSD:
    return ccsd(mo, w);
  case Solver::FCI:
    return fci_oracle(mo, w);
  }
  throw ArgumentError("unknown solver");
}

} // namespace mofbind::corr
