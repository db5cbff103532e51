#include <cmath>
#include <fmt/core.h>
#include <mofbind/core/diis.h>
#include <mofbind/core/error.h>
#include <mofbind/corr/correlation.h>
#include <mofbind/corr/spin_orbitals.h>

namespace mofbind::corr {

SpinOrbitalSystem::SpinOrbitalSystem(const MoIntegrals &mo,
                                     const OrbitalWindow &w) {
  for (int s = 0; s < 2; ++s)
    for (Index i : w.occ[s]) {
      spin.push_back(s);
      orbital.push_back(i);
    }
  o = static_cast<Index>(spin.size());
  for (int s = 0; s < 2; ++s)
    for (Index a : w.vir[s]) {
      spin.push_back(s);
      orbital.push_back(a);
    }
  n = static_cast<Index>(spin.size());
  v = n - o;

  f = Mat::Zero(n, n);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q)
      if (spin[p] == spin[q])
        f(p, q) = mo.fock[spin[p]](orbital[p], orbital[q]);

  // <pq|rs> = (pr|qs) for matching spins
  const auto coulomb = [&](Index p, Index q, Index r, Index s) -> double {
    if (spin[p] != spin[r] || spin[q] != spin[s])
      return 0.0;
    const Index P = orbital[p], Q = orbital[q], R = orbital[r], S = orbital[s];
    if (spin[p] == 0 && spin[q] == 0)
      return mo.eri_aa(P, R, Q, S);
    if (spin[p] == 1 && spin[q] == 1)
      return mo.eri_bb(P, R, Q, S);
    if (spin[p] == 0)
      return mo.eri_ab(P, R, Q, S);
    return mo.eri_ab(Q, S, P, R);
  };
  g = Tensor4::cube(n);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q)
      for (Index r = 0; r < n; ++r)
        for (Index s = 0; s < n; ++s)
          g(p, q, r, s) = coulomb(p, q, r, s) - coulomb(p, q, s, r);
}

Amplitudes SpinOrbitalSystem::to_blocks(const OrbitalWindow &w, const Mat &t1,
                                        const Tensor4 &t2) const {
  Amplitudes out = Amplitudes::zeros(w);
  const Index noa = w.n_occ(0), nva = w.n_vir(0);
  // spin-orbital offsets: alpha occ [0, noa), beta occ [noa, o),
  // alpha vir [0, nva), beta vir [nva, v)
  for (int s = 0; s < 2; ++s) {
    const Index oo = s == 0 ? 0 : noa, vo = s == 0 ? 0 : nva;
    for (Index i = 0; i < w.n_occ(s); ++i)
      for (Index a = 0; a < w.n_vir(s); ++a)
        out.t1[s](i, a) = t1(oo + i, vo + a);
    auto &t2s = s == 0 ? out.t2aa : out.t2bb;
    for (Index i = 0; i < w.n_occ(s); ++i)
      for (Index j = 0; j < w.n_occ(s); ++j)
        for (Index a = 0; a < w.n_vir(s); ++a)
          for (Index b = 0; b < w.n_vir(s); ++b)
            t2s(i, j, a, b) = t2(oo + i, oo + j, vo + a, vo + b);
  }
  for (Index i = 0; i < noa; ++i)
    for (Index j = 0; j < w.n_occ(1); ++j)
      for (Index a = 0; a < nva; ++a)
        for (Index b = 0; b < w.n_vir(1); ++b)
          out.t2ab(i, j, a, b) = t2(i, noa + j, a, nva + b);
  return out;
}

namespace {

/// One CCSD amplitude update (spin-orbital, Stanton-Gauss intermediates).
void ccsd_update(const SpinOrbitalSystem &so, const Mat &t1, const Tensor4 &t2,
                 Mat &t1_new, Tensor4 &t2_new) {
  const Index o = so.o, v = so.v;
  const auto &f = so.f;
  const auto G = [&](Index p, Index q, Index r, Index s) {
    return so.g(p, q, r, s);
  };
  // occupied indices i < o map to orbital i; virtual a maps to o + a
  const auto fov = [&](Index i, Index a) { return f(i, o + a); };

  Tensor4 tau(o, o, v, v), taut(o, o, v, v);
  for (Index i = 0; i < o; ++i)
    for (Index j = 0; j < o; ++j)
      for (Index a = 0; a < v; ++a)
        for (Index b = 0; b < v; ++b) {
          const double x = t1(i, a) * t1(j, b) - t1(i, b) * t1(j, a);
          tau(i, j, a, b) = t2(i, j, a, b) + x;
          taut(i, j, a, b) = t2(i, j, a, b) + 0.5 * x;
        }

  Mat Fae = Mat::Zero(v, v), Fmi = Mat::Zero(o, o), Fme = Mat::Zero(o, v);
  for (Index a = 0; a < v; ++a)
    for (Index e = 0; e < v; ++e) {
      double x = a != e ? f(o + a, o + e) : 0.0;
      for (Index m = 0; m < o; ++m) {
        x -= 0.5 * fov(m, e) * t1(m, a);
        for (Index ff = 0; ff < v; ++ff)
          x += t1(m, ff) * G(m, o + a, o + ff, o + e);
        for (Index nn = 0; nn < o; ++nn)
          for (Index ff = 0; ff < v; ++ff)
            x -= 0.5 * taut(m, nn, a, ff) * G(m, nn, o + e, o + ff);
      }
      Fae(a, e) = x;
    }
  for (Index m = 0; m < o; ++m)
    for (Index i = 0; i < o; ++i) {
      double x = m != i ? f(m, i) : 0.0;
      for (Index e = 0; e < v; ++e) {
        x += 0.5 * t1(i, e) * fov(m, e);
        for (Index nn = 0; nn < o; ++nn) {
          x += t1(nn, e) * G(m, nn, i, o + e);
          for (Index ff = 0; ff < v; ++ff)
            x += 0.5 * taut(i, nn, e, ff) * G(m, nn, o + e, o + ff);
        }
      }
      Fmi(m, i) = x;
    }
  for (Index m = 0; m < o; ++m)
    for (Index e = 0; e < v; ++e) {
      double x = fov(m, e);
      for (Index nn = 0; nn < o; ++nn)
        for (Index ff = 0; ff < v; ++ff)
          x += t1(nn, ff) * G(m, nn, o + e, o + ff);
      Fme(m, e) = x;
    }

  Tensor4 Wmnij(o, o, o, o);
  for (Index m = 0; m < o; ++m)
    for (Index nn = 0; nn < o; ++nn)
      for (Index i = 0; i < o; ++i)
        for (Index j = 0; j < o; ++j) {
          double x = G(m, nn, i, j);
          for (Index e = 0; e < v; ++e) {
            x += t1(j, e) * G(m, nn, i, o + e) - t1(i, e) * G(m, nn, j, o + e);
            for (Index ff = 0; ff < v; ++ff)
              x += 0.25 * tau(i, j, e, ff) * G(m, nn, o + e, o + ff);
          }
          Wmnij(m, nn, i, j) = x;
        }
  Tensor4 Wabef(v, v, v, v);
  for (Index a = 0; a < v; ++a)
    for (Index b = 0; b < v; ++b)
      for (Index e = 0; e < v; ++e)
        for (Index ff = 0; ff < v; ++ff) {
          double x = G(o + a, o + b, o + e, o + ff);
          for (Index m = 0; m < o; ++m) {
            x -= t1(m, b) * G(o + a, m, o + e, o + ff) -
                 t1(m, a) * G(o + b, m, o + e, o + ff);
            for (Index nn = 0; nn < o; ++nn)
              x += 0.25 * tau(m, nn, a, b) * G(m, nn, o + e, o + ff);
          }
          Wabef(a, b, e, ff) = x;
        }
  Tensor4 Wmbej(o, v, v, o);
  for (Index m = 0; m < o; ++m)
    for (Index b = 0; b < v; ++b)
      for (Index e = 0; e < v; ++e)
        for (Index j = 0; j < o; ++j) {
          double x = G(m, o + b, o + e, j);
          for (Index ff = 0; ff < v; ++ff)
            x += t1(j, ff) * G(m, o + b, o + e, o + ff);
          for (Index nn = 0; nn < o; ++nn) {
            x -= t1(nn, b) * G(m, nn, o + e, j);
            for (Index ff = 0; ff < v; ++ff)
              x -= (0.5 * t2(j, nn, ff, b) + t1(j, ff) * t1(nn, b)) *
                   G(m, nn, o + e, o + ff);
          }
          Wmbej(m, b, e, j) = x;
        }

  t1_new.resize(o, v);
  for (Index i = 0; i < o; ++i)
    for (Index a = 0; a < v; ++a) {
      double x = fov(i, a);
      for (Index e = 0; e < v; ++e)
        x += t1(i, e) * Fae(a, e);
      for (Index m = 0; m < o; ++m) {
        x -= t1(m, a) * Fmi(m, i);
        for (Index e = 0; e < v; ++e) {
          x += t2(i, m, a, e) * Fme(m, e);
          for (Index ff = 0; ff < v; ++ff)
            x -= 0.5 * t2(i, m, e, ff) * G(m, o + a, o + e, o + ff);
          for (Index nn = 0; nn < o; ++nn)
            x -= 0.5 * t2(m, nn, a, e) * G(nn, m, o + e, i);
        }
      }
      for (Index nn = 0; nn < o; ++nn)
        for (Index ff = 0; ff < v; ++ff)
          x -= t1(nn, ff) * G(nn, o + a, i, o + ff);
      t1_new(i, a) = x / (f(i, i) - f(o + a, o + a));
    }

  // Partially contracted pieces reused across permutations.
  Mat Fbe = Fae, Fmj = Fmi;
  for (Index b = 0; b < v; ++b)
    for (Index e = 0; e < v; ++e)
      for (Index m = 0; m < o; ++m)
        Fbe(b, e) -= 0.5 * t1(m, b) * Fme(m, e);
  for (Index m = 0; m < o; ++m)
    for (Index j = 0; j < o; ++j)
      for (Index e = 0; e < v; ++e)
        Fmj(m, j) += 0.5 * t1(j, e) * Fme(m, e);

  // P(ij)P(ab)-symmetric ring term X(i, j, a, b) before antisymmetrizing.
  Tensor4 ring(o, o, v, v);
  for (Index i = 0; i < o; ++i)
    for (Index j = 0; j < o; ++j)
      for (Index a = 0; a < v; ++a)
        for (Index b = 0; b < v; ++b) {
          double x = 0.0;
          for (Index m = 0; m < o; ++m)
            for (Index e = 0; e < v; ++e)
              x += t2(i, m, a, e) * Wmbej(m, b, e, j) -
                   t1(i, e) * t1(m, a) * G(m, o + b, o + e, j);
          ring(i, j, a, b) = x;
        }

  t2_new = Tensor4(o, o, v, v);
  for (Index i = 0; i < o; ++i)
    for (Index j = 0; j < o; ++j)
      for (Index a = 0; a < v; ++a)
        for (Index b = 0; b < v; ++b) {
          double x = G(i, j, o + a, o + b);
          for (Index e = 0; e < v; ++e) {
            x += t2(i, j, a, e) * Fbe(b, e) - t2(i, j, b, e) * Fbe(a, e);
            x += t1(i, e) * G(o + a, o + b, o + e, j) -
                 t1(j, e) * G(o + a, o + b, o + e, i);
            for (Index ff = 0; ff < v; ++ff)
              x += 0.5 * tau(i, j, e, ff) * Wabef(a, b, e, ff);
          }
          for (Index m = 0; m < o; ++m) {
            x -= t2(i, m, a, b) * Fmj(m, j) - t2(j, m, a, b) * Fmj(m, i);
            x -= t1(m, a) * G(m, o + b, i, j) - t1(m, b) * G(m, o + a, i, j);
            for (Index nn = 0; nn < o; ++nn)
              x += 0.5 * tau(m, nn, a, b) * Wmnij(m, nn, i, j);
          }
          x += ring(i, j, a, b) - ring(j, i, a, b) - ring(i, j, b, a) +
               ring(j, i, b, a);
          t2_new(i, j, a, b) =
              x / (f(i, i) + f(j, j) - f(o + a, o + a) - f(o + b, o + b));
        }
}

double spin_orbital_energy(const SpinOrbitalSystem &so, const Mat &t1,
                           const Tensor4 &t2) {
  const Index o = so.o, v = so.v;
  double e = 0.0;
  for (Index i = 0; i < o; ++i)
    for (Index a = 0; a < v; ++a) {
      e += so.f(i, o + a) * t1(i, a);
      for (Index j = 0; j < o; ++j)
        for (Index b = 0; b < v; ++b)
          e += so.g(i, j, o + a, o + b) *
               (0.25 * t2(i, j, a, b) + 0.5 * t1(i, a) * t1(j, b));
    }
  return e;
}

Vec pack(const Mat &t1, const Tensor4 &t2) {
  Vec out(t1.size() + t2.size());
  out << Eigen::Map<const Vec>(t1.data(), t1.size()), t2.as_vector();
  return out;
}

void unpack(const Vec &x, Mat &t1, Tensor4 &t2) {
  t1 = Eigen::Map<const Mat>(x.data(), t1.rows(), t1.cols());
  t2.as_vector() = x.tail(t2.size());
}

} // namespace

CorrelatedSolution ccsd(const MoIntegrals &mo, const OrbitalWindow &w,
                        const CcsdOptions &opts) {
  w.validate(mo);
  CorrelatedSolution sol;
  sol.solver = Solver::CCSD;
  sol.mode = mo.mode;
  sol.window = w;
  sol.amplitudes = Amplitudes::zeros(w);

  const SpinOrbitalSystem so(mo, w);
  if (so.o == 0 || so.v == 0)
    return sol;

  Mat t1 = Mat::Zero(so.o, so.v);
  Tensor4 t2(so.o, so.o, so.v, so.v);
  for (Index i = 0; i < so.o; ++i)
    for (Index j = 0; j < so.o; ++j)
      for (Index a = 0; a < so.v; ++a)
        for (Index b = 0; b < so.v; ++b)
          t2(i, j, a, b) = so.g(i, j, so.o + a, so.o + b) /
                           (so.f(i, i) + so.f(j, j) - so.f(so.o + a, so.o + a) -
                            so.f(so.o + b, so.o + b));

  Diis<double> diis(opts.diis_size);
  double energy = spin_orbital_energy(so, t1, t2);
  sol.converged = false;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Mat t1n;
    Tensor4 t2n;
    ccsd_update(so, t1, t2, t1n, t2n);
    const Vec old = pack(t1, t2);
    Vec next = pack(t1n, t2n);
    const double residual = (next - old).norm();
    sol.residual_history.push_back(residual);
    diis.push(next, next - old);
    if (it >= 2)
      next = diis.extrapolate();
    unpack(next, t1, t2);
    const double e_new = spin_orbital_energy(so, t1, t2);
    sol.iterations = it;
    if (residual < opts.tolerance && std::abs(e_new - energy) < opts.tolerance) {
      energy = e_new;
      sol.converged = true;
      break;
    }
    energy = e_new;
  }
  if (!sol.converged) {
    std::string history;
    for (double r : sol.residual_history)
      history += fmt::format(" {:.2e}", r);
    throw NumericalError(fmt::format(
        "CCSD did not converge in {} iterations; residuals:{}",
        opts.max_iterations, history));
  }
  sol.amplitudes = so.to_blocks(w, t1, t2);
  sol.energy = energy;
  return sol;
}

} // namespace mofbind::corr
