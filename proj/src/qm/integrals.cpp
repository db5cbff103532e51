#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fmt/core.h>
#include <fstream>
#include <memory>
#include <mofbind/core/error.h>
#include <mofbind/qm/integrals.h>
#include <numbers>

namespace mofbind::qm {

void boys_function(int m, double t, double *out) {
  const double et = std::exp(-t);
  if (t <= 30.0) {
    double term = 1.0 / (2 * m + 1);
    double sum = term;
    for (int k = 1; k < 500; ++k) {
      term *= 2.0 * t / (2 * m + 2 * k + 1);
      sum += term;
      if (term < 1e-17 * sum)
        break;
    }
    out[m] = et * sum;
    for (int k = m - 1; k >= 0; --k)
      out[k] = (2.0 * t * out[k + 1] + et) / (2 * k + 1);
  } else {
    out[0] = 0.5 * std::sqrt(std::numbers::pi / t) * std::erf(std::sqrt(t));
    for (int k = 0; k < m; ++k)
      out[k + 1] = ((2 * k + 1) * out[k] - et) / (2.0 * t);
  }
}

namespace {

constexpr int kL = kMaxAngularMomentum;
constexpr int kMaxHermite = 4 * kL;

/// McMurchie-Davidson expansion coefficients E^{ij}_t along one axis.
struct Hermite1D {
  double e[kL + 1][kL + 3][2 * kL + 5];

  void compute(int la, int lb, double a, double b, double xa, double xb) {
    for (auto &plane : e)
      for (auto &row : plane)
        for (auto &v : row)
          v = 0.0;
    const double p = a + b;
    const double xab = xa - xb;
    const double px = (a * xa + b * xb) / p;
    const double xpa = px - xa, xpb = px - xb;
    const double half_p = 0.5 / p;
    e[0][0][0] = std::exp(-a * b / p * xab * xab);
    for (int i = 0; i <= la; ++i)
      for (int j = 0; j <= lb; ++j) {
        if (i == 0 && j == 0)
          continue;
        const bool up_i = i > 0;
        const auto &prev = up_i ? e[i - 1][j] : e[i][j - 1];
        const double x = up_i ? xpa : xpb;
        for (int t = 0; t <= i + j; ++t)
          e[i][j][t] = (t > 0 ? half_p * prev[t - 1] : 0.0) + x * prev[t] +
                       (t + 1) * prev[t + 1];
      }
  }
};

/// Hermite Coulomb integrals R_{tuv} for t + u + v <= L.
class HermiteR {
public:
  void compute(int l, double alpha, const Vec3 &pc) {
    double f[kMaxHermite + 1];
    boys_function(l, alpha * pc.squaredNorm(), f);
    double scale = 1.0;
    for (int n = 0; n <= l; ++n) {
      m_r[n][0][0][0] = scale * f[n];
      scale *= -2.0 * alpha;
    }
    for (int n = l - 1; n >= 0; --n) {
      const auto &up = m_r[n + 1];
      auto &cur = m_r[n];
      for (int t = 0; t <= l - n; ++t)
        for (int u = 0; u <= l - n - t; ++u)
          for (int v = 0; v <= l - n - t - u; ++v) {
            if (t > 0)
              cur[t][u][v] = (t > 1 ? (t - 1) * up[t - 2][u][v] : 0.0) +
                             pc.x() * up[t - 1][u][v];
            else if (u > 0)
              cur[t][u][v] = (u > 1 ? (u - 1) * up[t][u - 2][v] : 0.0) +
                             pc.y() * up[t][u - 1][v];
            else if (v > 0)
              cur[t][u][v] = (v > 1 ? (v - 1) * up[t][u][v - 2] : 0.0) +
                             pc.z() * up[t][u][v - 1];
          }
    }
  }
  double operator()(int t, int u, int v) const { return m_r[0][t][u][v]; }

private:
  double m_r[kMaxHermite + 1][kMaxHermite + 1][kMaxHermite + 1]
            [kMaxHermite + 1];
};

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2)
    r *= k;
  return r;
}

/// Relative normalization of a Cartesian component against x^l.
std::vector<double> component_scales(int l) {
  std::vector<double> out;
  for (const auto &p : cartesian_powers(l))
    out.push_back(std::sqrt(double_factorial(2 * l - 1) /
                            (double_factorial(2 * p[0] - 1) *
                             double_factorial(2 * p[1] - 1) *
                             double_factorial(2 * p[2] - 1))));
  return out;
}

std::vector<std::array<int, 3>> hermite_indices(int l) {
  std::vector<std::array<int, 3>> out;
  for (int t = 0; t <= l; ++t)
    for (int u = 0; u <= l - t; ++u)
      for (int v = 0; v <= l - t - u; ++v)
        out.push_back({t, u, v});
  return out;
}

enum class OneBody { Overlap, Kinetic, Nuclear };

Mat one_body(const MolecularBasis &ba, const MolecularBasis &bb, OneBody kind,
             const Molecule *mol) {
  Mat out = Mat::Zero(static_cast<Index>(ba.size()),
                      static_cast<Index>(bb.size()));
  Hermite1D hx, hy, hz;
  auto hr = std::make_unique<HermiteR>();
  const int shift = kind == OneBody::Kinetic ? 2 : 0;
  for (const auto &sa : ba.shells) {
    const auto pa = cartesian_powers(sa.l);
    const auto na = component_scales(sa.l);
    for (const auto &sb : bb.shells) {
      const auto pb = cartesian_powers(sb.l);
      const auto nb = component_scales(sb.l);
      for (std::size_t i = 0; i < sa.exponents.size(); ++i)
        for (std::size_t j = 0; j < sb.exponents.size(); ++j) {
          const double a = sa.exponents[i], b = sb.exponents[j];
          const double p = a + b;
          const double k = sa.coefficients[i] * sb.coefficients[j];
          hx.compute(sa.l, sb.l + shift, a, b, sa.center.x(), sb.center.x());
          hy.compute(sa.l, sb.l + shift, a, b, sa.center.y(), sb.center.y());
          hz.compute(sa.l, sb.l + shift, a, b, sa.center.z(), sb.center.z());
          const Vec3 pc = (a * sa.center + b * sb.center) / p;
          const double s0 = std::pow(std::numbers::pi / p, 1.5);
          for (std::size_t ca = 0; ca < pa.size(); ++ca)
            for (std::size_t cb = 0; cb < pb.size(); ++cb) {
              const auto &u = pa[ca];
              const auto &w = pb[cb];
              double value = 0.0;
              if (kind == OneBody::Overlap) {
                value = hx.e[u[0]][w[0]][0] * hy.e[u[1]][w[1]][0] *
                        hz.e[u[2]][w[2]][0] * s0;
              } else if (kind == OneBody::Kinetic) {
                const Hermite1D *h[3] = {&hx, &hy, &hz};
                double s[3], t[3];
                for (int ax = 0; ax < 3; ++ax) {
                  const int ia = u[ax], jb = w[ax];
                  const auto &e = h[ax]->e;
                  s[ax] = e[ia][jb][0];
                  t[ax] = -2.0 * b * b * e[ia][jb + 2][0] +
                          b * (2 * jb + 1) * e[ia][jb][0] -
                          (jb >= 2 ? 0.5 * jb * (jb - 1) * e[ia][jb - 2][0]
                                   : 0.0);
                }
                value = (t[0] * s[1] * s[2] + s[0] * t[1] * s[2] +
                         s[0] * s[1] * t[2]) *
                        s0;
              } else {
                const int l = sa.l + sb.l;
                for (std::size_t c = 0; c < mol->size(); ++c) {
                  hr->compute(l, p, pc - mol->positions[c]);
                  double sum = 0.0;
                  for (int tt = 0; tt <= u[0] + w[0]; ++tt)
                    for (int uu = 0; uu <= u[1] + w[1]; ++uu)
                      for (int vv = 0; vv <= u[2] + w[2]; ++vv)
                        sum += hx.e[u[0]][w[0]][tt] * hy.e[u[1]][w[1]][uu] *
                               hz.e[u[2]][w[2]][vv] * (*hr)(tt, uu, vv);
                  value -= mol->charges[c] * 2.0 * std::numbers::pi / p * sum;
                }
              }
              out(static_cast<Index>(sa.first_function + ca),
                  static_cast<Index>(sb.first_function + cb)) +=
                  k * na[ca] * nb[cb] * value;
            }
        }
    }
  }
  return out;
}

struct PrimitivePair {
  double p;
  Vec3 center;
  Mat e; // (components a * components b) x hermite functions
};

struct ShellPair {
  std::size_t a, b;
  int l;
  std::vector<PrimitivePair> prims;
};

ShellPair make_shell_pair(const MolecularBasis &basis, std::size_t ia,
                          std::size_t ib) {
  const auto &sa = basis.shells[ia];
  const auto &sb = basis.shells[ib];
  ShellPair sp{ia, ib, sa.l + sb.l, {}};
  const auto pa = cartesian_powers(sa.l), pb = cartesian_powers(sb.l);
  const auto na = component_scales(sa.l), nb = component_scales(sb.l);
  const auto herm = hermite_indices(sp.l);
  Hermite1D hx, hy, hz;
  for (std::size_t i = 0; i < sa.exponents.size(); ++i)
    for (std::size_t j = 0; j < sb.exponents.size(); ++j) {
      const double a = sa.exponents[i], b = sb.exponents[j];
      hx.compute(sa.l, sb.l, a, b, sa.center.x(), sb.center.x());
      hy.compute(sa.l, sb.l, a, b, sa.center.y(), sb.center.y());
      hz.compute(sa.l, sb.l, a, b, sa.center.z(), sb.center.z());
      PrimitivePair pp{a + b, (a * sa.center + b * sb.center) / (a + b),
                       Mat(pa.size() * pb.size(), herm.size())};
      const double k = sa.coefficients[i] * sb.coefficients[j];
      for (std::size_t ca = 0; ca < pa.size(); ++ca)
        for (std::size_t cb = 0; cb < pb.size(); ++cb) {
          const auto &u = pa[ca];
          const auto &w = pb[cb];
          const double scale = k * na[ca] * nb[cb];
          for (std::size_t h = 0; h < herm.size(); ++h) {
            const auto &tuv = herm[h];
            pp.e(static_cast<Index>(ca * pb.size() + cb),
                 static_cast<Index>(h)) =
                scale * hx.e[u[0]][w[0]][tuv[0]] * hy.e[u[1]][w[1]][tuv[1]] *
                hz.e[u[2]][w[2]][tuv[2]];
          }
        }
      sp.prims.push_back(std::move(pp));
    }
  return sp;
}

} // namespace

Mat overlap_matrix(const MolecularBasis &basis) {
  return overlap_matrix(basis, basis);
}

Mat overlap_matrix(const MolecularBasis &a, const MolecularBasis &b) {
  return one_body(a, b, OneBody::Overlap, nullptr);
}

Mat kinetic_matrix(const MolecularBasis &basis) {
  return one_body(basis, basis, OneBody::Kinetic, nullptr);
}

Mat nuclear_attraction_matrix(const MolecularBasis &basis,
                              const Molecule &mol) {
  return one_body(basis, basis, OneBody::Nuclear, &mol);
}

Tensor4 electron_repulsion_tensor(const MolecularBasis &basis,
                                  const IntegralOptions &opts) {
  const auto n = static_cast<Index>(basis.size());
  if (basis.size() > opts.max_eri_functions)
    throw ArgumentError(fmt::format(
        "{} basis functions exceed the in-memory ERI cap of {}; enable the "
        "disk-backed integral path or reduce the system",
        basis.size(), opts.max_eri_functions));

  std::vector<ShellPair> pairs;
  for (std::size_t a = 0; a < basis.shells.size(); ++a)
    for (std::size_t b = 0; b <= a; ++b)
      pairs.push_back(make_shell_pair(basis, a, b));

  std::vector<std::vector<std::array<int, 3>>> herm(kMaxHermite + 1);
  for (int l = 0; l <= kMaxHermite; ++l)
    herm[static_cast<std::size_t>(l)] = hermite_indices(l);

  Tensor4 eri = Tensor4::cube(n);
  auto hr = std::make_unique<HermiteR>();
  const double two_pi_52 = 2.0 * std::pow(std::numbers::pi, 2.5);
  Mat block, m;
  for (std::size_t ab = 0; ab < pairs.size(); ++ab) {
    const auto &bra = pairs[ab];
    const auto &hb = herm[static_cast<std::size_t>(bra.l)];
    for (std::size_t cd = 0; cd <= ab; ++cd) {
      const auto &ket = pairs[cd];
      const auto &hk = herm[static_cast<std::size_t>(ket.l)];
      block.setZero(bra.prims[0].e.rows(), ket.prims[0].e.rows());
      m.resize(static_cast<Index>(hb.size()), static_cast<Index>(hk.size()));
      for (const auto &pb : bra.prims)
        for (const auto &pk : ket.prims) {
          const double alpha = pb.p * pk.p / (pb.p + pk.p);
          hr->compute(bra.l + ket.l, alpha, pb.center - pk.center);
          for (std::size_t i = 0; i < hb.size(); ++i)
            for (std::size_t j = 0; j < hk.size(); ++j) {
              const auto &x = hb[i];
              const auto &y = hk[j];
              const double sign = ((y[0] + y[1] + y[2]) & 1) ? -1.0 : 1.0;
              m(static_cast<Index>(i), static_cast<Index>(j)) =
                  sign * (*hr)(x[0] + y[0], x[1] + y[1], x[2] + y[2]);
            }
          const double pref =
              two_pi_52 / (pb.p * pk.p * std::sqrt(pb.p + pk.p));
          block.noalias() += pref * (pb.e * m * pk.e.transpose());
        }

      const auto &sa = basis.shells[bra.a], &sb = basis.shells[bra.b];
      const auto &sc = basis.shells[ket.a], &sd = basis.shells[ket.b];
      for (int ia = 0; ia < sa.size(); ++ia)
        for (int ib = 0; ib < sb.size(); ++ib)
          for (int ic = 0; ic < sc.size(); ++ic)
            for (int id = 0; id < sd.size(); ++id) {
              const double v = block(ia * sb.size() + ib, ic * sd.size() + id);
              const auto i = static_cast<Index>(sa.first_function) + ia;
              const auto j = static_cast<Index>(sb.first_function) + ib;
              const auto k = static_cast<Index>(sc.first_function) + ic;
              const auto l = static_cast<Index>(sd.first_function) + id;
              eri(i, j, k, l) = eri(j, i, k, l) = eri(i, j, l, k) =
                  eri(j, i, l, k) = v;
              eri(k, l, i, j) = eri(l, k, i, j) = eri(k, l, j, i) =
                  eri(l, k, j, i) = v;
            }
    }
  }
  return eri;
}

IntegralSet one_electron_integrals(const Molecule &mol,
                                   const MolecularBasis &basis,
                                   const IntegralOptions &opts) {
  IntegralSet out;
  out.S = overlap_matrix(basis);
  out.T = kinetic_matrix(basis);
  out.V = nuclear_attraction_matrix(basis, mol);
  out.nuclear_repulsion = mol.nuclear_repulsion();
  Eigen::SelfAdjointEigenSolver<Mat> eig(out.S, Eigen::EigenvaluesOnly);
  const double smallest = eig.eigenvalues().minCoeff();
  if (smallest < opts.linear_dependence_threshold)
    out.warnings.push_back(fmt::format(
        "overlap matrix is nearly singular (smallest eigenvalue {:.3e})",
        smallest));
  return out;
}

IntegralSet compute_integrals(const Molecule &mol, const MolecularBasis &basis,
                              const IntegralOptions &opts) {
  auto out = one_electron_integrals(mol, basis, opts);
  out.eri = electron_repulsion_tensor(basis, opts);
  return out;
}

static_assert(std::endian::native == std::endian::little,
              "ERI binary IO assumes a little-endian host");

void write_eri_binary(const std::string &path, const Tensor4 &eri) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(fmt::format("cannot write {}", path));
  const std::int64_t n = eri.dim(0);
  out.write(reinterpret_cast<const char *>(&n), sizeof n);
  out.write(reinterpret_cast<const char *>(eri.data()),
            static_cast<std::streamsize>(eri.size() * sizeof(double)));
}

Tensor4 read_eri_binary(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error(fmt::format("cannot read {}", path));
  std::int64_t n = 0;
  in.read(reinterpret_cast<char *>(&n), sizeof n);
  if (!in || n <= 0 || n > 4096)
    throw ParseError(fmt::format("{}: bad ERI header", path));
  Tensor4 eri = Tensor4::cube(static_cast<Index>(n));
  in.read(reinterpret_cast<char *>(eri.data()),
          static_cast<std::streamsize>(eri.size() * sizeof(double)));
  if (!in)
    throw ParseError(fmt::format("{}: truncated ERI data", path));
  return eri;
}

} // namespace mofbind::qm
