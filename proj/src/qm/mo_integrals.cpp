#include <fmt/core.h>
#include <mofbind/core/error.h>
#include <mofbind/qm/mo_integrals.h>

namespace mofbind::qm {

MoIntegrals mo_transform(const IntegralSet &ints,
                         const std::array<Mat, 2> &ao_fock,
                         const std::array<Mat, 2> &coefficients,
                         const std::array<int, 2> &n_occ, SpinMode mode,
                         double reference_energy) {
  MoIntegrals mo;
  mo.mode = mode;
  mo.n_occ = n_occ;
  mo.reference_energy = reference_energy;
  const Mat h = ints.core_hamiltonian();
  for (int s = 0; s < 2; ++s) {
    const Mat &c = coefficients[s];
    if (c.rows() != ints.size())
      throw ArgumentError("coefficient rows do not match the AO basis");
    if (n_occ[s] < 0 || n_occ[s] > c.cols())
      throw ArgumentError("occupied count outside the orbital range");
    mo.h[s] = c.transpose() * h * c;
    mo.fock[s] = c.transpose() * ao_fock[s] * c;
    mo.overlap[s] = c.transpose() * ints.S * c;
  }
  const Mat &ca = coefficients[0];
  const Mat &cb = coefficients[1];
  mo.eri_aa = transform4(ints.eri, ca, ca, ca, ca);
  if (mode == SpinMode::Restricted) {
    mo.eri_ab = mo.eri_aa;
    mo.eri_bb = mo.eri_aa;
  } else {
    mo.eri_ab = transform4(ints.eri, ca, ca, cb, cb);
    mo.eri_bb = transform4(ints.eri, cb, cb, cb, cb);
  }
  return mo;
}

MoIntegrals mo_transform(const IntegralSet &ints, const MeanFieldResult &mf) {
  if (!mf.converged)
    throw ArgumentError(fmt::format(
        "mean field is not converged (gradient norm {:.3e} after {} "
        "iterations)",
        mf.gradient_norm, mf.iterations));
  const auto fock = fock_matrices(ints, {mf.density(0), mf.density(1)});
  return mo_transform(ints, fock, mf.coefficients, mf.n_occ, mf.mode,
                      mf.energy);
}

} // namespace mofbind::qm
