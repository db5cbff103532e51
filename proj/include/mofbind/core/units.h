#pragma once

namespace mofbind::units {

inline constexpr double ANGSTROM_TO_BOHR = 1.8897259886;
inline constexpr double BOHR_TO_ANGSTROM = 1.0 / ANGSTROM_TO_BOHR;

/// Fixed conversion used for every reported binding energy.
inline constexpr double HARTREE_TO_KCALMOL = 627.5095;

template <typename Scalar> constexpr Scalar angstrom_to_bohr(Scalar x) {
  return x * Scalar(ANGSTROM_TO_BOHR);
}

template <typename Scalar> constexpr Scalar hartree_to_kcalmol(Scalar e) {
  return e * Scalar(HARTREE_TO_KCALMOL);
}

} // namespace mofbind::units
