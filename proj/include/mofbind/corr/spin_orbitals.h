#pragma once
#include <mofbind/corr/correlation.h>

namespace mofbind::corr {

/// Window integrals in an explicit spin-orbital basis: occupied spin
/// orbitals first (alpha, then beta), then virtual ones (alpha, then beta).
struct SpinOrbitalSystem {
  Index o{0}, v{0}, n{0};
  std::vector<int> spin;
  std::vector<Index> orbital; // MO index within the channel
  Mat f;                      // Fock operator
  Tensor4 g;                  // <pq||rs>

  SpinOrbitalSystem(const MoIntegrals &mo, const OrbitalWindow &w);

  /// Spin-orbital amplitudes (occupied x virtual local indices) to blocks.
  Amplitudes to_blocks(const OrbitalWindow &w, const Mat &t1,
                       const Tensor4 &t2) const;
};

} // namespace mofbind::corr
