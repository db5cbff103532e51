#pragma once
#include <mofbind/core/linear_algebra.h>

namespace mofbind::crystal {

/// Periodic cell from lengths (Angstrom) and angles (degrees).
///
/// Cartesian frame: a along +x, b in the xy-plane, c completing a
/// right-handed cell. `matrix()` holds the lattice vectors as columns, so
/// cart = matrix() * frac (its transpose is the familiar lower-triangular
/// row-vector form).
class Lattice {
public:
  Lattice(double a, double b, double c, double alpha, double beta,
          double gamma);

  double a() const { return m_lengths(0); }
  double b() const { return m_lengths(1); }
  double c() const { return m_lengths(2); }
  double alpha() const { return m_angles(0); }
  double beta() const { return m_angles(1); }
  double gamma() const { return m_angles(2); }
  const Vec3 &lengths() const { return m_lengths; }
  const Vec3 &angles() const { return m_angles; }

  const Mat3 &matrix() const { return m_matrix; }
  const Mat3 &inverse() const { return m_inverse; }
  double volume() const { return m_matrix.determinant(); }

  /// Distance between opposite faces of the cell for each axis.
  Vec3 interplanar_spacings() const;

  /// Lattice of an r1 x r2 x r3 supercell sharing this origin.
  Lattice scaled(const IVec3 &reps) const;

  bool operator==(const Lattice &other) const {
    return m_lengths == other.m_lengths && m_angles == other.m_angles;
  }

private:
  Vec3 m_lengths;
  Vec3 m_angles;
  Mat3 m_matrix;
  Mat3 m_inverse;
};

template <typename Derived>
Vec3T<typename Derived::Scalar>
frac_to_cart(const Lattice &lattice, const Eigen::MatrixBase<Derived> &frac) {
  using Scalar = typename Derived::Scalar;
  return lattice.matrix().template cast<Scalar>() * frac;
}

template <typename Derived>
Vec3T<typename Derived::Scalar>
cart_to_frac(const Lattice &lattice, const Eigen::MatrixBase<Derived> &cart) {
  using Scalar = typename Derived::Scalar;
  return lattice.inverse().template cast<Scalar>() * cart;
}

/// Wrap each component into [0, 1).
Vec3 wrap_frac(const Vec3 &frac);

} // namespace mofbind::crystal
