#include <cmath>
#include <fmt/core.h>
#include <mofbind/core/error.h>
#include <mofbind/crystal/lattice.h>
#include <numbers>

namespace mofbind::crystal {

namespace {
double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }
} // namespace

Lattice::Lattice(double a, double b, double c, double alpha, double beta,
                 double gamma)
    : m_lengths(a, b, c), m_angles(alpha, beta, gamma) {
  for (int i = 0; i < 3; ++i) {
    if (!(m_lengths(i) > 0.0) || !std::isfinite(m_lengths(i)))
      throw ArgumentError(
          fmt::format("cell lengths must be positive (got {})", m_lengths(i)));
    if (!(m_angles(i) > 0.0 && m_angles(i) < 180.0))
      throw ArgumentError(fmt::format(
          "cell angles must lie in (0, 180) degrees (got {})", m_angles(i)));
  }
  const double ca = std::cos(radians(alpha)), cb = std::cos(radians(beta));
  const double cg = std::cos(radians(gamma)), sg = std::sin(radians(gamma));
  const double cy = (ca - cb * cg) / sg;
  const double cz2 = 1.0 - cb * cb - cy * cy;
  if (!(cz2 > 0.0))
    throw ArgumentError("cell angles do not describe a cell of positive volume");
  m_matrix << a, b * cg, c * cb,  //
      0.0, b * sg, c * cy,        //
      0.0, 0.0, c * std::sqrt(cz2);
  m_inverse = m_matrix.inverse();
}

Vec3 Lattice::interplanar_spacings() const {
  const Vec3 va = m_matrix.col(0), vb = m_matrix.col(1), vc = m_matrix.col(2);
  const double v = volume();
  return {v / vb.cross(vc).norm(), v / vc.cross(va).norm(),
          v / va.cross(vb).norm()};
}

Lattice Lattice::scaled(const IVec3 &reps) const {
  return {a() * reps(0), b() * reps(1), c() * reps(2),
          alpha(),       beta(),        gamma()};
}

Vec3 wrap_frac(const Vec3 &frac) {
  Vec3 w;
  for (int i = 0; i < 3; ++i) {
    w(i) = frac(i) - std::floor(frac(i));
    if (w(i) >= 1.0)
      w(i) = 0.0;
  }
  return w;
}

} // namespace mofbind::crystal
