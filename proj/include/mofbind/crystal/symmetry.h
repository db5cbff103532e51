#pragma once
#include <mofbind/core/linear_algebra.h>
#include <string>
#include <string_view>

namespace mofbind::crystal {

/// Affine operator x' = R x + t in fractional coordinates, parsed from the
/// CIF triplet notation ("-x, y+1/2, -z"). Each component is a signed sum of
/// x, y, z and rational (p/q) or decimal constants.
class SymmetryOperation {
public:
  SymmetryOperation();
  static SymmetryOperation parse(std::string_view text);
  static SymmetryOperation identity() { return {}; }

  Vec3 apply(const Vec3 &frac) const { return m_rotation * frac + m_translation; }

  const Mat3 &rotation() const { return m_rotation; }
  const Vec3 &translation() const { return m_translation; }
  const std::string &text() const { return m_text; }
  bool is_identity() const;

  bool operator==(const SymmetryOperation &other) const {
    return m_rotation == other.m_rotation &&
           m_translation == other.m_translation;
  }

private:
  Mat3 m_rotation;
  Vec3 m_translation;
  std::string m_text;
};

} // namespace mofbind::crystal
