#pragma once
#include <array>
#include <compare>
#include <mofbind/core/linear_algebra.h>
#include <mofbind/crystal/lattice.h>
#include <mofbind/crystal/symmetry.h>
#include <optional>
#include <string>
#include <vector>

namespace mofbind::crystal {

struct AtomSite {
  std::string element;
  Vec3 frac{Vec3::Zero()}; // wrapped into [0, 1)
  std::string label;

  bool operator==(const AtomSite &) const = default;
};

struct CrystalStructure {
  Lattice lattice;
  std::vector<AtomSite> sites;
  std::vector<SymmetryOperation> symmetry_ops; // identity always present

  bool operator==(const CrystalStructure &) const = default;
};

/// Where a Cartesian atom came from: a symmetry-expanded site and the cell
/// image it was replicated into.
struct OriginTag {
  std::string site;
  std::array<int, 3> image{0, 0, 0};

  std::string str() const;
  static OriginTag parse(std::string_view text);
  auto operator<=>(const OriginTag &) const = default;
  bool operator==(const OriginTag &) const = default;
};

struct Atom {
  std::string element;
  Vec3 position{Vec3::Zero()}; // Angstrom
  OriginTag origin;

  bool operator==(const Atom &) const = default;
};

struct AtomCollection {
  std::vector<Atom> atoms;
  /// Set when the atoms fill a periodic supercell with origin at 0.
  std::optional<Lattice> cell;

  std::size_t size() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }
  std::optional<std::size_t> find(const OriginTag &tag) const;
};

/// Duplicate-site threshold after symmetry expansion (Angstrom).
inline constexpr double kDuplicateSiteTolerance = 1e-3;

/// All symmetry images of the asymmetric unit, wrapped and deduplicated
/// (same element within kDuplicateSiteTolerance under periodicity).
/// Images generated by a non-identity operator are labelled "<label>_s<k>".
std::vector<AtomSite> expand_sites(const CrystalStructure &structure);

/// Equivalent structure in P1 (expanded sites, identity operator only).
CrystalStructure to_p1(const CrystalStructure &structure);

/// Replicate every expanded site over images 0..reps-1 along each axis.
AtomCollection build_supercell(const CrystalStructure &structure,
                               const IVec3 &reps);

} // namespace mofbind::crystal
