#include <fmt/core.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/crystal/crystal.h>

namespace mofbind::crystal {

std::string OriginTag::str() const {
  return fmt::format("{}@{},{},{}", site, image[0], image[1], image[2]);
}

OriginTag OriginTag::parse(std::string_view text) {
  const auto at = text.rfind('@');
  if (at == std::string_view::npos)
    throw ParseError(fmt::format("malformed origin tag '{}'", text));
  OriginTag tag;
  tag.site = std::string(text.substr(0, at));
  const auto parts = text::split(text.substr(at + 1), ',');
  if (parts.size() != 3)
    throw ParseError(fmt::format("malformed origin tag '{}'", text));
  for (std::size_t i = 0; i < 3; ++i) {
    auto v = text::to_long(parts[i]);
    if (!v)
      throw ParseError(fmt::format("malformed origin tag '{}'", text));
    tag.image[i] = static_cast<int>(*v);
  }
  return tag;
}

std::optional<std::size_t> AtomCollection::find(const OriginTag &tag) const {
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (atoms[i].origin == tag)
      return i;
  return std::nullopt;
}

namespace {

double periodic_distance(const Lattice &lattice, const Vec3 &f1,
                         const Vec3 &f2) {
  Vec3 d = f1 - f2;
  for (int i = 0; i < 3; ++i)
    d(i) -= std::round(d(i));
  // minimum image within the neighbouring cells (handles oblique cells)
  double best = std::numeric_limits<double>::max();
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k) {
        const Vec3 shifted = d + Vec3(i, j, k);
        best = std::min(best, frac_to_cart(lattice, shifted).norm());
      }
  return best;
}

} // namespace

std::vector<AtomSite> expand_sites(const CrystalStructure &structure) {
  std::vector<AtomSite> expanded;
  for (const auto &site : structure.sites) {
    for (std::size_t k = 0; k < structure.symmetry_ops.size(); ++k) {
      const auto &op = structure.symmetry_ops[k];
      const Vec3 frac = wrap_frac(op.apply(site.frac));
      bool duplicate = false;
      for (const auto &existing : expanded) {
        if (existing.element == site.element &&
            periodic_distance(structure.lattice, existing.frac, frac) <
                kDuplicateSiteTolerance) {
          duplicate = true;
          break;
        }
      }
      if (duplicate)
        continue;
      AtomSite image = site;
      image.frac = frac;
      if (!op.is_identity())
        image.label = fmt::format("{}_s{}", site.label, k);
      expanded.push_back(std::move(image));
    }
  }
  return expanded;
}

CrystalStructure to_p1(const CrystalStructure &structure) {
  return {structure.lattice, expand_sites(structure),
          {SymmetryOperation::identity()}};
}

AtomCollection build_supercell(const CrystalStructure &structure,
                               const IVec3 &reps) {
  for (int i = 0; i < 3; ++i)
    if (reps(i) < 1)
      throw ArgumentError(fmt::format(
          "supercell repetitions must be >= 1 (got {}, {}, {})", reps(0),
          reps(1), reps(2)));
  const auto sites = expand_sites(structure);
  AtomCollection out;
  out.cell = structure.lattice.scaled(reps);
  out.atoms.reserve(sites.size() *
                    static_cast<std::size_t>(reps(0) * reps(1) * reps(2)));
  for (int i = 0; i < reps(0); ++i)
    for (int j = 0; j < reps(1); ++j)
      for (int k = 0; k < reps(2); ++k)
        for (const auto &site : sites) {
          const Vec3 frac = site.frac + Vec3(i, j, k);
          out.atoms.push_back({site.element,
                               frac_to_cart(structure.lattice, frac),
                               {site.label, {i, j, k}}});
        }
  return out;
}

} // namespace mofbind::crystal
