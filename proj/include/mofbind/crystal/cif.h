#pragma once
#include <mofbind/crystal/crystal.h>
#include <string_view>

namespace mofbind::crystal {

/// Parse the CIF subset used by computation-ready MOF files: the six cell
/// tags, the atom-site loop (label, type symbol, fractional coordinates)
/// and an optional symmetry-operator loop. Every other tag is ignored.
/// Throws ParseError naming the missing tag or the offending operator.
CrystalStructure parse_cif(std::string_view text);

CrystalStructure read_cif(const std::string &path);

} // namespace mofbind::crystal
