#pragma once
#include <mofbind/crystal/crystal.h>
#include <string>
#include <string_view>

namespace mofbind::crystal {

/// Line 1 atom count, line 2 comment, then "El x y z" in Angstrom with
/// twelve decimals. Throws ArgumentError("empty structure") for no atoms.
std::string write_xyz(const AtomCollection &atoms,
                      std::string_view comment = "");

/// Origin tags of parsed atoms are "xyz<index>" in image (0,0,0).
AtomCollection parse_xyz(std::string_view text);

AtomCollection read_xyz(const std::string &path);
void write_xyz_file(const std::string &path, const AtomCollection &atoms,
                    std::string_view comment = "");

} // namespace mofbind::crystal
