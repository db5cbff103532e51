#pragma once
#include <optional>
#include <string>
#include <string_view>

namespace mofbind {

/// Tabulated per-element data used for bonding and electron counting.
struct Element {
  int atomic_number{0};
  std::string_view symbol;
  double covalent_radius{0.0}; // Angstrom
  bool metal{false};
};

/// Lookup by symbol; case-insensitive ("FE", "fe", "Fe"). Throws
/// ArgumentError for symbols outside the table.
const Element &element(std::string_view symbol);
const Element &element(int atomic_number);
std::optional<Element> find_element(std::string_view symbol);

/// Canonical capitalization, e.g. "fe" -> "Fe".
std::string normalize_symbol(std::string_view symbol);

} // namespace mofbind
