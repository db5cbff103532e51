#include <algorithm>
#include <array>
#include <cctype>
#include <fmt/core.h>
#include <mofbind/core/elements.h>
#include <mofbind/core/error.h>

namespace mofbind {

namespace {

// Covalent radii: Cordero et al., Dalton Trans. (2008) 2832; low-spin values
// for Mn, Fe, Co and sp3 carbon.
constexpr std::array<Element, 54> kElements{{
    {1, "H", 0.31, false},   {2, "He", 0.28, false},  {3, "Li", 1.28, true},
    {4, "Be", 0.96, true},   {5, "B", 0.84, false},   {6, "C", 0.76, false},
    {7, "N", 0.71, false},   {8, "O", 0.66, false},   {9, "F", 0.57, false},
    {10, "Ne", 0.58, false}, {11, "Na", 1.66, true},  {12, "Mg", 1.41, true},
    {13, "Al", 1.21, true},  {14, "Si", 1.11, false}, {15, "P", 1.07, false},
    {16, "S", 1.05, false},  {17, "Cl", 1.02, false}, {18, "Ar", 1.06, false},
    {19, "K", 2.03, true},   {20, "Ca", 1.76, true},  {21, "Sc", 1.70, true},
    {22, "Ti", 1.60, true},  {23, "V", 1.53, true},   {24, "Cr", 1.39, true},
    {25, "Mn", 1.39, true},  {26, "Fe", 1.32, true},  {27, "Co", 1.26, true},
    {28, "Ni", 1.24, true},  {29, "Cu", 1.32, true},  {30, "Zn", 1.22, true},
    {31, "Ga", 1.22, true},  {32, "Ge", 1.20, false}, {33, "As", 1.19, false},
    {34, "Se", 1.20, false}, {35, "Br", 1.20, false}, {36, "Kr", 1.16, false},
    {37, "Rb", 2.20, true},  {38, "Sr", 1.95, true},  {39, "Y", 1.90, true},
    {40, "Zr", 1.75, true},  {41, "Nb", 1.64, true},  {42, "Mo", 1.54, true},
    {43, "Tc", 1.47, true},  {44, "Ru", 1.46, true},  {45, "Rh", 1.42, true},
    {46, "Pd", 1.39, true},  {47, "Ag", 1.45, true},  {48, "Cd", 1.44, true},
    {49, "In", 1.42, true},  {50, "Sn", 1.39, true},  {51, "Sb", 1.39, false},
    {52, "Te", 1.38, false}, {53, "I", 1.39, false},  {54, "Xe", 1.40, false},
}};

} // namespace

std::string normalize_symbol(std::string_view symbol) {
  std::string s;
  for (char c : symbol) {
    if (std::isalpha(static_cast<unsigned char>(c)))
      s.push_back(static_cast<char>(
          s.empty() ? std::toupper(static_cast<unsigned char>(c))
                    : std::tolower(static_cast<unsigned char>(c))));
  }
  return s;
}

std::optional<Element> find_element(std::string_view symbol) {
  const std::string s = normalize_symbol(symbol);
  auto it = std::find_if(kElements.begin(), kElements.end(),
                         [&](const Element &e) { return e.symbol == s; });
  if (it == kElements.end())
    return std::nullopt;
  return *it;
}

const Element &element(std::string_view symbol) {
  const std::string s = normalize_symbol(symbol);
  auto it = std::find_if(kElements.begin(), kElements.end(),
                         [&](const Element &e) { return e.symbol == s; });
  if (it == kElements.end())
    throw ArgumentError(fmt::format("unknown element symbol '{}'", symbol));
  return *it;
}

const Element &element(int atomic_number) {
  if (atomic_number < 1 || atomic_number > static_cast<int>(kElements.size()))
    throw ArgumentError(
        fmt::format("no element data for Z = {}", atomic_number));
  return kElements[static_cast<std::size_t>(atomic_number - 1)];
}

} // namespace mofbind
