#include <fmt/core.h>
#include <mofbind/cluster/cluster.h>
#include <mofbind/core/elements.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/core/units.h>
#include <mofbind/qm/molecule.h>

namespace mofbind::qm {

int Molecule::nuclear_charge() const {
  int z = 0;
  for (int c : charges)
    z += c;
  return z;
}

double Molecule::nuclear_repulsion() const {
  double e = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      e += charges[i] * charges[j] / (positions[i] - positions[j]).norm();
  return e;
}

void Molecule::add_atom(std::string_view element_symbol,
                        const Vec3 &position_angstrom) {
  const auto &el = element(element_symbol);
  elements.emplace_back(el.symbol);
  charges.push_back(el.atomic_number);
  positions.push_back(units::angstrom_to_bohr(1.0) * position_angstrom);
}

Molecule Molecule::from_cluster(const cluster::Cluster &cluster) {
  Molecule mol;
  for (const auto &a : cluster.atoms)
    mol.add_atom(a.element, a.position);
  return mol;
}

namespace {

double coordinate(std::string_view token) {
  auto v = text::to_double(token);
  if (!v)
    throw ParseError(fmt::format("bad coordinate '{}'", token));
  return *v;
}

} // namespace

Molecule Molecule::parse(std::string_view spec) {
  Molecule mol;
  std::string normalized(spec);
  for (auto &c : normalized)
    if (c == ';')
      c = '\n';
  for (const auto &line : text::split_lines(normalized)) {
    const auto fields = text::split_whitespace(line);
    if (fields.empty())
      continue;
    if (fields.size() != 4)
      throw ParseError(fmt::format("bad atom entry '{}'", text::trim(line)));
    mol.add_atom(fields[0], Vec3(coordinate(fields[1]), coordinate(fields[2]),
                                 coordinate(fields[3])));
  }
  if (mol.size() == 0)
    throw ParseError("molecule has no atoms");
  return mol;
}

} // namespace mofbind::qm
