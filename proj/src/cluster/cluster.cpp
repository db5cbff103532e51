#include <algorithm>
#include <fmt/core.h>
#include <mofbind/cluster/cluster.h>
#include <mofbind/core/elements.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/crystal/xyz.h>

namespace mofbind::cluster {

namespace {
constexpr std::pair<Role, std::string_view> kRoleNames[] = {
    {Role::Metal, "metal"}, {Role::Cap, "cap"}, {Role::Mobile, "mobile"},
    {Role::Close, "close"}, {Role::CO2, "co2"}};
constexpr std::pair<GroupKind, std::string_view> kGroupNames[] = {
    {GroupKind::Metal, "metal"},       {GroupKind::Formate, "formate"},
    {GroupKind::Hydroxylate, "hydroxylate"}, {GroupKind::Chloride, "chloride"},
    {GroupKind::Linker, "linker"},     {GroupKind::Molecule, "molecule"}};
} // namespace

std::string RoleSet::str() const {
  std::string out;
  for (auto [role, name] : kRoleNames) {
    if (!has(role))
      continue;
    if (!out.empty())
      out += ',';
    out += name;
  }
  return out.empty() ? "-" : out;
}

RoleSet RoleSet::parse(std::string_view text) {
  RoleSet roles;
  text = text::trim(text);
  if (text == "-" || text.empty())
    return roles;
  for (auto part : text::split(text, ',')) {
    bool found = false;
    for (auto [role, name] : kRoleNames) {
      if (text::trim(part) == name) {
        roles.add(role);
        found = true;
      }
    }
    if (!found)
      throw ParseError(fmt::format("unknown role tag '{}'", part));
  }
  return roles;
}

std::string_view to_string(GroupKind kind) {
  for (auto [k, name] : kGroupNames)
    if (k == kind)
      return name;
  return "molecule";
}

GroupKind group_kind_from_string(std::string_view s) {
  for (auto [k, name] : kGroupNames)
    if (name == s)
      return k;
  throw ParseError(fmt::format("unknown charge group kind '{}'", s));
}

int Cluster::nuclear_charge() const {
  int z = 0;
  for (const auto &a : atoms)
    z += element(a.element).atomic_number;
  return z;
}

std::vector<std::size_t> Cluster::indices_with(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (atoms[i].roles.has(role))
      out.push_back(i);
  return out;
}

std::optional<std::size_t> Cluster::find(const crystal::OriginTag &tag,
                                         bool include_caps) const {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!include_caps && atoms[i].roles.has(Role::Cap))
      continue;
    if (atoms[i].provenance == tag)
      return i;
  }
  return std::nullopt;
}

crystal::AtomCollection Cluster::to_atom_collection() const {
  crystal::AtomCollection out;
  for (const auto &a : atoms)
    out.atoms.push_back({a.element, a.position, a.provenance});
  return out;
}

void Cluster::add_molecule(const crystal::AtomCollection &molecule,
                           RoleSet roles) {
  const int gid = static_cast<int>(groups.size());
  groups.push_back({GroupKind::Molecule, 0});
  for (const auto &a : molecule.atoms)
    atoms.push_back({a.element, a.position, roles, a.origin, gid, {}});
}

void Cluster::canonicalize() {
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const ClusterAtom &x, const ClusterAtom &y) {
                     const bool cx = x.roles.has(Role::Cap);
                     const bool cy = y.roles.has(Role::Cap);
                     if (cx != cy)
                       return !cx;
                     if (cx) {
                       const auto ax = x.cap_anchor.value_or(x.provenance);
                       const auto ay = y.cap_anchor.value_or(y.provenance);
                       if (ax != ay)
                         return ax < ay;
                     }
                     return x.provenance < y.provenance;
                   });
  // Renumber groups by first appearance.
  std::vector<int> remap(groups.size(), -1);
  std::vector<ChargeGroup> ordered;
  for (auto &a : atoms) {
    if (a.group < 0)
      continue;
    auto &slot = remap[static_cast<std::size_t>(a.group)];
    if (slot < 0) {
      slot = static_cast<int>(ordered.size());
      ordered.push_back(groups[static_cast<std::size_t>(a.group)]);
    }
    a.group = slot;
  }
  groups = std::move(ordered);
}

void Cluster::validate_spin() const {
  const int electrons = electron_count();
  if (electrons < 1)
    throw ArgumentError(
        fmt::format("cluster has {} electrons (net charge {})", electrons,
                    net_charge));
  if (n_unpaired < 0 || n_unpaired > electrons ||
      (electrons - n_unpaired) % 2 != 0)
    throw ArgumentError(fmt::format(
        "{} unpaired electrons is inconsistent with {} electrons", n_unpaired,
        electrons));
}

std::string write_sidecar(const Cluster &cluster) {
  std::string out = "# mofbind cluster sidecar v1\n";
  out += fmt::format("# net_charge {}\n# n_unpaired {}\n", cluster.net_charge,
                     cluster.n_unpaired);
  for (std::size_t g = 0; g < cluster.groups.size(); ++g)
    out += fmt::format("# group {} {} {}\n", g,
                       to_string(cluster.groups[g].kind),
                       cluster.groups[g].charge);
  out += "index\telement\tprovenance\troles\tgroup\tcap_anchor\n";
  for (std::size_t i = 0; i < cluster.atoms.size(); ++i) {
    const auto &a = cluster.atoms[i];
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\n", i, a.element,
                       a.provenance.str(), a.roles.str(), a.group,
                       a.cap_anchor ? a.cap_anchor->str() : "-");
  }
  return out;
}

Cluster read_cluster(std::string_view xyz_text, std::string_view sidecar_text) {
  const auto geometry = crystal::parse_xyz(xyz_text);
  Cluster cluster;
  bool header_seen = false;
  for (auto line : text::split_lines(sidecar_text)) {
    line = text::trim(line);
    if (line.empty())
      continue;
    if (line.front() == '#') {
      const auto f = text::split_whitespace(line.substr(1));
      if (f.size() == 2 && f[0] == "net_charge")
        cluster.net_charge = static_cast<int>(text::to_long(f[1]).value_or(0));
      else if (f.size() == 2 && f[0] == "n_unpaired")
        cluster.n_unpaired = static_cast<int>(text::to_long(f[1]).value_or(0));
      else if (f.size() == 4 && f[0] == "group")
        cluster.groups.push_back(
            {group_kind_from_string(f[2]),
             static_cast<int>(text::to_long(f[3]).value_or(0))});
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto f = text::split(line, '\t');
    if (f.size() != 6)
      throw ParseError(fmt::format("malformed sidecar row '{}'", line));
    const auto index = text::to_long(f[0]);
    if (!index || *index < 0 ||
        static_cast<std::size_t>(*index) >= geometry.size() ||
        static_cast<std::size_t>(*index) != cluster.atoms.size())
      throw ParseError(fmt::format("sidecar row index '{}' does not match "
                                   "the XYZ geometry",
                                   f[0]));
    const auto &g = geometry.atoms[static_cast<std::size_t>(*index)];
    if (normalize_symbol(f[1]) != g.element)
      throw ParseError(fmt::format("sidecar element {} disagrees with XYZ "
                                   "element {} at index {}",
                                   f[1], g.element, *index));
    ClusterAtom atom;
    atom.element = g.element;
    atom.position = g.position;
    atom.provenance = crystal::OriginTag::parse(f[2]);
    atom.roles = RoleSet::parse(f[3]);
    atom.group = static_cast<int>(text::to_long(f[4]).value_or(-1));
    if (f[5] != "-")
      atom.cap_anchor = crystal::OriginTag::parse(f[5]);
    cluster.atoms.push_back(std::move(atom));
  }
  if (cluster.atoms.size() != geometry.size())
    throw ParseError(fmt::format("sidecar lists {} atoms, XYZ has {}",
                                 cluster.atoms.size(), geometry.size()));
  return cluster;
}

void write_cluster_files(const std::string &prefix, const Cluster &cluster) {
  crystal::write_xyz_file(prefix + ".xyz", cluster.to_atom_collection(),
                          fmt::format("charge={} unpaired={}",
                                      cluster.net_charge, cluster.n_unpaired));
  text::write_file(prefix + ".atoms.tsv", write_sidecar(cluster));
}

Cluster read_cluster_files(const std::string &prefix) {
  return read_cluster(text::read_file(prefix + ".xyz"),
                      text::read_file(prefix + ".atoms.tsv"));
}

} // namespace mofbind::cluster
