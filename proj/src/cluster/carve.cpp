#include <algorithm>
#include <fmt/core.h>
#include <mofbind/cluster/carve.h>
#include <mofbind/core/elements.h>
#include <mofbind/core/error.h>
#include <numeric>

namespace mofbind::cluster {

using crystal::AtomCollection;
using crystal::OriginTag;

void CarveConfig::validate() const {
  if (!(radius > 0.0))
    throw ArgumentError(fmt::format("carve radius must be positive (got {})",
                                    radius));
  if (n_small_metals < 1 || n_small_metals > n_medium_metals)
    throw ArgumentError(fmt::format(
        "need 1 <= n_small_metals ({}) <= n_medium_metals ({})",
        n_small_metals, n_medium_metals));
  if (!(bond_scale > 0.0))
    throw ArgumentError("bond_scale must be positive");
}

namespace {

bool is_metal(const std::string &el) { return element(el).metal; }

bool is_terminal_oxygen(const AtomCollection &atoms, const BondGraph &graph,
                        std::size_t o, std::size_t c) {
  if (atoms.atoms[o].element != "O")
    return false;
  for (auto n : graph.neighbors[o])
    if (n != c && !is_metal(atoms.atoms[n].element))
      return false;
  return true;
}

std::vector<std::size_t> metal_neighbors(const AtomCollection &atoms,
                                         const BondGraph &graph,
                                         std::span<const std::size_t> group) {
  std::vector<std::size_t> out;
  for (auto a : group)
    if (atoms.atoms[a].element == "O")
      for (auto n : graph.neighbors[a])
        if (is_metal(atoms.atoms[n].element))
          out.push_back(n);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

} // namespace

LinkerAnalysis analyze_linkers(const AtomCollection &atoms,
                               const BondGraph &graph) {
  const std::size_t n = atoms.size();
  LinkerAnalysis out;
  out.component_of.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.component_of[i] >= 0 || is_metal(atoms.atoms[i].element))
      continue;
    const int id = static_cast<int>(out.components.size());
    std::vector<std::size_t> members{i};
    out.component_of[i] = id;
    for (std::size_t k = 0; k < members.size(); ++k)
      for (auto nb : graph.neighbors[members[k]])
        if (out.component_of[nb] < 0 && !is_metal(atoms.atoms[nb].element)) {
          out.component_of[nb] = id;
          members.push_back(nb);
        }
    std::sort(members.begin(), members.end());
    out.components.push_back(std::move(members));
  }

  std::vector<bool> in_carboxylate(n, false);
  for (std::size_t c = 0; c < n; ++c) {
    if (atoms.atoms[c].element != "C")
      continue;
    std::vector<std::size_t> oxygens, others;
    for (auto nb : graph.neighbors[c]) {
      if (is_metal(atoms.atoms[nb].element))
        continue;
      if (is_terminal_oxygen(atoms, graph, nb, c))
        oxygens.push_back(nb);
      else
        others.push_back(nb);
    }
    if (oxygens.size() != 2 || others.size() != 1)
      continue;
    LigandGroup g;
    g.kind = LigandGroup::Kind::Carboxylate;
    g.anchor = c;
    g.atoms = {c, oxygens[0], oxygens[1]};
    if (atoms.atoms[others[0]].element == "H")
      g.atoms.push_back(others[0]);
    else
      g.severed = others[0];
    g.metals = metal_neighbors(atoms, graph, g.atoms);
    g.component = out.component_of[c];
    for (auto a : g.atoms)
      in_carboxylate[a] = true;
    out.groups.push_back(std::move(g));
  }
  for (std::size_t o = 0; o < n; ++o) {
    if (atoms.atoms[o].element != "O" || in_carboxylate[o])
      continue;
    std::vector<std::size_t> organic;
    bool has_metal = false;
    for (auto nb : graph.neighbors[o]) {
      if (is_metal(atoms.atoms[nb].element))
        has_metal = true;
      else
        organic.push_back(nb);
    }
    if (!has_metal || organic.size() != 1)
      continue;
    LigandGroup g;
    g.kind = LigandGroup::Kind::Alkoxide;
    g.anchor = o;
    g.atoms = {o};
    if (atoms.atoms[organic[0]].element == "H")
      g.atoms.push_back(organic[0]);
    else
      g.severed = organic[0];
    g.metals = metal_neighbors(atoms, graph, g.atoms);
    g.component = out.component_of[o];
    out.groups.push_back(std::move(g));
  }
  std::sort(out.groups.begin(), out.groups.end(),
            [](const LigandGroup &a, const LigandGroup &b) {
              return a.anchor < b.anchor;
            });
  out.groups_of_component.resize(out.components.size());
  for (std::size_t g = 0; g < out.groups.size(); ++g)
    out.groups_of_component[static_cast<std::size_t>(out.groups[g].component)]
        .push_back(g);
  return out;
}

namespace {

/// Accumulates cluster atoms from supercell indices with their groups.
class ClusterBuilder {
public:
  ClusterBuilder(const AtomCollection &supercell, const CarveConfig &cfg)
      : m_atoms(supercell), m_cfg(cfg) {}

  void add_metal(std::size_t i) {
    if (m_used.count(i))
      return;
    const int gid = new_group(GroupKind::Metal, m_cfg.metal_charge);
    push(i, RoleSet{Role::Metal}, gid);
    const auto &el = m_atoms.atoms[i].element;
    auto it = m_cfg.unpaired_per_metal.find(el);
    if (it != m_cfg.unpaired_per_metal.end())
      m_cluster.n_unpaired += it->second;
  }

  /// A carboxylate as formate or an alkoxide as hydroxylate, capped with H
  /// along the severed bond.
  void add_capped_group(const LigandGroup &g) {
    if (m_used.count(g.anchor))
      return;
    const bool carboxylate = g.kind == LigandGroup::Kind::Carboxylate;
    const int gid = new_group(
        carboxylate ? GroupKind::Formate : GroupKind::Hydroxylate, -1);
    for (auto a : g.atoms)
      push(a, {}, gid);
    if (g.severed)
      add_cap(g.anchor, *g.severed,
              carboxylate ? m_cfg.ch_cap_length : m_cfg.oh_cap_length, gid);
  }

  /// Component atoms minus `removed` groups; the linker atom left behind by
  /// each removed group is capped with H.
  void add_component(const LinkerAnalysis &la, std::size_t component,
                     const std::vector<const LigandGroup *> &removed) {
    std::set<std::size_t> drop;
    for (const auto *g : removed)
      drop.insert(g->atoms.begin(), g->atoms.end());
    const int n_groups =
        static_cast<int>(la.groups_of_component[component].size()) -
        static_cast<int>(removed.size());
    const int gid = new_group(GroupKind::Linker, -n_groups);
    for (auto a : la.components[component])
      if (!drop.count(a))
        push(a, {}, gid);
    for (const auto *g : removed)
      if (g->severed)
        add_cap(*g->severed, g->anchor, m_cfg.ch_cap_length, gid);
  }

  bool contains(std::size_t i) const { return m_used.count(i) > 0; }

  void add_chloride(const ChlorideSite &site, double bond_scale) {
    std::optional<std::size_t> metal;
    for (std::size_t k = 0; k < m_cluster.atoms.size(); ++k)
      if (m_cluster.atoms[k].roles.has(Role::Metal) &&
          m_cluster.atoms[k].provenance == site.metal)
        metal = k;
    if (!metal)
      throw ArgumentError(fmt::format(
          "chloride_completion references metal {} which is not in the "
          "cluster",
          site.metal.str()));
    const Vec3 m = m_cluster.atoms[*metal].position;
    Vec3 position;
    if (site.position) {
      position = *site.position;
    } else {
      std::vector<std::string> els;
      std::vector<Vec3> pos;
      for (const auto &a : m_cluster.atoms) {
        els.push_back(a.element);
        pos.push_back(a.position);
      }
      const auto graph = detect_bonds(els, pos, bond_scale);
      Vec3 sum = Vec3::Zero();
      for (auto nb : graph.neighbors[*metal])
        sum += (pos[nb] - m).normalized();
      if (sum.norm() < 1e-6)
        throw ArgumentError(fmt::format(
            "cannot infer a chloride direction for metal {}; give an "
            "explicit position",
            site.metal.str()));
      position = m - m_cfg.metal_chloride_length * sum.normalized();
    }
    const int gid = new_group(GroupKind::Chloride, -1);
    ClusterAtom cl;
    cl.element = "Cl";
    cl.position = position;
    cl.roles = RoleSet{Role::Cap};
    cl.provenance = {fmt::format("Cl({})", site.metal.site), site.metal.image};
    cl.group = gid;
    cl.cap_anchor = site.metal;
    m_cluster.atoms.push_back(std::move(cl));
  }

  Cluster &cluster() { return m_cluster; }

  Cluster finish() {
    int charge = 0;
    for (const auto &g : m_cluster.groups)
      charge += g.charge;
    m_cluster.net_charge = m_cfg.net_charge_override.value_or(charge);
    m_cluster.canonicalize();
    m_cluster.validate_spin();
    return std::move(m_cluster);
  }

private:
  int new_group(GroupKind kind, int charge) {
    m_cluster.groups.push_back({kind, charge});
    return static_cast<int>(m_cluster.groups.size()) - 1;
  }

  void push(std::size_t i, RoleSet roles, int gid) {
    if (!m_used.insert(i).second)
      return;
    const auto &a = m_atoms.atoms[i];
    m_cluster.atoms.push_back({a.element, a.position, roles, a.origin, gid, {}});
  }

  void add_cap(std::size_t anchor, std::size_t replaced, double length,
               int gid) {
    const Vec3 a = m_atoms.atoms[anchor].position;
    const Vec3 dir = (m_atoms.atoms[replaced].position - a).normalized();
    ClusterAtom cap;
    cap.element = "H";
    cap.position = a + length * dir;
    cap.roles = RoleSet{Role::Cap};
    cap.provenance = m_atoms.atoms[replaced].origin;
    cap.group = gid;
    cap.cap_anchor = m_atoms.atoms[anchor].origin;
    m_cluster.atoms.push_back(std::move(cap));
  }

  const AtomCollection &m_atoms;
  const CarveConfig &m_cfg;
  Cluster m_cluster;
  std::set<std::size_t> m_used;
};

std::size_t require_tag(const AtomCollection &atoms, const OriginTag &tag) {
  auto idx = atoms.find(tag);
  if (!idx)
    throw ArgumentError(
        fmt::format("atom {} not found in the supercell", tag.str()));
  return *idx;
}

void check_sphere_inside(const AtomCollection &supercell, const Vec3 &center,
                         double radius) {
  if (!supercell.cell)
    return;
  const Vec3 frac = crystal::cart_to_frac(*supercell.cell, center);
  const Vec3 spacing = supercell.cell->interplanar_spacings();
  for (int k = 0; k < 3; ++k) {
    const double margin = std::min(frac(k), 1.0 - frac(k)) * spacing(k);
    if (margin < radius)
      throw ArgumentError(fmt::format(
          "carve sphere of radius {:.3f} A crosses the supercell boundary "
          "along axis {} ({:.3f} A available); use more supercell "
          "repetitions",
          radius, "abc"[k], margin));
  }
}

std::vector<std::size_t> nearest_metals(const AtomCollection &atoms,
                                        const Vec3 &site, int count) {
  std::vector<std::size_t> metals;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (is_metal(atoms.atoms[i].element))
      metals.push_back(i);
  if (static_cast<int>(metals.size()) < count)
    throw ArgumentError(
        fmt::format("requested {} metal centres but the structure has {}",
                    count, metals.size()));
  std::sort(metals.begin(), metals.end(), [&](std::size_t a, std::size_t b) {
    const double da = (atoms.atoms[a].position - site).norm();
    const double db = (atoms.atoms[b].position - site).norm();
    if (std::abs(da - db) > 1e-9)
      return da < db;
    return atoms.atoms[a].origin < atoms.atoms[b].origin;
  });
  metals.resize(static_cast<std::size_t>(count));
  return metals;
}

bool touches(const LigandGroup &g, const std::set<std::size_t> &metals) {
  return std::any_of(g.metals.begin(), g.metals.end(),
                     [&](std::size_t m) { return metals.count(m) > 0; });
}

} // namespace

Cluster carve_large(const AtomCollection &supercell, const BondGraph &graph,
                    const OriginTag &center_metal, const CarveConfig &cfg) {
  cfg.validate();
  const std::size_t center = require_tag(supercell, center_metal);
  if (!is_metal(supercell.atoms[center].element))
    throw ArgumentError(fmt::format("carve centre {} ({}) is not a metal",
                                    center_metal.str(),
                                    supercell.atoms[center].element));
  const Vec3 c = supercell.atoms[center].position;
  check_sphere_inside(supercell, c, cfg.radius);

  const auto within = [&](std::size_t i) {
    return (supercell.atoms[i].position - c).norm() <= cfg.radius;
  };
  const auto la = analyze_linkers(supercell, graph);
  ClusterBuilder builder(supercell, cfg);
  std::set<std::size_t> metals;
  for (std::size_t i = 0; i < supercell.size(); ++i)
    if (is_metal(supercell.atoms[i].element) && within(i)) {
      metals.insert(i);
      builder.add_metal(i);
    }

  for (std::size_t comp = 0; comp < la.components.size(); ++comp) {
    const auto &members = la.components[comp];
    bool any_inside = false, whole = true;
    for (auto a : members) {
      const bool in = within(a);
      any_inside = any_inside || in;
      const bool counts =
          !cfg.linker_heavy_atom_rule || supercell.atoms[a].element != "H";
      if (counts && !in)
        whole = false;
    }
    if (any_inside && whole) {
      builder.add_component(la, comp, {});
      continue;
    }
    for (auto g : la.groups_of_component[comp])
      if (touches(la.groups[g], metals))
        builder.add_capped_group(la.groups[g]);
  }
  return builder.finish();
}

Cluster carve_large(const AtomCollection &supercell,
                    const OriginTag &center_metal, const CarveConfig &cfg) {
  return carve_large(supercell, detect_bonds(supercell, cfg.bond_scale),
                     center_metal, cfg);
}

Cluster carve_small(const AtomCollection &supercell, const BondGraph &graph,
                    const Vec3 &co2_site, const CarveConfig &cfg) {
  cfg.validate();
  const auto selected = nearest_metals(supercell, co2_site, cfg.n_small_metals);
  const std::set<std::size_t> metals(selected.begin(), selected.end());
  const auto la = analyze_linkers(supercell, graph);
  ClusterBuilder builder(supercell, cfg);
  for (auto m : selected)
    builder.add_metal(m);
  for (const auto &g : la.groups)
    if (touches(g, metals))
      builder.add_capped_group(g);
  return builder.finish();
}

Cluster carve_small(const AtomCollection &supercell, const Vec3 &co2_site,
                    const CarveConfig &cfg) {
  return carve_small(supercell, detect_bonds(supercell, cfg.bond_scale),
                     co2_site, cfg);
}

Cluster carve_medium(const AtomCollection &supercell, const BondGraph &graph,
                     const Vec3 &co2_site, const CarveConfig &cfg) {
  cfg.validate();
  const auto selected =
      nearest_metals(supercell, co2_site, cfg.n_medium_metals);
  const std::set<std::size_t> metals(selected.begin(), selected.end());
  const std::set<std::size_t> central(
      selected.begin(), selected.begin() + cfg.n_small_metals);
  const double ring_radius = cfg.ring_inclusion_radius.value_or(
      (supercell.atoms[selected.back()].position - co2_site).norm());

  const auto la = analyze_linkers(supercell, graph);
  ClusterBuilder builder(supercell, cfg);
  for (auto m : selected)
    builder.add_metal(m);

  for (std::size_t comp = 0; comp < la.components.size(); ++comp) {
    std::vector<const LigandGroup *> coordinated, other;
    std::set<std::size_t> group_atoms;
    for (auto g : la.groups_of_component[comp]) {
      const auto &grp = la.groups[g];
      (touches(grp, metals) ? coordinated : other).push_back(&grp);
      group_atoms.insert(grp.atoms.begin(), grp.atoms.end());
    }
    if (coordinated.empty())
      continue;
    Vec3 centroid = Vec3::Zero();
    int n_ring = 0;
    for (auto a : la.components[comp])
      if (!group_atoms.count(a) && supercell.atoms[a].element != "H") {
        centroid += supercell.atoms[a].position;
        ++n_ring;
      }
    const bool ring_included =
        n_ring > 0 && (centroid / n_ring - co2_site).norm() <= ring_radius;
    if (ring_included) {
      builder.add_component(la, comp, other);
    } else {
      for (const auto *g : coordinated)
        builder.add_capped_group(*g);
    }
  }

  for (const auto &site : cfg.chloride_completion)
    builder.add_chloride(site, cfg.bond_scale);

  for (auto &atom : builder.cluster().atoms) {
    const bool central_metal =
        atom.roles.has(Role::Metal) &&
        std::any_of(central.begin(), central.end(), [&](std::size_t m) {
          return supercell.atoms[m].origin == atom.provenance;
        });
    if (central_metal || (atom.element == "H" && !atom.roles.has(Role::Cap)))
      atom.roles.add(Role::Mobile);
  }
  return builder.finish();
}

Cluster carve_medium(const AtomCollection &supercell, const Vec3 &co2_site,
                     const CarveConfig &cfg) {
  return carve_medium(supercell, detect_bonds(supercell, cfg.bond_scale),
                      co2_site, cfg);
}

std::set<std::size_t> select_close_atoms(const Cluster &cluster,
                                         std::size_t binding_metal,
                                         double bond_scale) {
  if (binding_metal >= cluster.size())
    throw ArgumentError(fmt::format(
        "binding metal index {} out of range for a {}-atom cluster",
        binding_metal, cluster.size()));
  std::vector<std::string> els;
  std::vector<Vec3> pos;
  for (const auto &a : cluster.atoms) {
    els.push_back(a.element);
    pos.push_back(a.position);
  }
  const auto dist = detect_bonds(els, pos, bond_scale).distances_from(binding_metal);
  std::set<std::size_t> close;
  for (std::size_t i = 0; i < cluster.size(); ++i)
    if ((dist[i] >= 0 && dist[i] <= 2) || cluster.atoms[i].roles.has(Role::CO2))
      close.insert(i);
  return close;
}

Cluster propagate_coordinates(const Cluster &relaxed_medium,
                              const Cluster &target, PropagationMode mode) {
  Cluster out = target;
  std::vector<std::string> missing;
  for (const auto &atom : relaxed_medium.atoms) {
    if (!atom.roles.has(Role::Mobile) || atom.roles.has(Role::Cap))
      continue;
    auto idx = out.find(atom.provenance);
    if (!idx) {
      missing.push_back(atom.provenance.str());
      continue;
    }
    out.atoms[*idx].position = atom.position;
  }
  if (!missing.empty() && mode == PropagationMode::Strict) {
    std::string list;
    for (const auto &m : missing)
      list += (list.empty() ? "" : ", ") + m;
    throw ArgumentError(
        fmt::format("mobile atoms without a match in the target: {}", list));
  }
  return out;
}

} // namespace mofbind::cluster
