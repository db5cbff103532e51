#include <algorithm>
#include <catch_amalgamated.hpp>
#include <fixtures/toy_framework.h>
#include <mofbind/cluster/carve.h>
#include <mofbind/core/error.h>
#include <mofbind/crystal/xyz.h>
#include <random>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using mofbind::ArgumentError;
using mofbind::IVec3;
using mofbind::Vec3;
using namespace mofbind::cluster;
using mofbind::crystal::AtomCollection;
using mofbind::crystal::OriginTag;
using mofbind::testing::toy_framework;
using mofbind::testing::toy_metal;

namespace {

const AtomCollection &toy_supercell() {
  static const AtomCollection cell = mofbind::crystal::build_supercell(
      toy_framework(), IVec3(5, 4, 3));
  return cell;
}

Vec3 position_of(const AtomCollection &atoms, const OriginTag &tag) {
  return atoms.atoms.at(*atoms.find(tag)).position;
}

// CO2 site 2.3 A above the metal of cell (2, 2, 1).
Vec3 toy_site() {
  return position_of(toy_supercell(), toy_metal(2, 2, 1)) + Vec3(0, 0, 2.3);
}

std::size_t count_role(const Cluster &c, Role r) {
  return c.indices_with(r).size();
}

int group_charge_sum(const Cluster &c) {
  int sum = 0;
  for (const auto &g : c.groups)
    sum += g.charge;
  return sum;
}

std::size_t count_kind(const Cluster &c, GroupKind kind) {
  return static_cast<std::size_t>(
      std::count_if(c.groups.begin(), c.groups.end(),
                    [&](const ChargeGroup &g) { return g.kind == kind; }));
}

void check_caps(const Cluster &c, const AtomCollection &supercell) {
  for (const auto &cap : c.atoms) {
    if (!cap.roles.has(Role::Cap) || cap.element != "H")
      continue;
    REQUIRE(cap.cap_anchor);
    const auto anchor_idx = c.find(*cap.cap_anchor);
    REQUIRE(anchor_idx);
    const auto &anchor = c.atoms[*anchor_idx];
    const double expected = anchor.element == "O" ? 0.96 : 1.09;
    CHECK_THAT((cap.position - anchor.position).norm(),
               WithinAbs(expected, 1e-6));
    const Vec3 replaced = position_of(supercell, cap.provenance);
    const Vec3 want = (replaced - anchor.position).normalized();
    const Vec3 got = (cap.position - anchor.position).normalized();
    CHECK((want - got).norm() < 1e-6);
  }
}

} // namespace

TEST_CASE("bond detection uses scaled covalent radii", "[bonds]") {
  const std::vector<std::string> els{"H", "H", "C", "C", "C", "O"};
  const std::vector<Vec3> pos{Vec3(0, 0, 0),   Vec3(0.74, 0, 0),
                              Vec3(10, 0, 0),  Vec3(15, 0, 0),
                              Vec3(30, 0, 0),  Vec3(31.43, 0, 0)};
  const auto g = detect_bonds(els, pos);
  CHECK(g.bonded(0, 1));
  CHECK_FALSE(g.bonded(2, 3));
  CHECK(g.bonded(4, 5));
  CHECK(g.edges.size() == 2);
  CHECK(g.distances_from(0) == std::vector<int>{0, 1, -1, -1, -1, -1});
}

TEST_CASE("linker analysis finds carboxylates and phenoxides", "[carve]") {
  const auto &cell = toy_supercell();
  const auto la = analyze_linkers(cell, detect_bonds(cell));
  const std::size_t n_cells = 5 * 4 * 3;
  CHECK(la.components.size() == n_cells);
  // Phenoxides in the top row of cells have no metal to bind.
  CHECK(la.groups.size() == 2 * n_cells - 5 * 3);
  for (const auto &g : la.groups) {
    CHECK(g.severed.has_value());
    CHECK(g.metals.size() <= 1);
    const auto &anchor = cell.atoms[g.anchor];
    CHECK(anchor.element ==
          (g.kind == LigandGroup::Kind::Carboxylate ? "C" : "O"));
  }
}

TEST_CASE("small cluster holds three metals with formates and hydroxylates",
          "[carve]") {
  CarveConfig cfg;
  const auto &cell = toy_supercell();
  const auto c = carve_small(cell, toy_site(), cfg);
  CHECK(c.size() == 21);
  CHECK(count_role(c, Role::Metal) == 3);
  CHECK(count_role(c, Role::Cap) == 6);
  CHECK(count_kind(c, GroupKind::Formate) == 3);
  CHECK(count_kind(c, GroupKind::Hydroxylate) == 3);
  CHECK(c.net_charge == 0);
  CHECK(c.net_charge == group_charge_sum(c));
  CHECK(c.find(toy_metal(1, 2, 1)));
  CHECK(c.find(toy_metal(2, 2, 1)));
  CHECK(c.find(toy_metal(3, 2, 1)));
  check_caps(c, cell);
}

TEST_CASE("carving is deterministic and independent of atom order",
          "[carve]") {
  CarveConfig cfg;
  const auto &cell = toy_supercell();
  const auto a = carve_medium(cell, toy_site(), cfg);
  const auto b = carve_medium(cell, toy_site(), cfg);
  CHECK(a == b);

  AtomCollection shuffled = cell;
  std::mt19937 rng(7);
  std::shuffle(shuffled.atoms.begin(), shuffled.atoms.end(), rng);
  CHECK(carve_medium(shuffled, toy_site(), cfg) == a);
  CHECK(carve_small(shuffled, toy_site(), cfg) ==
        carve_small(cell, toy_site(), cfg));
}

TEST_CASE("medium cluster keeps nearby rings and caps removed groups",
          "[carve]") {
  CarveConfig cfg;
  const auto &cell = toy_supercell();
  const auto c = carve_medium(cell, toy_site(), cfg);
  CHECK(count_role(c, Role::Metal) == 5);
  CHECK(count_kind(c, GroupKind::Linker) == 6);
  CHECK(count_kind(c, GroupKind::Formate) == 1);
  CHECK(count_kind(c, GroupKind::Hydroxylate) == 1);
  CHECK(c.size() == 91);
  CHECK(c.net_charge == 0);
  check_caps(c, cell);

  // Ring caps sit on ring carbons.
  int ring_caps = 0;
  for (const auto &a : c.atoms)
    if (a.roles.has(Role::Cap) && a.cap_anchor &&
        a.cap_anchor->site.starts_with("C") && a.cap_anchor->site != "C1")
      ++ring_caps;
  CHECK(ring_caps == 4);

  // Mobile: the three central metals and every non-cap hydrogen.
  const auto mobile = c.indices_with(Role::Mobile);
  std::size_t mobile_metals = 0;
  for (auto i : mobile) {
    CHECK_FALSE(c.atoms[i].roles.has(Role::Cap));
    if (c.atoms[i].roles.has(Role::Metal))
      ++mobile_metals;
    else
      CHECK(c.atoms[i].element == "H");
  }
  CHECK(mobile_metals == 3);
  CHECK(mobile.size() == 3 + 4 * 6);
}

TEST_CASE("ring inclusion radius controls linker retention", "[carve]") {
  CarveConfig cfg;
  cfg.ring_inclusion_radius = 1.0;
  const auto c = carve_medium(toy_supercell(), toy_site(), cfg);
  CHECK(count_kind(c, GroupKind::Linker) == 0);
  CHECK(count_kind(c, GroupKind::Formate) == 5);
  CHECK(count_kind(c, GroupKind::Hydroxylate) == 5);
  CHECK(c.net_charge == 0);
}

TEST_CASE("chloride completion", "[carve]") {
  CarveConfig cfg;
  cfg.chloride_completion = {{toy_metal(1, 2, 1), std::nullopt},
                             {toy_metal(3, 2, 1), Vec3(20, 20, 20)}};
  const auto &cell = toy_supercell();
  const auto c = carve_medium(cell, toy_site(), cfg);
  CHECK(count_kind(c, GroupKind::Chloride) == 2);
  CHECK(c.net_charge == -2);
  const auto cl = c.find({"Cl(M1)", {1, 2, 1}}, true);
  REQUIRE(cl);
  CHECK_THAT((c.atoms[*cl].position - position_of(cell, toy_metal(1, 2, 1)))
                 .norm(),
             WithinAbs(2.25, 1e-9));
  const auto explicit_cl = c.find({"Cl(M1)", {3, 2, 1}}, true);
  REQUIRE(explicit_cl);
  CHECK((c.atoms[*explicit_cl].position - Vec3(20, 20, 20)).norm() < 1e-12);

  cfg.chloride_completion = {{toy_metal(0, 0, 0), std::nullopt}};
  CHECK_THROWS_WITH(carve_medium(cell, toy_site(), cfg),
                    ContainsSubstring("not in the cluster"));
}

TEST_CASE("large cluster grows monotonically with radius", "[carve]") {
  const auto &cell = toy_supercell();
  const auto graph = detect_bonds(cell);
  CarveConfig cfg;
  cfg.radius = 3.0;
  const auto smallest = carve_large(cell, graph, toy_metal(2, 2, 1), cfg);
  CHECK(smallest.size() == 7);
  CHECK(count_role(smallest, Role::Cap) == 2);

  std::size_t prev_atoms = 0, prev_metals = 0;
  for (double r : {3.0, 5.0, 7.0, 9.0, 11.0}) {
    cfg.radius = r;
    const auto c = carve_large(cell, graph, toy_metal(2, 2, 1), cfg);
    std::size_t non_caps = c.size() - count_role(c, Role::Cap);
    CHECK(c.size() >= prev_atoms);
    CHECK(count_role(c, Role::Metal) >= prev_metals);
    CHECK(non_caps > 0);
    CHECK(c.net_charge == group_charge_sum(c));
    CHECK(c.electron_count() % 2 == 0);
    check_caps(c, cell);
    for (const auto &a : c.atoms)
      if (a.roles.has(Role::Metal))
        CHECK((a.position - position_of(cell, toy_metal(2, 2, 1))).norm() <=
              r);
    prev_atoms = c.size();
    prev_metals = count_role(c, Role::Metal);
  }
}

TEST_CASE("large carve rejects bad centres and boundary crossings",
          "[carve]") {
  CarveConfig cfg;
  cfg.radius = 16.0;
  const auto &cell = toy_supercell();
  CHECK_THROWS_WITH(carve_large(cell, toy_metal(2, 2, 1), cfg),
                    ContainsSubstring("supercell repetitions"));
  cfg.radius = 4.0;
  CHECK_THROWS_WITH(carve_large(cell, OriginTag{"C3", {2, 2, 1}}, cfg),
                    ContainsSubstring("not a metal"));
  CHECK_THROWS_AS(carve_large(cell, OriginTag{"X9", {0, 0, 0}}, cfg),
                  ArgumentError);
  cfg.radius = -1.0;
  CHECK_THROWS_AS(carve_large(cell, toy_metal(2, 2, 1), cfg), ArgumentError);
}

TEST_CASE("small carve needs enough metals", "[carve]") {
  const auto one = mofbind::crystal::build_supercell(toy_framework(),
                                                     IVec3(1, 1, 1));
  CarveConfig cfg;
  CHECK_THROWS_WITH(carve_small(one, Vec3::Zero(), cfg),
                    ContainsSubstring("requested 3 metal"));
}

TEST_CASE("unpaired electrons and parity", "[carve]") {
  const auto co = mofbind::crystal::build_supercell(toy_framework("Co"),
                                                    IVec3(5, 4, 3));
  CarveConfig cfg;
  cfg.unpaired_per_metal = {{"Co", 3}};
  const auto c = carve_small(co, toy_site(), cfg);
  CHECK(c.n_unpaired == 9);
  CHECK(c.electron_count() == 177);

  cfg.unpaired_per_metal = {{"Co", 2}};
  CHECK_THROWS_AS(carve_small(co, toy_site(), cfg), ArgumentError);
}

TEST_CASE("close-atom selection", "[carve]") {
  CarveConfig cfg;
  auto c = carve_small(toy_supercell(), toy_site(), cfg);
  const auto metal = *c.find(toy_metal(2, 2, 1));
  const auto close = select_close_atoms(c, metal);
  // Metal, carboxylate O2 + C, phenoxide O + its cap.
  CHECK(close.size() == 6);
  CHECK(close.count(metal));
  for (auto i : close)
    CHECK((i == metal || !c.atoms[i].roles.has(Role::Metal)));

  AtomCollection co2;
  const Vec3 s = toy_site();
  co2.atoms = {{"C", s + Vec3(0, 0, 0.2), {"co2_C", {0, 0, 0}}},
               {"O", s + Vec3(1.16, 0, 0.2), {"co2_O1", {0, 0, 0}}},
               {"O", s + Vec3(-1.16, 0, 0.2), {"co2_O2", {0, 0, 0}}}};
  c.add_molecule(co2, RoleSet{Role::CO2});
  CHECK(select_close_atoms(c, metal).size() == 9);
  CHECK_THROWS_AS(select_close_atoms(c, c.size()), ArgumentError);
}

TEST_CASE("coordinate propagation from the medium cluster", "[carve]") {
  CarveConfig cfg;
  const auto &cell = toy_supercell();
  auto medium = carve_medium(cell, toy_site(), cfg);
  const auto small = carve_small(cell, toy_site(), cfg);
  for (auto &a : medium.atoms)
    if (a.roles.has(Role::Mobile))
      a.position += Vec3(0, 0, 0.1);

  CHECK_THROWS_WITH(propagate_coordinates(medium, small),
                    ContainsSubstring("without a match"));
  const auto moved =
      propagate_coordinates(medium, small, PropagationMode::SkipUnmatched);
  REQUIRE(moved.size() == small.size());
  for (std::size_t i = 0; i < small.size(); ++i) {
    const double shift =
        (moved.atoms[i].position - small.atoms[i].position).norm();
    if (small.atoms[i].roles.has(Role::Metal))
      CHECK_THAT(shift, WithinAbs(0.1, 1e-12));
    else
      CHECK(shift == 0.0);
  }
  const auto self = propagate_coordinates(medium, medium);
  CHECK(self == medium);
}

TEST_CASE("cluster files round-trip", "[cluster]") {
  CarveConfig cfg;
  cfg.chloride_completion = {{toy_metal(1, 2, 1), std::nullopt}};
  const auto c = carve_medium(toy_supercell(), toy_site(), cfg);
  const auto back =
      read_cluster(mofbind::crystal::write_xyz(c.to_atom_collection()),
                   write_sidecar(c));
  REQUIRE(back.size() == c.size());
  CHECK(back.groups == c.groups);
  CHECK(back.net_charge == c.net_charge);
  CHECK(back.n_unpaired == c.n_unpaired);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(back.atoms[i].element == c.atoms[i].element);
    CHECK(back.atoms[i].provenance == c.atoms[i].provenance);
    CHECK(back.atoms[i].roles == c.atoms[i].roles);
    CHECK(back.atoms[i].group == c.atoms[i].group);
    CHECK(back.atoms[i].cap_anchor == c.atoms[i].cap_anchor);
    CHECK((back.atoms[i].position - c.atoms[i].position).norm() < 1e-9);
  }
  CHECK(RoleSet::parse(RoleSet{Role::Metal, Role::Mobile}.str()) ==
        RoleSet{Role::Metal, Role::Mobile});
  CHECK(RoleSet{}.str() == "-");
}
