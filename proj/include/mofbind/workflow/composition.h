#pragma once
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mofbind::workflow {

/// E^HL_large ~ E^HL_small + E^LL_large - E^LL_small (hartree).
double oniom_compose(double e_hl_small, double e_ll_large, double e_ll_small);

/// An energy together with the description of how it was obtained.
struct ComposedEnergy {
  double hartree{0.0};
  std::string method;
};

/// (E_complex - E_mof - E_co2) in kcal/mol; negative means bound.
double binding_energy(double e_complex, double e_mof, double e_co2);
/// As above; throws unless all three share the same method description.
double binding_energy(const ComposedEnergy &complex, const ComposedEnergy &mof,
                      const ComposedEnergy &co2);

/// Unpaired electrons per metal atom (ferromagnetic coupling).
using SpinTable = std::map<std::string, int, std::less<>>;
SpinTable default_spin_table();

/// Per-metal unpaired electrons times the number of metals.
int spin_assignment(std::string_view element, int n_metals,
                    const SpinTable &table = default_spin_table());

/// Mean over rows of ||dE| - Qs| (kcal/mol); rows are (dE, Qs).
double error_metrics(const std::vector<std::pair<double, double>> &rows);

} // namespace mofbind::workflow
