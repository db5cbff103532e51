#include <cmath>
#include <fmt/core.h>
#include <mofbind/core/elements.h>
#include <mofbind/core/error.h>
#include <mofbind/core/units.h>
#include <mofbind/workflow/composition.h>

namespace mofbind::workflow {

double oniom_compose(double e_hl_small, double e_ll_large, double e_ll_small) {
  return e_hl_small + (e_ll_large - e_ll_small);
}

double binding_energy(double e_complex, double e_mof, double e_co2) {
  return (e_complex - e_mof - e_co2) * units::HARTREE_TO_KCALMOL;
}

double binding_energy(const ComposedEnergy &complex, const ComposedEnergy &mof,
                      const ComposedEnergy &co2) {
  if (complex.method != mof.method || complex.method != co2.method)
    throw ArgumentError(fmt::format(
        "binding energy terms use different methods: complex '{}', MOF '{}', "
        "CO2 '{}'",
        complex.method, mof.method, co2.method));
  return binding_energy(complex.hartree, mof.hartree, co2.hartree);
}

SpinTable default_spin_table() {
  return {{"Co", 3}, {"Fe", 4}, {"Ni", 2}, {"Cu", 1}, {"Zn", 0}, {"Mg", 0}};
}

int spin_assignment(std::string_view element, int n_metals,
                    const SpinTable &table) {
  if (n_metals < 0)
    throw ArgumentError(fmt::format("negative metal count {}", n_metals));
  const auto it = table.find(normalize_symbol(element));
  if (it == table.end())
    throw ArgumentError(fmt::format(
        "no spin entry for {}; add it to the [spins] section", element));
  return it->second * n_metals;
}

double error_metrics(const std::vector<std::pair<double, double>> &rows) {
  if (rows.empty())
    throw ArgumentError("error metrics need at least one row");
  double sum = 0.0;
  for (auto [de, qs] : rows)
    sum += std::abs(std::abs(de) - qs);
  return sum / static_cast<double>(rows.size());
}

} // namespace mofbind::workflow
