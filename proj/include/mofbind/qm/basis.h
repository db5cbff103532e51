#pragma once
#include <array>
#include <map>
#include <mofbind/qm/molecule.h>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mofbind::qm {

inline constexpr int kMaxAngularMomentum = 2;

/// Cartesian components of a shell: (l+1)(l+2)/2.
constexpr int n_cartesian(int l) { return (l + 1) * (l + 2) / 2; }

/// Contracted shell template of an element. Coefficients multiply
/// unit-norm primitives; the contraction itself is normalized too.
struct ShellTemplate {
  int l{0};
  std::vector<double> exponents; // bohr^-2, strictly decreasing
  std::vector<double> coefficients;
};

struct BasisSet {
  std::string name;
  std::map<std::string, std::vector<ShellTemplate>> elements;

  bool covers(const std::string &element) const {
    return elements.count(element) > 0;
  }
  std::size_t function_count(const std::string &element) const;
};

/// Parse the Gaussian94 text layout ("H 0", "S 3 1.00", exponent /
/// coefficient rows, "****" separators; SP shells and Fortran D exponents
/// accepted). Only the requested elements are kept.
BasisSet load_basis(std::string_view text,
                    const std::set<std::string> &elements,
                    std::string name = {});

/// Load a shipped basis ("sto-3g", "6-31g") or a .gbs path.
BasisSet load_named_basis(const std::string &name_or_path,
                          const std::set<std::string> &elements);

/// Shell placed on an atom.
struct Shell {
  std::size_t atom{0};
  Vec3 center{Vec3::Zero()}; // bohr
  int l{0};
  std::vector<double> exponents;
  std::vector<double> coefficients; // include primitive normalization
  std::size_t first_function{0};

  int size() const { return n_cartesian(l); }
};

/// Basis functions of a molecule in shell order; components within a
/// shell follow x, y, z and xx, xy, xz, yy, yz, zz.
struct MolecularBasis {
  std::string name;
  std::vector<Shell> shells;
  std::vector<std::size_t> function_atom;
  std::size_t n_functions{0};

  std::size_t size() const { return n_functions; }
};

MolecularBasis build_basis(const Molecule &mol, const BasisSet &basis);

/// Cartesian exponent triples of a shell in component order.
std::vector<std::array<int, 3>> cartesian_powers(int l);

} // namespace mofbind::qm
