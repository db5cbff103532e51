#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fmt/core.h>
#include <mofbind/core/elements.h>
#include <mofbind/core/data.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/qm/basis.h>
#include <numbers>
#include <numeric>

namespace mofbind::qm {

std::size_t BasisSet::function_count(const std::string &element) const {
  auto it = elements.find(element);
  if (it == elements.end())
    throw ArgumentError(fmt::format("element {} not found in basis {}",
                                    element, name));
  std::size_t n = 0;
  for (const auto &s : it->second)
    n += static_cast<std::size_t>(n_cartesian(s.l));
  return n;
}

namespace {

int angular_momentum(char letter) {
  switch (letter) {
  case 'S':
    return 0;
  case 'P':
    return 1;
  case 'D':
    return 2;
  default:
    return -1;
  }
}

double number(std::string_view token, std::size_t line_no) {
  auto v = text::to_double(token);
  if (!v)
    throw ParseError(
        fmt::format("basis line {}: bad number '{}'", line_no, token));
  return *v;
}

void finalize(ShellTemplate &shell, const std::string &element) {
  for (double a : shell.exponents)
    if (!(a > 0.0))
      throw ParseError(fmt::format(
          "non-positive exponent {} in a basis shell of {}", a, element));
  std::vector<std::size_t> order(shell.exponents.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return shell.exponents[a] > shell.exponents[b];
  });
  ShellTemplate sorted{shell.l, {}, {}};
  for (auto i : order) {
    if (!sorted.exponents.empty() && sorted.exponents.back() == shell.exponents[i])
      throw ParseError(
          fmt::format("repeated exponent {} in a shell of {}",
                      shell.exponents[i], element));
    sorted.exponents.push_back(shell.exponents[i]);
    sorted.coefficients.push_back(shell.coefficients[i]);
  }
  shell = std::move(sorted);
}

} // namespace

BasisSet load_basis(std::string_view text_in,
                    const std::set<std::string> &elements, std::string name) {
  BasisSet basis;
  basis.name = std::move(name);
  const auto lines = text::split_lines(text_in);
  std::string current;
  std::vector<ShellTemplate> shells;
  const auto flush = [&] {
    if (!current.empty() && elements.count(current))
      basis.elements[current] = std::move(shells);
    shells.clear();
    current.clear();
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty() || line.front() == '!' || line.front() == '#')
      continue;
    if (line.starts_with("****")) {
      flush();
      continue;
    }
    const auto fields = text::split_whitespace(line);
    if (current.empty()) {
      if (!find_element(fields[0]))
        throw ParseError(fmt::format("basis line {}: unknown element '{}'",
                                     i + 1, fields[0]));
      current = normalize_symbol(fields[0]);
      continue;
    }
    if (fields.size() < 2)
      throw ParseError(fmt::format("basis line {}: expected a shell header",
                                   i + 1));
    const std::string kind = text::lower(fields[0]);
    const auto count = text::to_long(fields[1]);
    if (!count || *count < 1)
      throw ParseError(
          fmt::format("basis line {}: bad primitive count", i + 1));
    const bool sp = kind == "sp" || kind == "l";
    const int l = sp ? 0 : angular_momentum(static_cast<char>(
                               std::toupper(static_cast<unsigned char>(kind[0]))));
    if (l < 0 || (kind.size() > 1 && !sp))
      throw ParseError(fmt::format(
          "basis line {}: unsupported shell type '{}' (s, p, d, sp only)",
          i + 1, fields[0]));
    ShellTemplate s{l, {}, {}}, p{1, {}, {}};
    for (long k = 0; k < *count; ++k) {
      if (++i >= lines.size())
        throw ParseError("basis text ends inside a shell");
      const auto row = text::split_whitespace(lines[i]);
      if (row.size() < (sp ? 3u : 2u))
        throw ParseError(
            fmt::format("basis line {}: too few columns", i + 1));
      const double alpha = number(row[0], i + 1);
      s.exponents.push_back(alpha);
      s.coefficients.push_back(number(row[1], i + 1));
      if (sp) {
        p.exponents.push_back(alpha);
        p.coefficients.push_back(number(row[2], i + 1));
      }
    }
    finalize(s, current);
    shells.push_back(std::move(s));
    if (sp) {
      finalize(p, current);
      shells.push_back(std::move(p));
    }
  }
  flush();

  for (const auto &el : elements)
    if (!basis.covers(el))
      throw ArgumentError(
          fmt::format("element {} not found in basis {}", el,
                      basis.name.empty() ? "text" : basis.name));
  return basis;
}

BasisSet load_named_basis(const std::string &name_or_path,
                          const std::set<std::string> &elements) {
  namespace fs = std::filesystem;
  fs::path path(name_or_path);
  if (!fs::exists(path)) {
    path = data_path("basis/" + text::lower(name_or_path) + ".gbs");
    if (!fs::exists(path))
      throw ArgumentError(fmt::format(
          "unknown basis '{}' (no file {} either)", name_or_path,
          path.string()));
  }
  return load_basis(text::read_file(path.string()), elements,
                    text::lower(path.stem().string()));
}

std::vector<std::array<int, 3>> cartesian_powers(int l) {
  std::vector<std::array<int, 3>> out;
  for (int lx = l; lx >= 0; --lx)
    for (int ly = l - lx; ly >= 0; --ly)
      out.push_back({lx, ly, l - lx - ly});
  return out;
}

namespace {

/// Normalization of the x^l component of a primitive.
double primitive_norm(double alpha, int l) {
  double dfact = 1.0; // (2l-1)!!
  for (int k = 2 * l - 1; k > 1; k -= 2)
    dfact *= k;
  return std::pow(2.0 * alpha / std::numbers::pi, 0.75) *
         std::pow(4.0 * alpha, 0.5 * l) / std::sqrt(dfact);
}

} // namespace

MolecularBasis build_basis(const Molecule &mol, const BasisSet &basis) {
  MolecularBasis out;
  out.name = basis.name;
  for (std::size_t a = 0; a < mol.size(); ++a) {
    auto it = basis.elements.find(mol.elements[a]);
    if (it == basis.elements.end())
      throw ArgumentError(fmt::format("element {} not found in basis {}",
                                      mol.elements[a], basis.name));
    for (const auto &tmpl : it->second) {
      if (tmpl.l > kMaxAngularMomentum)
        throw ArgumentError("angular momentum above d is not supported");
      Shell sh;
      sh.atom = a;
      sh.center = mol.positions[a];
      sh.l = tmpl.l;
      sh.exponents = tmpl.exponents;
      const std::size_t np = tmpl.exponents.size();
      double self = 0.0;
      for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < np; ++j) {
          const double ai = tmpl.exponents[i], aj = tmpl.exponents[j];
          self += tmpl.coefficients[i] * tmpl.coefficients[j] *
                  std::pow(2.0 * std::sqrt(ai * aj) / (ai + aj), tmpl.l + 1.5);
        }
      for (std::size_t i = 0; i < np; ++i)
        sh.coefficients.push_back(tmpl.coefficients[i] / std::sqrt(self) *
                                  primitive_norm(tmpl.exponents[i], tmpl.l));
      sh.first_function = out.n_functions;
      out.n_functions += static_cast<std::size_t>(sh.size());
      for (int k = 0; k < sh.size(); ++k)
        out.function_atom.push_back(a);
      out.shells.push_back(std::move(sh));
    }
  }
  if (out.n_functions == 0)
    throw ArgumentError("basis has no functions for this molecule");
  return out;
}

} // namespace mofbind::qm
