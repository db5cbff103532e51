#include <algorithm>
#include <fmt/core.h>
#include <mofbind/core/error.h>
#include <mofbind/ewf/embedding.h>
#include <mofbind/qm/integrals.h>

namespace mofbind::ewf {

EmbeddingSystem::EmbeddingSystem(const qm::Molecule &mol,
                                 const qm::MolecularBasis &basis,
                                 const qm::IntegralSet &ints,
                                 const qm::MeanFieldResult &mf)
    : mol(mol), basis(basis), ints(ints), mf(mf) {
  if (!mf.converged)
    throw ArgumentError("embedding requires a converged mean field");
  if (mf.n_basis() != ints.size())
    throw ArgumentError("mean field and integrals use different bases");
  fock = qm::fock_matrices(ints, {mf.density(0), mf.density(1)});
}

Mat EmbeddingSystem::occupied(int spin) const {
  return mf.coefficients[spin].leftCols(mf.n_occ[spin]);
}

Mat EmbeddingSystem::virtuals(int spin) const {
  const auto &c = mf.coefficients[spin];
  return c.rightCols(c.cols() - mf.n_occ[spin]);
}

IaoSet build_iaos(const EmbeddingSystem &system,
                  const qm::BasisSet &minimal_reference) {
  for (const auto &el : system.mol.elements)
    if (!minimal_reference.covers(el))
      throw ArgumentError(fmt::format(
          "minimal reference basis {} has no entry for {}",
          minimal_reference.name, el));
  const auto minimal = qm::build_basis(system.mol, minimal_reference);
  const Mat &s1 = system.ints.S;
  const Mat s2 = qm::overlap_matrix(minimal);
  const Mat s12 = qm::overlap_matrix(system.basis, minimal);
  const auto s1_ldlt = s1.ldlt();
  const Mat p12 = s1_ldlt.solve(s12);
  const Mat s2_inv_s21 = s2.ldlt().solve(s12.transpose());
  const Index n = s1.rows();
  const Mat id = Mat::Identity(n, n);

  IaoSet out;
  out.atom = minimal.function_atom;
  for (int s = 0; s < 2; ++s) {
    if (s == 1 && system.mf.mode == qm::SpinMode::Restricted) {
      out.coefficients[1] = out.coefficients[0];
      break;
    }
    const Mat c = system.occupied(s);
    Mat a = p12;
    if (c.cols() > 0) {
      const Mat ct = symmetric_orthonormalize(p12 * (s2_inv_s21 * c), s1);
      const Mat o = c * c.transpose() * s1;
      const Mat ot = ct * ct.transpose() * s1;
      a = o * ot * p12 + (id - o) * (id - ot) * p12;
    }
    const Mat m = a.transpose() * s1 * a;
    Eigen::SelfAdjointEigenSolver<Mat> eig(m);
    if (eig.eigenvalues()(0) < 1e-10 * std::max(1.0, eig.eigenvalues().maxCoeff()))
      throw NumericalError(fmt::format(
          "IAO projection is rank deficient (smallest eigenvalue {:.3e}); "
          "the minimal reference basis does not span the occupied space",
          eig.eigenvalues()(0)));
    out.coefficients[s] = a * inverse_sqrt(m);

    const Mat proj = out.coefficients[s].transpose() * s1 * c;
    for (Index i = 0; i < c.cols(); ++i)
      out.occupied_span_deviation = std::max(
          out.occupied_span_deviation, 1.0 - proj.col(i).squaredNorm());
  }
  if (out.occupied_span_deviation > 1e-8)
    throw NumericalError(fmt::format(
        "occupied orbitals leave the IAO span (deviation {:.3e})",
        out.occupied_span_deviation));
  return out;
}

Mat FragmentSpace::ao_projector(int spin, const Mat &overlap) const {
  return orbitals[spin] * orbitals[spin].transpose() * overlap;
}

std::vector<FragmentSpace> make_fragments(const IaoSet &iaos,
                                          const qm::Molecule &mol) {
  if (iaos.atom.size() != static_cast<std::size_t>(iaos.size()))
    throw ArgumentError(fmt::format("{} IAOs but {} atom assignments",
                                    iaos.size(), iaos.atom.size()));
  std::vector<std::vector<Index>> members(mol.size());
  for (std::size_t k = 0; k < iaos.atom.size(); ++k) {
    if (iaos.atom[k] >= mol.size())
      throw ArgumentError(fmt::format(
          "IAO {} is not assigned to an atom of the molecule", k));
    members[iaos.atom[k]].push_back(static_cast<Index>(k));
  }
  std::vector<FragmentSpace> out;
  for (std::size_t atom = 0; atom < mol.size(); ++atom) {
    if (members[atom].empty())
      throw ArgumentError(
          fmt::format("atom {} ({}) has no IAOs", atom, mol.elements[atom]));
    FragmentSpace f;
    f.atoms = {atom};
    f.label = fmt::format("{}{}", mol.elements[atom], atom);
    for (int s = 0; s < 2; ++s)
      f.orbitals[s] = iaos.coefficients[s](Eigen::all, members[atom]);
    out.push_back(std::move(f));
  }
  return out;
}

FragmentSpace merge_fragments(const std::vector<FragmentSpace> &parts) {
  if (parts.empty())
    throw ArgumentError("cannot merge an empty fragment list");
  FragmentSpace out;
  Index cols = 0;
  for (const auto &p : parts)
    cols += p.size();
  for (int s = 0; s < 2; ++s) {
    out.orbitals[s].resize(parts.front().orbitals[s].rows(), cols);
    Index k = 0;
    for (const auto &p : parts) {
      out.orbitals[s].middleCols(k, p.size()) = p.orbitals[s];
      k += p.size();
    }
  }
  for (const auto &p : parts) {
    out.atoms.insert(out.atoms.end(), p.atoms.begin(), p.atoms.end());
    out.label += (out.label.empty() ? "" : "+") + p.label;
  }
  std::sort(out.atoms.begin(), out.atoms.end());
  if (std::adjacent_find(out.atoms.begin(), out.atoms.end()) != out.atoms.end())
    throw ArgumentError("merged fragments overlap");
  return out;
}

} // namespace mofbind::ewf
