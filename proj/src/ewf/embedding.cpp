#include <algorithm>
#include <fmt/core.h>
#include <future>
#include <mofbind/core/error.h>
#include <mofbind/ewf/embedding.h>
#include <set>

namespace mofbind::ewf {

Embedding::Embedding(const EmbeddingSystem &system, EmbeddingOptions opts)
    : m_system(system), m_opts(std::move(opts)) {
  const std::set<std::string> elements(system.mol.elements.begin(),
                                       system.mol.elements.end());
  m_iaos = build_iaos(m_system,
                      qm::load_named_basis(m_opts.minimal_basis, elements));
  m_fragments = make_fragments(m_iaos, m_system.mol);
}

std::vector<std::size_t> Embedding::all_atoms() const {
  std::vector<std::size_t> out(m_system.mol.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = i;
  return out;
}

std::vector<FragmentSolution>
Embedding::solve(const std::vector<std::size_t> &atoms, double eta,
                 corr::Solver solver) {
  std::vector<std::size_t> sorted(atoms);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::size_t> todo;
  for (auto a : sorted) {
    if (a >= m_fragments.size())
      throw ArgumentError(fmt::format("no fragment for atom {} ({} atoms)", a,
                                      m_fragments.size()));
    if (!m_cache.count({a, eta, solver}))
      todo.push_back(a);
  }

  const auto work = [this, eta, solver](std::size_t atom) {
    const auto cluster =
        build_bath(m_system, m_fragments[atom], eta, m_opts.bath);
    return solve_fragment(m_system, cluster, solver, m_opts.ccsd);
  };
  const std::size_t jobs =
      static_cast<std::size_t>(std::max(1, m_opts.jobs));
  for (std::size_t start = 0; start < todo.size(); start += jobs) {
    const std::size_t stop = std::min(todo.size(), start + jobs);
    std::vector<std::future<FragmentSolution>> running;
    for (std::size_t k = start; k < stop; ++k)
      running.push_back(std::async(jobs > 1 ? std::launch::async
                                            : std::launch::deferred,
                                   work, todo[k]));
    for (std::size_t k = start; k < stop; ++k) {
      auto sol = running[k - start].get();
      m_history.push_back(sol);
      m_cache.emplace(Key{todo[k], eta, solver}, std::move(sol));
      ++m_misses;
    }
  }

  std::vector<FragmentSolution> out;
  for (auto a : sorted)
    out.push_back(m_cache.at({a, eta, solver}));
  return out;
}

double Embedding::correlation_energy(const std::vector<std::size_t> &atoms,
                                     double eta, corr::Solver solver) {
  double e = 0.0;
  for (const auto &sol : solve(atoms, eta, solver))
    e += sol.contribution;
  return e;
}

double Embedding::mean_field_energy(double eta) const {
  double e = m_system.ints.nuclear_repulsion;
  for (const auto &f : m_fragments)
    e += mean_field_fragment_energy(
        m_system, build_bath(m_system, f, eta, m_opts.bath));
  return e;
}

void MultiLevelSpec::validate(std::size_t n_atoms) const {
  if (!(eta_ll > 0.0) || !(eta_hl >= eta_ll))
    throw ArgumentError(fmt::format(
        "bath thresholds must satisfy eta_hl >= eta_ll > 0 (got {} and {})",
        eta_hl, eta_ll));
  if (close_atoms) {
    if (close_atoms->empty())
      throw ArgumentError("the close-fragment atom set is empty");
    for (auto a : *close_atoms)
      if (a >= n_atoms)
        throw ArgumentError(fmt::format(
            "close-fragment atom {} does not exist ({} atoms)", a, n_atoms));
  }
}

MultiLevelResult multilevel_energy(Embedding &embedding,
                                   const MultiLevelSpec &spec) {
  const auto all = embedding.all_atoms();
  spec.validate(all.size());
  const auto close = spec.close_atoms.value_or(all);

  MultiLevelResult r;
  r.hf = embedding.system().mf.energy;
  r.ll = embedding.correlation_energy(all, spec.eta_ll, spec.ll_solver);
  r.ll_at_hl = embedding.correlation_energy(spec.full_bracket ? all : close,
                                            spec.eta_hl, spec.ll_solver);
  try {
    r.hl = embedding.correlation_energy(close, spec.eta_hl, spec.hl_solver);
  } catch (const std::exception &e) {
    throw ArgumentError(fmt::format(
        "high-level solver {} failed: {}; set the high-level solver equal to "
        "the low-level one ({}) to run in LL-only mode",
        corr::to_string(spec.hl_solver), e.what(),
        corr::to_string(spec.ll_solver)));
  }
  r.energy = r.hf + r.hl + (r.ll - r.ll_at_hl);
  return r;
}

} // namespace mofbind::ewf
