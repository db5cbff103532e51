#include <cmath>
#include <fmt/core.h>
#include <fstream>
#include <mofbind/core/diis.h>
#include <mofbind/core/error.h>
#include <mofbind/core/text.h>
#include <mofbind/qm/scf.h>

namespace mofbind::qm {

std::string_view to_string(SpinMode mode) {
  return mode == SpinMode::Restricted ? "restricted" : "unrestricted";
}

SpinState SpinState::from_charge(int nuclear_charge, int net_charge,
                                 int n_unpaired) {
  SpinState s{nuclear_charge - net_charge, n_unpaired};
  if (s.electrons < 1)
    throw ArgumentError(fmt::format("system has {} electrons", s.electrons));
  if (n_unpaired < 0 || n_unpaired > s.electrons ||
      (s.electrons - n_unpaired) % 2 != 0)
    throw ArgumentError(
        fmt::format("{} unpaired electrons is inconsistent with {} electrons",
                    n_unpaired, s.electrons));
  return s;
}

Mat MeanFieldResult::density(int spin) const {
  const auto &c = coefficients[static_cast<std::size_t>(spin)];
  const auto occ = c.leftCols(n_occ[static_cast<std::size_t>(spin)]);
  return occ * occ.transpose();
}

Mat coulomb(const Tensor4 &eri, const Mat &density) {
  const Index n = density.rows();
  const Vec d = Eigen::Map<const Vec>(density.data(), n * n);
  // (pq|rs) D_rs with symmetric D: row-major (pq) x (rs) times vec(D).
  const Vec j = eri.as_matrix() * d;
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(j.data(), n, n);
}

Mat exchange(const Tensor4 &eri, const Mat &density) {
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Index n = density.rows();
  Mat k = Mat::Zero(n, n);
  const auto full = eri.as_matrix();
  // K_pq = sum_rs (pr|qs) D_rs
  for (Index p = 0; p < n; ++p)
    for (Index r = 0; r < n; ++r) {
      Eigen::Map<const RowMajor> block(full.row(p * n + r).data(), n, n);
      k.row(p).noalias() += (block * density.row(r).transpose()).transpose();
    }
  return k;
}

std::array<Mat, 2> fock_matrices(const IntegralSet &ints,
                                 const std::array<Mat, 2> &densities) {
  const Mat h = ints.core_hamiltonian();
  const Mat j = coulomb(ints.eri, densities[0] + densities[1]);
  return {h + j - exchange(ints.eri, densities[0]),
          h + j - exchange(ints.eri, densities[1])};
}

double mean_field_energy(const IntegralSet &ints,
                         const std::array<Mat, 2> &densities) {
  const auto f = fock_matrices(ints, densities);
  const Mat h = ints.core_hamiltonian();
  double e = ints.nuclear_repulsion;
  for (int s = 0; s < 2; ++s)
    e += 0.5 * densities[s].cwiseProduct(h + f[s]).sum();
  return e;
}

namespace {

struct Channel {
  Mat c;
  Vec eps;
};

Channel diagonalize(const Mat &f, const Mat &x) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(x.transpose() * f * x);
  return {x * eig.eigenvectors(), eig.eigenvalues()};
}

Mat occupied_density(const Mat &c, int n_occ) {
  const auto occ = c.leftCols(n_occ);
  return occ * occ.transpose();
}

} // namespace

MeanFieldResult run_scf(const IntegralSet &ints, const SpinState &spin,
                        const ScfOptions &opts) {
  const Index n = ints.size();
  const std::array<int, 2> nocc{spin.n_alpha(), spin.n_beta()};
  const bool restricted = opts.mode == SpinMode::Restricted;
  if (restricted && nocc[0] != nocc[1])
    throw ArgumentError(
        "restricted SCF needs a closed-shell system (n_unpaired = 0); use "
        "unrestricted mode");
  if (nocc[0] > n)
    throw ArgumentError(fmt::format(
        "{} alpha electrons do not fit into {} basis functions", nocc[0], n));

  Eigen::SelfAdjointEigenSolver<Mat> s_eig(ints.S);
  if (s_eig.eigenvalues().minCoeff() < opts.linear_dependence_threshold)
    throw NumericalError(fmt::format(
        "overlap matrix is singular (smallest eigenvalue {:.3e})",
        s_eig.eigenvalues().minCoeff()));
  const Mat x = s_eig.eigenvectors() *
                s_eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                s_eig.eigenvectors().transpose();

  const Mat h = ints.core_hamiltonian();
  std::array<Channel, 2> ch{diagonalize(h, x), diagonalize(h, x)};
  std::array<Mat, 2> d{occupied_density(ch[0].c, nocc[0]),
                       occupied_density(ch[1].c, nocc[1])};

  MeanFieldResult out;
  out.mode = opts.mode;
  out.n_occ = nocc;
  out.nuclear_repulsion = ints.nuclear_repulsion;

  Diis<double> diis(opts.diis_size);
  double e_prev = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    auto f = fock_matrices(ints, d);
    if (restricted)
      f[1] = f[0];
    double e = ints.nuclear_repulsion;
    for (int s = 0; s < 2; ++s)
      e += 0.5 * d[s].cwiseProduct(h + f[s]).sum();
    out.energy_history.push_back(e);

    std::array<Mat, 2> err;
    double residual = 0.0;
    for (int s = 0; s < 2; ++s) {
      const Mat fds = f[s] * d[s] * ints.S;
      err[s] = x.transpose() * (fds - fds.transpose()) * x;
      residual = std::max(residual, err[s].cwiseAbs().maxCoeff());
    }
    out.iterations = it;
    if (it > 1 && std::abs(e - e_prev) < opts.energy_tolerance &&
        residual < opts.residual_tolerance) {
      out.converged = true;
      break;
    }
    e_prev = e;

    if (opts.diis) {
      Vec fv(2 * n * n), ev(2 * n * n);
      fv << Eigen::Map<const Vec>(f[0].data(), n * n),
          Eigen::Map<const Vec>(f[1].data(), n * n);
      ev << Eigen::Map<const Vec>(err[0].data(), n * n),
          Eigen::Map<const Vec>(err[1].data(), n * n);
      diis.push(fv, ev);
      if (it >= opts.diis_start) {
        const Vec ext = diis.extrapolate();
        f[0] = Eigen::Map<const Mat>(ext.data(), n, n);
        f[1] = Eigen::Map<const Mat>(ext.data() + n * n, n, n);
      }
    }
    for (int s = 0; s < 2; ++s) {
      Mat fs = f[s];
      if (opts.level_shift != 0.0)
        fs += opts.level_shift * (ints.S - ints.S * d[s] * ints.S);
      ch[s] = diagonalize(fs, x);
      d[s] = occupied_density(ch[s].c, nocc[s]);
    }
  }

  // Canonical orbitals of the final density.
  const auto f = fock_matrices(ints, d);
  double gnorm2 = 0.0;
  for (int s = 0; s < 2; ++s) {
    ch[s] = diagonalize(restricted ? f[0] : f[s], x);
    const Mat g = ch[s].c.leftCols(nocc[s]).transpose() * f[s] *
                  ch[s].c.rightCols(n - nocc[s]);
    gnorm2 += g.squaredNorm();
    d[s] = occupied_density(ch[s].c, nocc[s]);
    out.coefficients[s] = ch[s].c;
    out.orbital_energies[s] = ch[s].eps;
    out.occupations[s] = Vec::Zero(n);
    out.occupations[s].head(nocc[s]).setOnes();
  }
  out.gradient_norm = std::sqrt(gnorm2);
  out.energy = mean_field_energy(ints, d);
  return out;
}

namespace {

void write_block(std::ofstream &out, const Mat &m) {
  out.write(reinterpret_cast<const char *>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

void read_block(std::ifstream &in, Mat &m) {
  in.read(reinterpret_cast<char *>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
}

} // namespace

void write_mean_field(const std::string &prefix, const MeanFieldResult &mf) {
  const Index n = mf.n_basis();
  std::string header = "# mofbind mean-field dump v1\n";
  header += "# binary: float64 little-endian, column-major; per channel "
            "(alpha, beta): coefficients n x n, orbital energies n, "
            "occupations n\n";
  header += fmt::format("mode {}\nn_basis {}\nn_alpha {}\nn_beta {}\n",
                        to_string(mf.mode), n, mf.n_occ[0], mf.n_occ[1]);
  header += fmt::format("energy {:.15e}\nnuclear_repulsion {:.15e}\n",
                        mf.energy, mf.nuclear_repulsion);
  header += fmt::format("converged {}\ngradient_norm {:.6e}\niterations {}\n",
                        mf.converged ? 1 : 0, mf.gradient_norm, mf.iterations);
  text::write_file(prefix + ".txt", header);

  std::ofstream out(prefix + ".bin", std::ios::binary);
  if (!out)
    throw std::runtime_error(fmt::format("cannot write {}.bin", prefix));
  for (int s = 0; s < 2; ++s) {
    write_block(out, mf.coefficients[s]);
    write_block(out, mf.orbital_energies[s]);
    write_block(out, mf.occupations[s]);
  }
}

MeanFieldResult read_mean_field(const std::string &prefix) {
  MeanFieldResult mf;
  Index n = 0;
  const std::string header = text::read_file(prefix + ".txt");
  for (auto line : text::split_lines(header)) {
    line = text::trim(line);
    if (line.empty() || line.front() == '#')
      continue;
    const auto f = text::split_whitespace(line);
    if (f.size() != 2)
      throw ParseError(fmt::format("{}.txt: bad line '{}'", prefix, line));
    const double v = text::to_double(f[1]).value_or(0.0);
    if (f[0] == "mode")
      mf.mode = f[1] == "restricted" ? SpinMode::Restricted
                                     : SpinMode::Unrestricted;
    else if (f[0] == "n_basis")
      n = static_cast<Index>(v);
    else if (f[0] == "n_alpha")
      mf.n_occ[0] = static_cast<int>(v);
    else if (f[0] == "n_beta")
      mf.n_occ[1] = static_cast<int>(v);
    else if (f[0] == "energy")
      mf.energy = v;
    else if (f[0] == "nuclear_repulsion")
      mf.nuclear_repulsion = v;
    else if (f[0] == "converged")
      mf.converged = v != 0.0;
    else if (f[0] == "gradient_norm")
      mf.gradient_norm = v;
    else if (f[0] == "iterations")
      mf.iterations = static_cast<int>(v);
  }
  if (n <= 0)
    throw ParseError(fmt::format("{}.txt: missing n_basis", prefix));
  std::ifstream in(prefix + ".bin", std::ios::binary);
  if (!in)
    throw std::runtime_error(fmt::format("cannot read {}.bin", prefix));
  for (int s = 0; s < 2; ++s) {
    mf.coefficients[s].resize(n, n);
    mf.orbital_energies[s].resize(n);
    mf.occupations[s].resize(n);
    read_block(in, mf.coefficients[s]);
    Mat eps(n, 1), occ(n, 1);
    read_block(in, eps);
    read_block(in, occ);
    mf.orbital_energies[s] = eps;
    mf.occupations[s] = occ;
  }
  if (!in)
    throw ParseError(fmt::format("{}.bin: truncated", prefix));
  return mf;
}

} // namespace mofbind::qm
