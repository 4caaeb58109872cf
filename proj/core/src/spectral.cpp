#include "nhchain/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace nhchain {

namespace detail {

std::complex<double> log1p_exp(std::complex<double> z) {
  if (z.real() > 0.0) return z + std::log(1.0 + std::exp(-z));
  return std::log(1.0 + std::exp(z));
}

std::complex<double> fermi(std::complex<double> z) {
  if (z.real() > 0.0) {
    const std::complex<double> e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

std::complex<double> fermi_band(std::complex<double> z) {
  const std::complex<double> e = std::exp(z.real() > 0.0 ? -z : z);
  const std::complex<double> d = 1.0 + e;
  return e / (d * d);
}

}  // namespace detail

namespace {

double spectral_scale(const std::vector<std::complex<double>>& eigs) {
  double s = 0.0;
  for (const auto& e : eigs) s = std::max(s, std::abs(e));
  return s > 0.0 ? s : 1.0;
}

void pair_conjugates(SpectralData& spec, bool strict) {
  const int n = spec.size();
  const double tol = 1e-8 * spectral_scale(spec.eigs);
  spec.tol_used = tol;
  spec.pair_of.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (spec.pair_of[i] != -1) continue;
    if (std::abs(spec.eigs[i].imag()) <= tol) {
      spec.pair_of[i] = i;
      continue;
    }
    int best = -1;
    double best_d = tol;
    for (int j = i + 1; j < n; ++j) {
      if (spec.pair_of[j] != -1) continue;
      const double d = std::abs(spec.eigs[j] - std::conj(spec.eigs[i]));
      if (d <= best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best < 0) {
      if (strict)
        throw std::runtime_error("conjugate pairing failed for real matrix spectrum");
      continue;  // leave unpaired; sums fall back to a residue-checked total
    }
    spec.pair_of[i] = best;
    spec.pair_of[best] = i;
  }
}

// Sum of g(eps_n) over the spectrum. When every eigenvalue is paired,
// conjugate partners are combined as 2 Re g(eps) evaluated at the
// symmetrized member, so the total is exactly real even when g has a
// branch cut (Im g jumps by 2 pi between a near-imaginary eigenvalue and
// its partner at large beta). Otherwise falls back to a direct sum with
// a relative imaginary-residue check.
template <typename G>
double real_spectral_sum(const SpectralData& spec, G&& g, const char* what) {
  const int n = spec.size();
  bool all_paired = static_cast<int>(spec.pair_of.size()) == n;
  for (int i = 0; all_paired && i < n; ++i)
    if (spec.pair_of[i] < 0) all_paired = false;

  if (all_paired) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const int j = spec.pair_of[i];
      if (j == i)
        total += g(std::complex<double>(spec.eigs[i].real(), 0.0)).real();
      else if (i < j)
        total += 2.0 * g(0.5 * (spec.eigs[i] + std::conj(spec.eigs[j]))).real();
    }
    return total;
  }

  std::complex<double> total{0.0, 0.0};
  for (const auto& e : spec.eigs) total += g(e);
  const double scale = std::max(1.0, std::abs(total));
  if (std::abs(total.imag()) > 1e-8 * scale)
    throw std::runtime_error(std::string(what) +
                             ": imaginary residue exceeds tolerance (broken pairing)");
  return total.real();
}

}  // namespace

SpectralData eigenvalues_of(const Eigen::MatrixXcd& h, bool is_real) {
  SpectralData spec;
  spec.from_real_matrix = is_real;
  const int n = static_cast<int>(h.rows());
  spec.eigs.resize(n);
  if (is_real) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(h.real(), false);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigensolver did not converge");
    for (int i = 0; i < n; ++i) spec.eigs[i] = es.eigenvalues()(i);
    pair_conjugates(spec, /*strict=*/true);
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h, false);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigensolver did not converge");
    for (int i = 0; i < n; ++i) spec.eigs[i] = es.eigenvalues()(i);
    // Hermitian-control matrices (purely imaginary U) have real spectra;
    // pairing then marks everything as a singleton. Anything genuinely
    // unpaired is left at -1 and handled by the residue-checked sum.
    pair_conjugates(spec, /*strict=*/false);
  }
  return spec;
}

SpectralData spectral_from_eigs(std::vector<std::complex<double>> eigs) {
  SpectralData spec;
  spec.eigs = std::move(eigs);
  pair_conjugates(spec, /*strict=*/false);
  return spec;
}

SpectralData eigenvalues(const HoppingMatrix& h) {
  return eigenvalues_of(h.h, h.is_real());
}

double log_weight(const SpectralData& spec, double beta) {
  return real_spectral_sum(
      spec, [beta](std::complex<double> e) { return detail::log1p_exp(-beta * e); },
      "log_weight");
}

double fermion_energy(const SpectralData& spec, double beta) {
  return real_spectral_sum(
      spec, [beta](std::complex<double> e) { return e * detail::fermi(beta * e); },
      "fermion_energy");
}

double denergy_dbeta(const SpectralData& spec, double beta) {
  return real_spectral_sum(
      spec,
      [beta](std::complex<double> e) { return -e * e * detail::fermi_band(beta * e); },
      "denergy_dbeta");
}

GroundStateEnergy ground_state_energy(const SpectralData& spec) {
  const double tol = 1e-10 * spectral_scale(spec.eigs);
  GroundStateEnergy gs;
  for (const auto& e : spec.eigs) {
    if (e.real() < -tol) {
      gs.value += e.real();  // imaginary parts cancel in conjugate pairs
    } else if (e.real() <= tol) {
      gs.value += 0.5 * e.real();
      ++gs.near_zero_modes;
    }
  }
  return gs;
}

CorrelationResult correlation_matrix(const HoppingMatrix& hm, double beta) {
  auto solve = [beta](const Eigen::MatrixXcd& h, CorrelationResult& out) -> bool {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h, true);
    if (es.info() != Eigen::Success) return false;
    const Eigen::MatrixXcd& R = es.eigenvectors();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(R);
    // Reciprocal condition estimate from the LU diagonal.
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    for (int i = 0; i < R.rows(); ++i) {
      const double d = std::abs(lu.matrixLU()(i, i));
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    out.rcond = (dmax > 0.0) ? dmin / dmax : 0.0;
    if (out.rcond < 1e-10) return false;
    Eigen::VectorXcd f(R.rows());
    for (int i = 0; i < R.rows(); ++i)
      f(i) = detail::fermi(beta * es.eigenvalues()(i));
    out.G = R * f.asDiagonal() * lu.inverse();
    return true;
  };

  CorrelationResult out;
  if (solve(hm.h, out)) return out;

  // Near an exceptional point: perturb the diagonal and report.
  double scale = hm.h.cwiseAbs().maxCoeff();
  if (scale <= 0.0) scale = 1.0;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::MatrixXcd hp = hm.h;
  for (int i = 0; i < hp.rows(); ++i) hp(i, i) += 1e-10 * scale * unit(rng);
  CorrelationResult retry;
  if (!solve(hp, retry))
    throw std::runtime_error("correlation_matrix: eigenbasis ill-conditioned even after regularization");
  retry.regularized = true;
  return retry;
}

Eigen::MatrixXcd velocity_matrix(const ModelParams& params, const SpinConfig& config) {
  const HoppingMatrix hm = build_hopping(params, config);
  const int L = params.L;
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(L, L);
  const std::complex<double> I{0.0, 1.0};
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b) {
      if (hm.h(a, b) == std::complex<double>(0.0, 0.0)) continue;
      // Sign fixed by the plane-wave identity <k|V|k> = d eps/d k for the
      // e^{ikx} Fourier convention.
      V(a, b) = I * static_cast<double>(ring_displacement(b, a, L)) * hm.h(a, b);
    }
  return V;
}

std::complex<double> velocity_expectation(const ModelParams& params,
                                          const SpinConfig& config, double beta) {
  const HoppingMatrix hm = build_hopping(params, config);
  const CorrelationResult corr = correlation_matrix(hm, beta);
  const Eigen::MatrixXcd V = velocity_matrix(params, config);
  return (V * corr.G).trace();
}

FermionObservables fermion_observables(const ModelParams& params, const SpinConfig& config) {
  const HoppingMatrix hm = build_hopping(params, config);
  const SpectralData spec = eigenvalues(hm);
  FermionObservables obs;
  obs.log_weight = log_weight(spec, params.beta);
  obs.energy = fermion_energy(spec, params.beta);
  obs.denergy_dbeta = denergy_dbeta(spec, params.beta);
  obs.gs_energy = ground_state_energy(spec).value;
  obs.velocity = velocity_expectation(params, config, params.beta);
  obs.winding = winding_number(obs.velocity, params.beta, params.L);
  return obs;
}

}  // namespace nhchain
