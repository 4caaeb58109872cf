#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "nhchain/model.hpp"

namespace nhchain {

/// Complex single-particle spectrum of h(X) with conjugate-pairing metadata.
struct SpectralData {
  std::vector<std::complex<double>> eigs;
  /// pair_of[i] = index of the conjugate partner, or i itself for a
  /// real-eigenvalue singleton. Populated only for real input matrices.
  std::vector<int> pair_of;
  double tol_used = 0.0;
  bool from_real_matrix = false;

  int size() const { return static_cast<int>(eigs.size()); }
};

/// Full spectrum of the general (non-symmetric) matrix.
/// Throws std::runtime_error on eigensolver non-convergence.
SpectralData eigenvalues(const HoppingMatrix& h);
SpectralData eigenvalues_of(const Eigen::MatrixXcd& h, bool is_real);

/// Wrap a precomputed spectrum (e.g. the reduced ring dispersion) with
/// conjugate-pairing metadata; eigenvalues without a partner stay unpaired
/// and the thermal sums fall back to a residue-checked direct total.
SpectralData spectral_from_eigs(std::vector<std::complex<double>> eigs);

/// ln prod_n (1 + e^{-beta eps_n}), branch-stable up to beta ~ 1e3.
/// Throws std::runtime_error if the imaginary residue of the product
/// exceeds tolerance (broken conjugate pairing).
double log_weight(const SpectralData& spec, double beta);

/// E_f = sum_n eps_n / (1 + e^{beta eps_n}).
double fermion_energy(const SpectralData& spec, double beta);

/// dE_f/dbeta = -sum_n eps_n^2 e^{beta eps_n} / (1 + e^{beta eps_n})^2.
double denergy_dbeta(const SpectralData& spec, double beta);

struct GroundStateEnergy {
  double value = 0.0;
  int near_zero_modes = 0;  // eigenvalues with |Re eps| <= tol, counted half-filled
};

/// Filled-band energy at mu = 0: sum of eigenvalues with Re eps < -tol,
/// plus Re eps / 2 for flagged near-zero-Re modes.
GroundStateEnergy ground_state_energy(const SpectralData& spec);

struct CorrelationResult {
  Eigen::MatrixXcd G;       // <c^dag_a c_b> = G(b, a)
  bool regularized = false; // true if the eigenbasis needed diagonal noise
  double rcond = 1.0;       // reciprocal condition estimate of the eigenbasis
};

/// Thermal one-body correlator G = (I + e^{beta h})^{-1} via right/left
/// eigenvector decomposition with branch-stable Fermi factors. Near
/// exceptional points retries once with h + delta*diag(noise),
/// delta = 1e-10 * spectral scale, and reports via `regularized`.
CorrelationResult correlation_matrix(const HoppingMatrix& h, double beta);

/// V_{ab} = i d_{ab} h_{ab} with d_{ab} the minimal-image ring displacement
/// in {+-1, +-2}, signed so that plane waves e^{ikx} give <k|V|k> = d eps/dk.
Eigen::MatrixXcd velocity_matrix(const ModelParams& params, const SpinConfig& config);

/// <v> = sum_{ab} V_{ab} <c^dag_a c_b> = tr(V G).
std::complex<double> velocity_expectation(const ModelParams& params,
                                          const SpinConfig& config, double beta);

inline double winding_number(std::complex<double> v, double beta, int L) {
  return v.imag() * beta / L;
}

/// Everything the samplers need from one configuration, in one pass.
struct FermionObservables {
  double log_weight = 0.0;
  double energy = 0.0;
  double denergy_dbeta = 0.0;
  double gs_energy = 0.0;
  std::complex<double> velocity{0.0, 0.0};
  double winding = 0.0;
};

FermionObservables fermion_observables(const ModelParams& params, const SpinConfig& config);

namespace detail {
/// Branch-stable ln(1 + e^{z}) for complex z.
std::complex<double> log1p_exp(std::complex<double> z);
/// Branch-stable Fermi factor 1 / (1 + e^{z}).
std::complex<double> fermi(std::complex<double> z);
/// Branch-stable e^{z} / (1 + e^{z})^2 = f(z) f(-z).
std::complex<double> fermi_band(std::complex<double> z);
}  // namespace detail

}  // namespace nhchain
