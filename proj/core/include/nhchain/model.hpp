#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace nhchain {

enum class Boundary { PBC, OBC };

std::string to_string(Boundary bc);
Boundary boundary_from_string(const std::string& s);

/// Couplings and thermodynamic parameters of the chain.
///
/// Units: t = 1 sets the energy scale, k_B = 1. The non-reciprocal coupling
/// U is either purely real or purely imaginary (the Hermitian control),
/// stored as (U_re, U_im).
struct ModelParams {
  double t = 1.0;        // nearest-neighbor hopping
  double t_prime = 0.0;  // next-nearest-neighbor hopping
  double U_re = 0.0;     // non-reciprocal coupling, real case
  double U_im = 0.0;     // non-reciprocal coupling, imaginary (Hermitian) case
  double J = 0.0;        // Ising coupling between neighboring bond spins
  int L = 0;             // number of sites
  double beta = 1.0;     // inverse temperature
  Boundary bc = Boundary::PBC;

  std::complex<double> U() const { return {U_re, U_im}; }

  /// Throws std::invalid_argument on violated invariants
  /// (L >= 3, beta > 0, U purely real or purely imaginary).
  void validate() const;

  nlohmann::json to_json() const;
  static ModelParams from_json(const nlohmann::json& j);
};

/// Ring of bond variables X_i = +-1. Bond i connects sites i and i+1 mod L.
/// Under OBC the sequence still has length L but x[L-1] (the wrap bond) is
/// inert: it never enters the Hamiltonian or the Ising energy.
struct SpinConfig {
  std::vector<std::int8_t> x;

  int size() const { return static_cast<int>(x.size()); }
  int n_minus() const;
  int n_walls(Boundary bc) const;
  double magnetization() const;  // (1/L) sum_i X_i
  void flip(int bond) { x[bond] = static_cast<std::int8_t>(-x[bond]); }
  SpinConfig negated() const;

  bool operator==(const SpinConfig&) const = default;
};

SpinConfig uniform_config(int L, int sign);

/// Two domain walls separated by r bonds: X_i = -1 on a contiguous arc of
/// r bonds (bonds 0..r-1), +1 elsewhere. Requires 1 <= r <= L-1.
SpinConfig make_domain_wall_pair(int L, int r);

/// Single-particle hopping matrix h for a given bond configuration,
/// together with the inputs that produced it.
struct HoppingMatrix {
  Eigen::MatrixXcd h;
  ModelParams params;
  SpinConfig config;

  bool is_real() const { return params.U_im == 0.0; }
};

/// h_{i+1,i} = t + U X_i, h_{i,i+1} = t - U X_i, h_{i+-2,i} = t'.
/// Under OBC all wrap-around entries are zero.
HoppingMatrix build_hopping(const ModelParams& params, const SpinConfig& config);

/// E_J(X) = -J sum_i X_i X_{i+1}; ring sum under PBC, L-1 terms under OBC.
double ising_energy(const SpinConfig& config, const ModelParams& params);

/// Minimal-image ring displacement of site b -> site a; in {-L/2..L/2}.
int ring_displacement(int a, int b, int L);

}  // namespace nhchain
