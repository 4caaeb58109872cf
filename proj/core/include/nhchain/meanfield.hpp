#pragma once

#include <complex>
#include <vector>

#include "nhchain/model.hpp"

namespace nhchain {

struct MFState {
  double m = 0.0;            // <X>
  double g_current = 0.0;    // effective field on X from the fermions + Ising
  double free_energy = 0.0;  // variational value (convention documented in mf_free_energy)
  bool converged = false;
  int iterations = 0;
};

/// 2 t cos k + 2 t' cos 2k + 2 i U m sin k.
std::complex<double> mf_dispersion(double k, double m, const ModelParams& params);

/// Effective field on a bond spin: g(m) = U <c+_{i+1} c_i - c+_i c_{i+1}>
/// - 2 J m = Re[(-2iU/L) sum_k f(beta eps_k(m)) sin k] - 2 J m over
/// k = 2 pi n / L, in the e^{ikx} convention. Oriented so that g(m) < 0 for
/// small m > 0 at low T (order-reinforcing). Asserts a small imaginary
/// residue of the k-sum.
double mf_field(double m, const ModelParams& params);

/// Landau free energy for L sites, normalized to F(0) = 0:
/// F(m)/L = (1/beta)[m artanh m + (1/2) ln(1-m^2)] - J m^2 + int_0^m g_f.
/// Its derivative is exactly the self-consistency residual
/// (1/beta) artanh(m) + g(m), so stationary points coincide with the fixed
/// points of m = -tanh(beta g(m)) and stable solutions are local minima.
/// The fermionic integral is closed-form: int_0^m g_f =
/// -(omega_f(m) - omega_f(0))/L with omega_f the grand potential of the
/// decoupled band. Even in m.
double mf_free_energy(double m, const ModelParams& params);

/// Damped fixed-point iteration m <- (1-lambda) m + lambda (-tanh(beta g(m))),
/// lambda = 0.5, |dm| < 1e-10, max 1e4 iterations, one run per seed;
/// solutions deduplicated within 1e-6.
std::vector<MFState> solve_selfconsistent(const ModelParams& params,
                                          const std::vector<double>& seeds);

/// Lowest-free-energy solution among the converged ones (default seeds).
MFState select_solution(const ModelParams& params);

struct BoundaryPoint {
  double U = 0.0;
  double T_c = 0.0;        // refined to dT < 1e-3
  bool ordered_found = false;
};

/// For each U, bisection in T on "selected solution has |m| > 1e-4".
std::vector<BoundaryPoint> trace_boundary(const ModelParams& base,
                                          const std::vector<double>& U_values,
                                          double T_lo, double T_hi);

}  // namespace nhchain
