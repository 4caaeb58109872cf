#pragma once

#include <complex>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nhchain/model.hpp"

namespace nhchain {

/// Reduced spectrum of h(X) at t' = 0 under PBC: a similarity transform maps
/// any configuration with n_minus bonds of X = -1 onto a uniform
/// asymmetric-hopping ring, so the spectrum depends on n_minus only.
struct HNReducedSpectrum {
  int n_minus = 0;
  std::complex<double> amp_product;  // prod_i (t + U X_i) = (t+U)^{n+} (t-U)^{n-}
  std::complex<double> A;            // uniform right amplitude, amp_product^{1/L}
  std::complex<double> B;            // uniform left amplitude, (t^2 - U^2)/A
  std::vector<std::complex<double>> eigs;  // eigs[m] = A e^{-i 2pi m/L} + B e^{+i 2pi m/L}
  bool complex_amp_flagged = false;  // |U| >= t with odd n_minus
};

/// Requires t' = 0, PBC, t +- U != 0 (throws std::invalid_argument otherwise).
HNReducedSpectrum hn_spectrum(int L, int n_minus, const ModelParams& params);

/// Number of length-L binary rings with n entries of -1 arranged so that the
/// ring has exactly k domain walls. Exact integer arithmetic.
boost::multiprecision::cpp_int ring_multiplicity(int L, int n, int k);

/// ln ring_multiplicity via lgamma; -inf when the count is zero.
double log_ring_multiplicity(int L, int n, int k);

struct ExactObservables {
  double log_Z = 0.0;
  double mean_abs_m = 0.0;
  double mean_E = 0.0;
  double C_V = 0.0;           // extensive (total), see specific-heat helpers
  double mean_w_sector = 0.0; // sector-folded winding <s * Im v> * beta / L
  double mean_m_sector = 0.0; // sector-folded magnetization <s * m>
};

/// Enumeration-free exact sums over (n_minus, wall-count) degeneracy classes.
/// Requires t' = 0 and PBC.
ExactObservables exact_observables(const ModelParams& params);

/// Reference implementation: enumerates all 2^L configurations with a full
/// diagonalization each. Any t', any boundary condition. L <= 16.
ExactObservables brute_force(const ModelParams& params);

/// Sector label used consistently by the exact sums, the brute-force oracle
/// and the MC measurement: sign(m) when |m| > 1/L, else sign(Im <v>),
/// else +1.
int sector_of(double m, double im_v, int L);

}  // namespace nhchain
