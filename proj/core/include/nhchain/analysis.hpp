#pragma once

#include <complex>
#include <string>
#include <vector>

#include "nhchain/mc.hpp"
#include "nhchain/model.hpp"

namespace nhchain {

struct ObservableSeries {
  std::string axis_name;
  std::vector<double> axis;
  std::vector<double> mean;
  std::vector<double> err;
  int L = 0;
  std::string tag;
};

struct ValueWithError {
  double value = 0.0;
  double error = 0.0;
};

/// C_V = beta^2 [Var(E_J + E_f) - <dE_f/dbeta>], the fluctuation-response
/// decomposition of -beta^2 d<E>/dbeta for the mixed classical-quantum
/// weight. Error from jackknife over 20 blocks.
ValueWithError specific_heat(const std::vector<SampleRecord>& samples,
                             const ModelParams& params, bool per_site = true);

struct Plateau {
  int w_index = 0;       // nearest integer winding
  std::size_t first = 0; // inclusive index range into the series
  std::size_t last = 0;
  double max_residual = 0.0;
};

struct PlateauReport {
  std::vector<Plateau> plateaus;         // |w - round(w)| < 0.1 over >= 3 points
  std::vector<double> transitions;       // axis locations where the index changes
};

PlateauReport detect_plateaus(const ObservableSeries& winding);

/// Translation-averaged C_X(r) and connected-free Im-current correlator
/// C_v(r), r = 0..L/2, averaged over samples with jackknife errors.
std::pair<ObservableSeries, ObservableSeries> correlations(
    const std::vector<SampleRecord>& samples, const ModelParams& params);

enum class ScanMode { FixedLVaryR, FixedRVaryL };

struct DomainWallScan {
  ScanMode mode = ScanMode::FixedLVaryR;
  std::vector<double> x;   // r (fixed L) or L (fixed r)
  std::vector<double> dE;  // ground_state_energy(pair) - ground_state_energy(uniform)
  double slope = 0.0;      // linear fit (fixed-L mode, over the fit window)
  double intercept = 0.0;
  double r_squared = 0.0;
  double saturation_delta = 0.0;  // |dE(last) - dE(prev)| (fixed-r mode)
};

/// Fixed-L mode: dE(r) for the given r values, linear fit over r in
/// [L/8, L/2]. Fixed-r mode: dE(L) for the given L values with the
/// saturation delta of the last two points. At t' = 0 under PBC the
/// spectrum is evaluated through the similarity reduction; a direct
/// eigensolve of these strongly non-normal matrices is unreliable
/// beyond L of a few hundred.
DomainWallScan domain_wall_scan(const ModelParams& params, ScanMode mode,
                                const std::vector<int>& values, int fixed_value);

struct BetaCEstimate {
  double beta_c = 0.0;
  double error = 0.0;
  bool reliable = false;  // false when peaks do not sharpen/drift with L
  std::vector<double> peak_positions;  // per input series
};

/// Per-L quadratic fit around the C_V(beta) maximum, then linear
/// extrapolation of peak positions in 1/L to the intercept.
BetaCEstimate betac_from_scaling(const std::vector<ObservableSeries>& cv_by_L);

struct HistogramV {
  int bins = 0;
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;
  std::vector<double> density;  // row-major bins x bins, sums to 1

  double& at(int i, int j) { return density[static_cast<std::size_t>(i) * bins + j]; }
  double at(int i, int j) const { return density[static_cast<std::size_t>(i) * bins + j]; }

  /// L1 distance between the histogram and its v -> -v mirror.
  double symmetry_score() const;
};

HistogramV histogram_v(const std::vector<std::complex<double>>& values,
                       const std::vector<double>& weights, int bins);

/// Least squares y = a x + b; returns (slope, intercept, R^2, slope error).
struct LinearFit {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0, slope_err = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nhchain
