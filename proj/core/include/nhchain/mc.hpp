#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nhchain/model.hpp"
#include "nhchain/spectral.hpp"

namespace nhchain {

/// Per-sample observables.
struct SampleRecord {
  double m = 0.0;
  double abs_m = 0.0;
  double E_J = 0.0;
  double E_f = 0.0;
  double dEf_dbeta = 0.0;
  std::complex<double> v{0.0, 0.0};
  int sector = +1;
  std::vector<double> corr_X;  // <X_i X_{i+r}>, r = 0..L/2
  std::vector<double> corr_v;  // <Im j_i Im j_{i+r}>, r = 0..L/2
};

/// Full provenance of a run: identical manifest (params + seed) on a single
/// chain reproduces the sample stream bit-exactly.
struct RunManifest {
  ModelParams params;
  std::uint64_t seed = 1;
  int n_therm = 10000;
  int n_sweeps = 100000;
  int n_chains = 8;
  int measure_every = 10;
  bool fast_path = true;  // honored only when t' = 0 and PBC
  std::string code_version = NHCHAIN_VERSION;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

/// Single Metropolis chain over bond configurations with the positive weight
/// exp(-beta E_J) prod_n (1 + e^{-beta eps_n}).
class Chain {
 public:
  enum class Start { Cold, Hot };

  Chain(const ModelParams& params, std::uint64_t seed, bool use_fast_path,
        Start start = Start::Hot);

  /// L single-bond flip proposals at uniformly random bonds.
  void sweep();

  SampleRecord measure() const;

  const SpinConfig& config() const { return config_; }
  double cached_log_weight() const { return log_w_; }
  double recompute_log_weight() const;
  bool fast_path() const { return fast_; }
  double acceptance_rate() const;
  long step_count() const { return step_count_; }
  int drift_warnings() const { return drift_warnings_; }
  int spectral_aborts() const { return spectral_aborts_; }

 private:
  double fermion_log_weight(const SpinConfig& c) const;
  void verify_cache();

  ModelParams params_;
  SpinConfig config_;
  bool fast_ = false;
  std::vector<double> log_wf_table_;  // by n_minus, fast path only
  int n_minus_ = 0;
  double log_w_ = 0.0;   // -beta E_J + fermionic log weight
  double log_wf_ = 0.0;  // fermionic log weight of the current config
  std::mt19937_64 rng_;
  long step_count_ = 0;
  long proposals_ = 0;
  long accepts_ = 0;
  int drift_warnings_ = 0;
  int spectral_aborts_ = 0;
};

struct BinnedStats {
  double mean = 0.0;
  double err = 0.0;
  double tau_int = 0.5;  // integrated autocorrelation time, in samples
};

/// Binning analysis with bin doubling; err from the largest stable bin level.
BinnedStats binned_statistics(const std::vector<double>& series);

struct McResult {
  std::vector<SampleRecord> samples;  // merged, ordered by (chain, step)
  std::map<std::string, BinnedStats> stats;
  double acceptance = 0.0;
  int drift_warnings = 0;
  int spectral_aborts = 0;
  std::vector<std::string> warnings;
};

/// Thermalize + sample n_chains independent chains (alternating cold/hot
/// starts, seeds seed+chain) and merge deterministically by chain id.
McResult run_chain(const RunManifest& manifest);

}  // namespace nhchain
