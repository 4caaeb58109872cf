#include "nhchain/mc.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nhchain/exact_sum.hpp"

namespace nhchain {

nlohmann::json RunManifest::to_json() const {
  return nlohmann::json{{"params", params.to_json()},
                        {"seed", seed},
                        {"n_therm", n_therm},
                        {"n_sweeps", n_sweeps},
                        {"n_chains", n_chains},
                        {"measure_every", measure_every},
                        {"fast_path", fast_path},
                        {"code_version", code_version}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.params = ModelParams::from_json(j.at("params"));
  m.seed = j.at("seed").get<std::uint64_t>();
  m.n_therm = j.at("n_therm").get<int>();
  m.n_sweeps = j.at("n_sweeps").get<int>();
  m.n_chains = j.at("n_chains").get<int>();
  m.measure_every = j.at("measure_every").get<int>();
  m.fast_path = j.at("fast_path").get<bool>();
  m.code_version = j.value("code_version", std::string(NHCHAIN_VERSION));
  return m;
}

Chain::Chain(const ModelParams& params, std::uint64_t seed, bool use_fast_path,
             Start start)
    : params_(params), rng_(seed) {
  params_.validate();
  fast_ = use_fast_path && params_.t_prime == 0.0 && params_.bc == Boundary::PBC;

  if (start == Start::Cold) {
    config_ = uniform_config(params_.L, +1);
  } else {
    config_ = uniform_config(params_.L, +1);
    std::bernoulli_distribution coin(0.5);
    for (auto& v : config_.x) v = coin(rng_) ? std::int8_t{+1} : std::int8_t{-1};
  }
  n_minus_ = config_.n_minus();

  if (fast_) {
    log_wf_table_.resize(params_.L + 1);
    for (int n = 0; n <= params_.L; ++n) {
      log_wf_table_[n] =
          log_weight(spectral_from_eigs(hn_spectrum(params_.L, n, params_).eigs),
                     params_.beta);
    }
  }
  log_wf_ = fermion_log_weight(config_);
  log_w_ = -params_.beta * ising_energy(config_, params_) + log_wf_;
}

double Chain::fermion_log_weight(const SpinConfig& c) const {
  if (fast_) return log_wf_table_[c.n_minus()];
  return log_weight(eigenvalues(build_hopping(params_, c)), params_.beta);
}

double Chain::recompute_log_weight() const {
  return -params_.beta * ising_energy(config_, params_) + fermion_log_weight(config_);
}

void Chain::sweep() {
  const int L = params_.L;
  std::uniform_int_distribution<int> pick(0, L - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int p = 0; p < L; ++p) {
    const int j = pick(rng_);
    const double xj = config_.x[j];

    double dEJ;
    if (params_.bc == Boundary::PBC) {
      dEJ = 2.0 * params_.J * xj *
            (config_.x[(j + L - 1) % L] + config_.x[(j + 1) % L]);
    } else {
      double nb = 0.0;
      if (j > 0) nb += config_.x[j - 1];
      if (j < L - 1) nb += config_.x[j + 1];
      dEJ = 2.0 * params_.J * xj * nb;
    }

    double dlogwf;
    double new_log_wf = 0.0;
    if (fast_) {
      const int n_new = n_minus_ + (xj > 0 ? +1 : -1);
      dlogwf = log_wf_table_[n_new] - log_wf_table_[n_minus_];
      new_log_wf = log_wf_table_[n_new];
    } else {
      config_.flip(j);
      try {
        new_log_wf = fermion_log_weight(config_);
      } catch (const std::exception&) {
        config_.flip(j);
        ++spectral_aborts_;
        ++proposals_;
        continue;
      }
      config_.flip(j);
      dlogwf = new_log_wf - log_wf_;
    }

    const double delta = -params_.beta * dEJ + dlogwf;
    ++proposals_;
    if (delta >= 0.0 || unit(rng_) < std::exp(delta)) {
      config_.flip(j);
      if (xj > 0)
        ++n_minus_;
      else
        --n_minus_;
      log_w_ += delta;
      log_wf_ = new_log_wf;
      ++accepts_;
    }
  }
  ++step_count_;
  if (step_count_ % 1000 == 0) verify_cache();
}

void Chain::verify_cache() {
  const double fresh = recompute_log_weight();
  if (std::abs(fresh - log_w_) > 1e-9 * std::max(1.0, std::abs(fresh)))
    ++drift_warnings_;
  log_w_ = fresh;
  log_wf_ = fermion_log_weight(config_);
}

SampleRecord Chain::measure() const {
  const int L = params_.L;
  SampleRecord rec;
  rec.m = config_.magnetization();
  rec.abs_m = std::abs(rec.m);
  rec.E_J = ising_energy(config_, params_);

  const SpectralData spec =
      fast_ ? spectral_from_eigs(hn_spectrum(L, n_minus_, params_).eigs)
            : eigenvalues(build_hopping(params_, config_));
  rec.E_f = fermion_energy(spec, params_.beta);
  rec.dEf_dbeta = denergy_dbeta(spec, params_.beta);

  const HoppingMatrix hm = build_hopping(params_, config_);
  const CorrelationResult corr = correlation_matrix(hm, params_.beta);
  const Eigen::MatrixXcd V = velocity_matrix(params_, config_);
  rec.v = (V * corr.G).trace();
  rec.sector = sector_of(rec.m, rec.v.imag(), L);

  const int rmax = L / 2;
  rec.corr_X.assign(rmax + 1, 0.0);
  rec.corr_v.assign(rmax + 1, 0.0);

  // Per-bond current: NN part on bond i, NNN hops assigned to their left bond.
  std::vector<double> jb(L, 0.0);
  for (int i = 0; i < L; ++i) {
    const int ip = (i + 1) % L;
    std::complex<double> ji = V(ip, i) * corr.G(i, ip) + V(i, ip) * corr.G(ip, i);
    if (params_.t_prime != 0.0) {
      const int ipp = (i + 2) % L;
      ji += V(ipp, i) * corr.G(i, ipp) + V(i, ipp) * corr.G(ipp, i);
    }
    jb[i] = ji.imag();
  }

  if (params_.bc == Boundary::PBC) {
    for (int r = 0; r <= rmax; ++r) {
      double cx = 0.0, cv = 0.0;
      for (int i = 0; i < L; ++i) {
        cx += config_.x[i] * config_.x[(i + r) % L];
        cv += jb[i] * jb[(i + r) % L];
      }
      rec.corr_X[r] = cx / L;
      rec.corr_v[r] = cv / L;
    }
  } else {
    for (int r = 0; r <= rmax; ++r) {
      double cx = 0.0, cv = 0.0;
      int cnt = 0;
      for (int i = 0; i + r < L; ++i, ++cnt) {
        cx += config_.x[i] * config_.x[i + r];
        cv += jb[i] * jb[i + r];
      }
      rec.corr_X[r] = cnt ? cx / cnt : 0.0;
      rec.corr_v[r] = cnt ? cv / cnt : 0.0;
    }
  }
  return rec;
}

double Chain::acceptance_rate() const {
  return proposals_ ? static_cast<double>(accepts_) / proposals_ : 0.0;
}

BinnedStats binned_statistics(const std::vector<double>& series) {
  BinnedStats out;
  const std::size_t n = series.size();
  if (n == 0) return out;
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;
  out.mean = mean;
  if (n < 2) return out;

  double var0 = 0.0;
  for (double v : series) var0 += (v - mean) * (v - mean);
  var0 /= (n - 1);
  if (var0 == 0.0) {
    out.err = 0.0;
    out.tau_int = 0.5;
    return out;
  }

  // Bin-doubling: error from the largest level with >= 16 bins.
  std::vector<double> bins(series);
  double best_err2 = var0 / n;
  std::size_t bin_size = 1;
  while (bins.size() / 2 >= 16) {
    std::vector<double> next(bins.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = 0.5 * (bins[2 * i] + bins[2 * i + 1]);
    bins.swap(next);
    bin_size *= 2;
    double bm = 0.0;
    for (double v : bins) bm += v;
    bm /= bins.size();
    double bv = 0.0;
    for (double v : bins) bv += (v - bm) * (v - bm);
    bv /= (bins.size() - 1);
    best_err2 = std::max(best_err2, bv / bins.size());
  }
  out.err = std::sqrt(best_err2);
  out.tau_int = 0.5 * best_err2 / (var0 / n);
  return out;
}

namespace {

struct ChainOutput {
  std::vector<SampleRecord> samples;
  double acceptance = 0.0;
  int drift_warnings = 0;
  int spectral_aborts = 0;
  bool equilibration_warning = false;
};

ChainOutput run_one_chain(const RunManifest& manifest, int chain_id) {
  Chain chain(manifest.params, manifest.seed + static_cast<std::uint64_t>(chain_id),
              manifest.fast_path,
              chain_id % 2 == 0 ? Chain::Start::Cold : Chain::Start::Hot);
  for (int s = 0; s < manifest.n_therm; ++s) chain.sweep();

  ChainOutput out;
  const int every = std::max(1, manifest.measure_every);
  for (int s = 0; s < manifest.n_sweeps; ++s) {
    chain.sweep();
    if ((s + 1) % every == 0) out.samples.push_back(chain.measure());
  }
  out.acceptance = chain.acceptance_rate();
  out.drift_warnings = chain.drift_warnings();
  out.spectral_aborts = chain.spectral_aborts();

  // Equilibration check on |m|: first vs second half of the sample stream.
  const std::size_t half = out.samples.size() / 2;
  if (half >= 8) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < half; ++i) a.push_back(out.samples[i].abs_m);
    for (std::size_t i = half; i < out.samples.size(); ++i)
      b.push_back(out.samples[i].abs_m);
    const BinnedStats sa = binned_statistics(a), sb = binned_statistics(b);
    const double sigma = std::hypot(sa.err, sb.err);
    if (sigma > 0.0 && std::abs(sa.mean - sb.mean) > 5.0 * sigma)
      out.equilibration_warning = true;
  }
  return out;
}

}  // namespace

McResult run_chain(const RunManifest& manifest) {
  manifest.params.validate();
  if (manifest.n_chains < 1) throw std::invalid_argument("n_chains must be >= 1");

  std::vector<std::future<ChainOutput>> futures;
  futures.reserve(manifest.n_chains);
  for (int c = 0; c < manifest.n_chains; ++c)
    futures.push_back(std::async(std::launch::async, run_one_chain, manifest, c));

  McResult result;
  double acc = 0.0;
  for (int c = 0; c < manifest.n_chains; ++c) {
    ChainOutput out = futures[c].get();
    acc += out.acceptance;
    result.drift_warnings += out.drift_warnings;
    result.spectral_aborts += out.spectral_aborts;
    if (out.equilibration_warning)
      result.warnings.push_back("chain " + std::to_string(c) +
                                ": first/second half means differ by > 5 sigma");
    for (auto& s : out.samples) result.samples.push_back(std::move(s));
  }
  result.acceptance = acc / manifest.n_chains;

  const int L = manifest.params.L;
  const double beta = manifest.params.beta;
  std::vector<double> m, abs_m, E, E_f, dEf, im_v, w_sector;
  for (const auto& s : result.samples) {
    m.push_back(s.m);
    abs_m.push_back(s.abs_m);
    E.push_back(s.E_J + s.E_f);
    E_f.push_back(s.E_f);
    dEf.push_back(s.dEf_dbeta);
    im_v.push_back(s.v.imag());
    w_sector.push_back(s.sector * s.v.imag() * beta / L);
  }
  result.stats["m"] = binned_statistics(m);
  result.stats["abs_m"] = binned_statistics(abs_m);
  result.stats["E"] = binned_statistics(E);
  result.stats["E_f"] = binned_statistics(E_f);
  result.stats["dEf_dbeta"] = binned_statistics(dEf);
  result.stats["im_v"] = binned_statistics(im_v);
  result.stats["w_sector"] = binned_statistics(w_sector);
  return result;
}

}  // namespace nhchain
