#include "nhchain/exact_sum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nhchain/spectral.hpp"

namespace nhchain {

namespace {

constexpr double kPi = std::numbers::pi;

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

struct LogSumExp {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;  // sum of exp(x - max), rescaled on a new max

  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x <= max) {
      sum += std::exp(x - max);
    } else {
      sum = sum * std::exp(max - x) + 1.0;
      max = x;
    }
  }
  double value() const { return max + std::log(sum); }
};

struct ClassTerm {
  double log_w;   // unnormalized log weight of the class
  double m;       // magnetization (n_+ - n_-)/L
  double E;       // E_J + E_f
  double dEf;     // dE_f/dbeta
  double im_v;    // Im <v>
  int sector;
};

ExactObservables reduce_terms(const std::vector<ClassTerm>& terms, double beta, int L) {
  LogSumExp lz;
  for (const auto& t : terms) lz.add(t.log_w);
  const double log_Z = lz.value();

  double abs_m = 0.0, E = 0.0, dEf = 0.0, w_sec = 0.0, m_sec = 0.0;
  for (const auto& t : terms) {
    const double p = std::exp(t.log_w - log_Z);
    abs_m += p * std::abs(t.m);
    E += p * t.E;
    dEf += p * t.dEf;
    w_sec += p * t.sector * t.im_v * beta / L;
    m_sec += p * t.sector * t.m;
  }
  // centered second pass: Var(E) as <(E - <E>)^2> avoids the catastrophic
  // cancellation of <E^2> - <E>^2 when |<E>| >> sqrt(Var)
  double varE = 0.0;
  for (const auto& t : terms) {
    const double p = std::exp(t.log_w - log_Z);
    varE += p * (t.E - E) * (t.E - E);
  }
  ExactObservables out;
  out.log_Z = log_Z;
  out.mean_abs_m = abs_m;
  out.mean_E = E;
  out.C_V = beta * beta * (varE - dEf);
  out.mean_w_sector = w_sec;
  out.mean_m_sector = m_sec;
  return out;
}

}  // namespace

int sector_of(double m, double im_v, int L) {
  if (m > 1.0 / L) return +1;
  if (m < -1.0 / L) return -1;
  if (im_v > 0.0) return +1;
  if (im_v < 0.0) return -1;
  return +1;
}

HNReducedSpectrum hn_spectrum(int L, int n_minus, const ModelParams& params) {
  if (params.t_prime != 0.0)
    throw std::invalid_argument("hn_spectrum requires t' = 0");
  if (params.bc != Boundary::PBC)
    throw std::invalid_argument("hn_spectrum requires PBC");
  if (n_minus < 0 || n_minus > L)
    throw std::invalid_argument("n_minus out of range");
  const std::complex<double> U = params.U();
  const std::complex<double> right = params.t + U;  // amplitude on X = +1 bonds
  const std::complex<double> left = params.t - U;
  if (std::abs(right) == 0.0 || std::abs(left) == 0.0)
    throw std::invalid_argument("hn_spectrum requires t +- U != 0");

  HNReducedSpectrum out;
  out.n_minus = n_minus;
  // Log form keeps (t+U)^{n+} (t-U)^{n-} finite for large L.
  const std::complex<double> log_amp =
      static_cast<double>(L - n_minus) * std::log(right) +
      static_cast<double>(n_minus) * std::log(left);
  out.amp_product = std::exp(log_amp);
  const double phi = std::arg(out.amp_product);
  out.complex_amp_flagged = std::abs(phi) > 1e-12;

  // Gauge the ring uniform: right amplitude A = (bond product)^{1/L} with
  // the full accumulated phase Im(log_amp)/L (NOT arg of the product - for
  // complex amplitudes the flux (L - 2 n_minus) arg(t+U) must survive the
  // L-th root, and distributing a different 2 pi branch only relabels m),
  // left amplitude B = (t^2 - U^2)/A.
  out.A = std::exp(log_amp / static_cast<double>(L));
  out.B = (params.t * params.t - U * U) / out.A;

  out.eigs.resize(L);
  const std::complex<double> I{0.0, 1.0};
  for (int m = 0; m < L; ++m) {
    const double theta = 2.0 * kPi * m / L;
    out.eigs[m] = out.A * std::exp(-I * theta) + out.B * std::exp(I * theta);
  }
  return out;
}

boost::multiprecision::cpp_int ring_multiplicity(int L, int n, int k) {
  using boost::multiprecision::cpp_int;
  if (n < 0 || n > L || k < 0) return 0;
  if (n == 0 || n == L) return k == 0 ? 1 : 0;
  if (k == 0 || k % 2 != 0) return 0;
  const int j = k / 2;
  if (j > n || j > L - n) return 0;
  auto binom = [](int nn, int kk) -> cpp_int {
    cpp_int r = 1;
    for (int i = 0; i < kk; ++i) {
      r *= nn - i;
      r /= i + 1;
    }
    return r;
  };
  // N = (L/j) C(n-1, j-1) C(L-n-1, j-1), always an integer.
  return cpp_int(L) * binom(n - 1, j - 1) * binom(L - n - 1, j - 1) / j;
}

double log_ring_multiplicity(int L, int n, int k) {
  if (n < 0 || n > L || k < 0) return -std::numeric_limits<double>::infinity();
  if (n == 0 || n == L)
    return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (k == 0 || k % 2 != 0) return -std::numeric_limits<double>::infinity();
  const int j = k / 2;
  if (j > n || j > L - n) return -std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(L)) - std::log(static_cast<double>(j)) +
         log_binomial(n - 1, j - 1) + log_binomial(L - n - 1, j - 1);
}

ExactObservables exact_observables(const ModelParams& params) {
  params.validate();
  if (params.t_prime != 0.0 || params.bc != Boundary::PBC)
    throw std::invalid_argument("exact_observables requires t' = 0 and PBC");
  const int L = params.L;
  const double beta = params.beta;

  std::vector<ClassTerm> terms;
  terms.reserve(static_cast<std::size_t>(L) * L / 2);
  const std::complex<double> I{0.0, 1.0};

  for (int n = 0; n <= L; ++n) {
    const HNReducedSpectrum hn = hn_spectrum(L, n, params);
    const SpectralData spec = spectral_from_eigs(hn.eigs);
    const double lw_f = log_weight(spec, beta);
    const double E_f = fermion_energy(spec, beta);
    const double dEf = denergy_dbeta(spec, beta);

    // Per-class velocity from the reduced dispersion: v_m = d eps/d theta,
    // using the same A, B, theta_m indexing as hn.eigs.
    std::complex<double> v{0.0, 0.0};
    for (int m = 0; m < L; ++m) {
      const double theta = 2.0 * kPi * m / L;
      const std::complex<double> vm =
          -I * hn.A * std::exp(-I * theta) + I * hn.B * std::exp(I * theta);
      v += vm * detail::fermi(beta * hn.eigs[m]);
    }

    const double m_val = static_cast<double>(L - 2 * n) / L;
    const int sector = sector_of(m_val, v.imag(), L);

    const int k_max = 2 * std::min(n, L - n);
    for (int k = (n == 0 || n == L) ? 0 : 2; k <= std::max(k_max, 0); k += 2) {
      const double log_N = log_ring_multiplicity(L, n, k);
      if (log_N == -std::numeric_limits<double>::infinity()) continue;
      const double E_J = -params.J * (L - 2 * k);
      terms.push_back(ClassTerm{log_N - beta * E_J + lw_f, m_val, E_J + E_f, dEf,
                                v.imag(), sector});
      if (n == 0 || n == L) break;  // only k = 0 exists
    }
  }
  return reduce_terms(terms, beta, L);
}

ExactObservables brute_force(const ModelParams& params) {
  params.validate();
  if (params.L > 16)
    throw std::invalid_argument("brute_force limited to L <= 16");
  const int L = params.L;
  const double beta = params.beta;

  std::vector<ClassTerm> terms;
  terms.reserve(std::size_t{1} << L);

  SpinConfig config = uniform_config(L, +1);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << L); ++mask) {
    for (int i = 0; i < L; ++i)
      config.x[i] = (mask >> i) & 1u ? std::int8_t{-1} : std::int8_t{+1};

    const HoppingMatrix hm = build_hopping(params, config);
    const SpectralData spec = eigenvalues(hm);
    const double lw_f = log_weight(spec, beta);
    const double E_J = ising_energy(config, params);
    const double E_f = fermion_energy(spec, beta);
    const double dEf = denergy_dbeta(spec, beta);
    const std::complex<double> v = velocity_expectation(params, config, beta);
    const double m = config.magnetization();

    terms.push_back(ClassTerm{-beta * E_J + lw_f, m, E_J + E_f, dEf, v.imag(),
                              sector_of(m, v.imag(), L)});
  }
  return reduce_terms(terms, beta, L);
}

}  // namespace nhchain
