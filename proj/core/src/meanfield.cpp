#include "nhchain/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nhchain/spectral.hpp"

namespace nhchain {

namespace {

constexpr double kPi = std::numbers::pi;

// k-grid size for the mean-field momentum sums. When L is a multiple of 4
// the grid contains k = pi/2 exactly, where Re eps = 0 (at t' = 0) and the
// Fermi factor has genuine poles in m at 2 beta U m = (2j+1) pi; one extra
// point keeps every grid k away from the singular line.
int kgrid(const ModelParams& params) {
  return params.L % 4 == 0 ? params.L + 1 : params.L;
}

}  // namespace

std::complex<double> mf_dispersion(double k, double m, const ModelParams& params) {
  const std::complex<double> I{0.0, 1.0};
  return 2.0 * params.t * std::cos(k) + 2.0 * params.t_prime * std::cos(2.0 * k) +
         2.0 * I * params.U() * m * std::sin(k);
}

double mf_field(double m, const ModelParams& params) {
  const int L = kgrid(params);
  const std::complex<double> I{0.0, 1.0};
  // <c+_{i+1} c_i - c+_i c_{i+1}> = (-2i/L) sum_k f(beta eps_k) sin k in the
  // e^{ikx} convention (the same one that fixes the velocity sign). The
  // resulting orientation makes g < 0 for small m > 0 at low T, so the
  // fermions reinforce the order.
  // Combine k with -k using identical cos/sin values so the pair is exactly
  // conjugate in floating point: the result stays real even when f sits next
  // to a pole of the Fermi factor (Im beta eps near an odd multiple of pi).
  std::complex<double> ksum{0.0, 0.0};
  for (int n = 1; 2 * n < L; ++n) {
    const double c = std::cos(2.0 * kPi * n / L);
    const double s = std::sin(2.0 * kPi * n / L);
    const double band = 2.0 * params.t * c + 2.0 * params.t_prime * (2.0 * c * c - 1.0);
    const std::complex<double> shift = 2.0 * I * params.U() * m * s;
    ksum += (detail::fermi(params.beta * (band + shift)) -
             detail::fermi(params.beta * (band - shift))) *
            s;
  }
  const std::complex<double> g = -2.0 * I * params.U() / static_cast<double>(L) * ksum;
  if (std::abs(g.imag()) > 1e-10 * std::max(1.0, std::abs(g.real())))
    throw std::runtime_error("mf_field: imaginary residue above tolerance");
  return g.real() - 2.0 * params.J * m;
}

namespace {

// Fermionic grand potential of the decoupled band, per L sites, on the
// pole-avoiding k-grid. d(omega_f)/dm = -L g_fermion(m) exactly, which is
// what makes the Landau integral below closed-form.
double mf_omega_f(double m, const ModelParams& params) {
  const int N = kgrid(params);
  double s = 0.0;
  for (int n = 0; n < N; ++n) {
    const double k = 2.0 * kPi * n / N;
    s += detail::log1p_exp(-params.beta * mf_dispersion(k, m, params)).real();
  }
  return -s * static_cast<double>(params.L) / (params.beta * N);
}

}  // namespace

double mf_free_energy(double m, const ModelParams& params) {
  // Landau function whose derivative is exactly the self-consistency
  // residual (1/beta) artanh(m) + g(m): stationary points coincide with the
  // fixed points of m = -tanh(beta g(m)), stable solutions are local minima,
  // and F(0) = 0. The spin part is -T s(m) for a +-1 spin at magnetization m
  // (up to the constant T ln 2); the fermion part is the integral of the
  // fermionic field, int_0^m g_f = -(omega_f(m) - omega_f(0))/L.
  const int L = params.L;
  const double mc = std::clamp(m, -1.0 + 1e-15, 1.0 - 1e-15);
  const double spin =
      (mc * std::atanh(mc) + 0.5 * std::log1p(-mc * mc)) / params.beta;
  const double ferm = -(mf_omega_f(m, params) - mf_omega_f(0.0, params)) / L;
  return L * (spin - params.J * m * m + ferm);
}

std::vector<MFState> solve_selfconsistent(const ModelParams& params,
                                          const std::vector<double>& seeds) {
  params.validate();
  constexpr double lambda = 0.5;
  constexpr double tol = 1e-10;
  constexpr int max_iter = 10000;

  // residual of the fixed-point condition m = -tanh(beta g(m))
  auto resid = [&params](double m) {
    return m + std::tanh(params.beta * mf_field(m, params));
  };

  std::vector<MFState> solutions;
  for (double seed : seeds) {
    double m = std::clamp(seed, -1.0, 1.0);
    MFState st;
    for (int it = 0; it < max_iter; ++it) {
      const double g = mf_field(m, params);
      const double m_next = (1.0 - lambda) * m + lambda * (-std::tanh(params.beta * g));
      st.iterations = it + 1;
      if (std::abs(m_next - m) < tol) {
        m = m_next;
        st.converged = true;
        break;
      }
      // The map stops contracting where dg/dm is steep (low T): once the
      // iterates oscillate around a sign change of the residual, finish by
      // bisection inside the bracket instead of bouncing forever.
      if (it > 10 && std::abs(m_next - m) < 0.05 &&
          resid(m) * resid(m_next) < 0.0) {
        double a = m, b = m_next;
        const double ra = resid(a);
        for (int step = 0; step < 80; ++step) {
          const double mid = 0.5 * (a + b);
          (resid(mid) * ra > 0.0 ? a : b) = mid;
        }
        m = 0.5 * (a + b);
        st.converged = std::abs(resid(m)) < 1e-9;  // rejects pole jumps
        break;
      }
      m = m_next;
    }
    st.m = m;
    st.g_current = mf_field(m, params);
    st.free_energy = mf_free_energy(m, params);

    bool duplicate = false;
    for (const auto& s : solutions)
      if (std::abs(s.m - st.m) < 1e-6) duplicate = true;
    if (!duplicate) solutions.push_back(st);
  }
  return solutions;
}

MFState select_solution(const ModelParams& params) {
  const std::vector<double> seeds{0.0, 0.9, -0.9, 0.3, -0.3};
  const auto sols = solve_selfconsistent(params, seeds);
  MFState best;
  bool have = false;
  for (const auto& s : sols) {
    if (!s.converged) continue;
    if (!have || s.free_energy < best.free_energy) {
      best = s;
      have = true;
    }
  }
  if (!have) {
    best.converged = false;
  }
  return best;
}

std::vector<BoundaryPoint> trace_boundary(const ModelParams& base,
                                          const std::vector<double>& U_values,
                                          double T_lo, double T_hi) {
  std::vector<BoundaryPoint> boundary;
  boundary.reserve(U_values.size());

  auto ordered_at = [&base](double U, double T) {
    ModelParams p = base;
    p.U_re = U;
    p.U_im = 0.0;
    p.beta = 1.0 / T;
    const MFState s = select_solution(p);
    return s.converged && std::abs(s.m) > 1e-4;
  };

  for (double U : U_values) {
    BoundaryPoint pt;
    pt.U = U;
    if (ordered_at(U, T_hi)) {
      pt.ordered_found = true;
      pt.T_c = T_hi;  // boundary above the scanned window
      boundary.push_back(pt);
      continue;
    }
    // Deep in the ordered phase the damped iteration can fail to converge
    // (the Fermi factors oscillate in m at large beta), so the boundary is
    // bracketed by scanning down from T_hi for the highest ordered point.
    constexpr int kCoarse = 64;
    double lo = T_lo, hi = T_hi;
    bool bracketed = false;
    for (int i = 1; i <= kCoarse; ++i) {
      const double T = T_hi + (T_lo - T_hi) * i / kCoarse;
      if (ordered_at(U, T)) {
        lo = T;
        hi = T_hi + (T_lo - T_hi) * (i - 1) / kCoarse;
        bracketed = true;
        break;
      }
    }
    if (!bracketed) {
      boundary.push_back(pt);  // no ordered phase in the scanned window
      continue;
    }
    while (hi - lo > 1e-3) {
      const double mid = 0.5 * (lo + hi);
      if (ordered_at(U, mid))
        lo = mid;
      else
        hi = mid;
    }
    pt.ordered_found = true;
    pt.T_c = 0.5 * (lo + hi);
    boundary.push_back(pt);
  }
  return boundary;
}

}  // namespace nhchain
