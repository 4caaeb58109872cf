#include "nhchain/model.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace nhchain {

std::string to_string(Boundary bc) { return bc == Boundary::PBC ? "PBC" : "OBC"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "PBC") return Boundary::PBC;
  if (s == "OBC") return Boundary::OBC;
  throw std::invalid_argument("unknown boundary condition: " + s);
}

void ModelParams::validate() const {
  if (L < 3) throw std::invalid_argument("L must be >= 3");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (U_im != 0.0 && U_re != 0.0)
    throw std::invalid_argument("U must be purely real or purely imaginary");
}

nlohmann::json ModelParams::to_json() const {
  return nlohmann::json{{"t", t},         {"t_prime", t_prime}, {"U_re", U_re},
                        {"U_im", U_im},   {"J", J},             {"L", L},
                        {"beta", beta},   {"bc", to_string(bc)}};
}

ModelParams ModelParams::from_json(const nlohmann::json& j) {
  ModelParams p;
  p.t = j.at("t").get<double>();
  p.t_prime = j.at("t_prime").get<double>();
  p.U_re = j.at("U_re").get<double>();
  p.U_im = j.at("U_im").get<double>();
  p.J = j.at("J").get<double>();
  p.L = j.at("L").get<int>();
  p.beta = j.at("beta").get<double>();
  p.bc = boundary_from_string(j.at("bc").get<std::string>());
  return p;
}

int SpinConfig::n_minus() const {
  int n = 0;
  for (auto v : x)
    if (v < 0) ++n;
  return n;
}

int SpinConfig::n_walls(Boundary bc) const {
  const int L = size();
  int walls = 0;
  const int last = (bc == Boundary::PBC) ? L : L - 1;
  for (int i = 0; i < last; ++i)
    if (x[i] != x[(i + 1) % L]) ++walls;
  return walls;
}

double SpinConfig::magnetization() const {
  int s = 0;
  for (auto v : x) s += v;
  return static_cast<double>(s) / size();
}

SpinConfig SpinConfig::negated() const {
  SpinConfig c = *this;
  for (auto& v : c.x) v = static_cast<std::int8_t>(-v);
  return c;
}

SpinConfig uniform_config(int L, int sign) {
  if (L < 3) throw std::invalid_argument("L must be >= 3");
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
  SpinConfig c;
  c.x.assign(L, static_cast<std::int8_t>(sign));
  return c;
}

SpinConfig make_domain_wall_pair(int L, int r) {
  if (r < 1 || r > L - 1)
    throw std::invalid_argument("domain wall separation r must satisfy 1 <= r <= L-1");
  SpinConfig c = uniform_config(L, +1);
  for (int i = 0; i < r; ++i) c.x[i] = -1;
  return c;
}

int ring_displacement(int a, int b, int L) {
  int d = a - b;
  if (d > L / 2) d -= L;
  if (d < -L / 2) d += L;
  return d;
}

HoppingMatrix build_hopping(const ModelParams& params, const SpinConfig& config) {
  params.validate();
  const int L = params.L;
  if (config.size() != L)
    throw std::invalid_argument("config length does not match params.L");

  const std::complex<double> U = params.U();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(L, L);

  const int last_nn = (params.bc == Boundary::PBC) ? L : L - 1;
  for (int i = 0; i < last_nn; ++i) {
    const int j = (i + 1) % L;
    const double X = config.x[i];
    h(j, i) += params.t + U.real() * X;  // rightward hop i -> i+1
    h(i, j) += params.t - U.real() * X;  // leftward hop i+1 -> i
    if (params.U_im != 0.0) {
      h(j, i) += std::complex<double>(0.0, U.imag() * X);
      h(i, j) += std::complex<double>(0.0, -U.imag() * X);
    }
  }
  if (params.t_prime != 0.0) {
    const int last_nnn = (params.bc == Boundary::PBC) ? L : L - 2;
    for (int i = 0; i < last_nnn; ++i) {
      const int j = (i + 2) % L;
      h(j, i) += params.t_prime;
      h(i, j) += params.t_prime;
    }
  }
  return HoppingMatrix{std::move(h), params, config};
}

double ising_energy(const SpinConfig& config, const ModelParams& params) {
  const int L = config.size();
  const int last = (params.bc == Boundary::PBC) ? L : L - 1;
  int s = 0;
  for (int i = 0; i < last; ++i) s += config.x[i] * config.x[(i + 1) % L];
  return -params.J * s;
}

}  // namespace nhchain
