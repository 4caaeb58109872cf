#include "doctest.h"

#include <nlohmann/json.hpp>

#include "nhchain/model.hpp"

using namespace nhchain;

TEST_CASE("hopping matrix entries for the uniform L=4 ring") {
  ModelParams p;
  p.L = 4;
  p.U_re = 0.4;
  const auto hm = build_hopping(p, uniform_config(4, +1));
  // rightward (sub-diagonal) 1.4, leftward 0.6, wrap entries included
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    CHECK(hm.h(j, i).real() == doctest::Approx(1.4));
    CHECK(hm.h(i, j).real() == doctest::Approx(0.6));
    CHECK(hm.h(j, i).imag() == 0.0);
  }
  CHECK(hm.h(0, 3).real() == doctest::Approx(1.4));
  CHECK(hm.h(3, 0).real() == doctest::Approx(0.6));
  CHECK(hm.is_real());
}

TEST_CASE("U=0 gives a symmetric real matrix for any config") {
  ModelParams p;
  p.L = 8;
  p.t_prime = 0.3;
  auto c = uniform_config(8, +1);
  c.flip(2);
  c.flip(5);
  const auto hm = build_hopping(p, c);
  CHECK((hm.h - hm.h.transpose()).norm() == doctest::Approx(0.0));
  CHECK(hm.h.imag().norm() == 0.0);
}

TEST_CASE("single bond flip changes exactly two entries by -+2U x_old") {
  ModelParams p;
  p.L = 6;
  p.U_re = 0.4;
  auto c = uniform_config(6, +1);
  const auto h0 = build_hopping(p, c).h;
  const int j = 2;
  const double x_old = c.x[j];
  c.flip(j);
  const auto h1 = build_hopping(p, c).h;
  Eigen::MatrixXcd diff = h1 - h0;
  CHECK(std::abs(diff(j + 1, j) - std::complex<double>(-2.0 * 0.4 * x_old, 0.0)) < 1e-15);
  CHECK(std::abs(diff(j, j + 1) - std::complex<double>(+2.0 * 0.4 * x_old, 0.0)) < 1e-15);
  diff(j + 1, j) = 0.0;
  diff(j, j + 1) = 0.0;
  CHECK(diff.norm() == 0.0);
}

TEST_CASE("OBC zeroes all wrap entries and the wrap bond is inert") {
  ModelParams p;
  p.L = 6;
  p.U_re = 0.4;
  p.t_prime = 0.2;
  p.bc = Boundary::OBC;
  auto c = uniform_config(6, +1);
  const auto h0 = build_hopping(p, c).h;
  CHECK(h0(0, 5) == std::complex<double>(0.0, 0.0));
  CHECK(h0(5, 0) == std::complex<double>(0.0, 0.0));
  CHECK(h0(0, 4) == std::complex<double>(0.0, 0.0));
  CHECK(h0(1, 5) == std::complex<double>(0.0, 0.0));
  c.flip(5);  // wrap bond: must not change anything
  CHECK((build_hopping(p, c).h - h0).norm() == 0.0);
}

TEST_CASE("ising energy") {
  ModelParams p;
  p.J = 0.05;
  p.L = 8;
  CHECK(ising_energy(uniform_config(8, +1), p) == doctest::Approx(-0.4));

  p.L = 10;
  const auto c = make_domain_wall_pair(10, 3);
  CHECK(c.n_minus() == 3);
  CHECK(c.n_walls(Boundary::PBC) == 2);
  CHECK(ising_energy(c, p) == doctest::Approx(-0.05 * (10 - 4)));

  p.J = 0.0;
  CHECK(ising_energy(c, p) == 0.0);
}

TEST_CASE("domain wall pair boundaries") {
  CHECK_THROWS_AS((void)make_domain_wall_pair(10, 10), std::invalid_argument);
  CHECK_THROWS_AS((void)make_domain_wall_pair(10, 0), std::invalid_argument);
  const auto c = make_domain_wall_pair(10, 5);  // maximal separation
  CHECK(c.n_minus() == 5);
  CHECK(c.n_walls(Boundary::PBC) == 2);
}

TEST_CASE("uniform configs and negation") {
  const auto up = uniform_config(70, +1);
  CHECK(up.n_minus() == 0);
  CHECK(up.magnetization() == 1.0);
  const auto dn = uniform_config(4, -1);
  CHECK(dn.n_minus() == 4);
  CHECK(dn.n_walls(Boundary::PBC) == 0);
  CHECK(up.negated() == uniform_config(70, -1));
  CHECK(dn.negated() == uniform_config(4, +1));
}

TEST_CASE("params validation and JSON round trip") {
  ModelParams p;
  p.L = 2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.L = 16;
  p.beta = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.beta = 2.0;
  p.U_re = 0.4;
  p.U_im = 0.1;  // mixed U is rejected
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.U_im = 0.0;
  p.bc = Boundary::OBC;
  CHECK_NOTHROW(p.validate());
  const auto q = ModelParams::from_json(p.to_json());
  CHECK(q.L == p.L);
  CHECK(q.beta == p.beta);
  CHECK(q.U_re == p.U_re);
  CHECK(q.bc == p.bc);
}

TEST_CASE("ring displacement minimal image") {
  CHECK(ring_displacement(1, 0, 10) == 1);
  CHECK(ring_displacement(0, 1, 10) == -1);
  CHECK(ring_displacement(0, 9, 10) == 1);
  CHECK(ring_displacement(9, 0, 10) == -1);
  CHECK(ring_displacement(0, 8, 10) == 2);
}
