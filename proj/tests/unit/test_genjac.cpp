#include "harmap/genjac.hpp"

#include <doctest.h>

#include <random>

// Oracle notes: the rank-1 lattice Z inside C with involution v -> -conj(v)
// has real slice R/Z; the flow with direction U = -i/pi moves a point by
// 2y/pi, both computed by hand from the defining formulas and frozen here.

TEST_SUITE_BEGIN("genjac");

namespace {

using namespace harmap;

GeneralizedLattice g0_lattice() {
  GeneralizedLattice lat;
  lat.g = 0;
  lat.n = 1;
  lat.gens = MatrixXcd::Ones(1, 1);
  lat.M = -MatrixXcd::Ones(1, 1);
  return lat;
}

// Random coefficient matrix of an antilinear involution: conj(S) * S^{-1}
// squares to the identity composed with conjugation for any invertible S.
MatrixXcd random_involution(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  while (true) {
    MatrixXcd S(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) S(i, j) = cplx(nd(rng), nd(rng));
    if (std::abs(S.determinant()) > 0.1)
      return S.conjugate() * S.inverse();
  }
}

}  // namespace

TEST_CASE("rank-1 real lattice: reduction leaves the off-span part alone") {
  auto lat = g0_lattice();
  VectorXcd v(1);
  v << cplx(1.7, 7.0);
  VectorXcd r = reduce_mod_lattice(v, lat);
  CHECK(std::abs(r(0) - cplx(-0.3, 7.0)) < 1e-14);

  v << cplx(0.3, -2.5);
  r = reduce_mod_lattice(v, lat);
  CHECK(std::abs(r(0) - v(0)) < 1e-15);
}

TEST_CASE("reduction is idempotent and kills integer shifts") {
  std::mt19937_64 rng(411);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> id(-4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    int g = 1 + trial % 2, n = 1;
    int d = g + n, r = 2 * g + n;
    GeneralizedLattice lat;
    lat.g = g;
    lat.n = n;
    // alpha / beta / phi shaped generators with a random tau and fiber part.
    lat.gens = MatrixXcd::Zero(d, r);
    for (int i = 0; i < g; ++i) lat.gens(i, i) = 1.0;
    for (int j = 0; j < g; ++j) {
      for (int i = 0; i < g; ++i)
        lat.gens(i, g + j) = cplx(nd(rng) * 0.3, 0.0) +
                             cplx(0.0, (i == j) ? 1.5 : 0.2 * nd(rng));
      lat.gens(g, g + j) = cplx(nd(rng), nd(rng));
    }
    lat.gens(g, 2 * g) = 1.0;
    lat.M = MatrixXcd::Identity(d, d);

    VectorXcd v(d);
    for (int i = 0; i < d; ++i) v(i) = cplx(3 * nd(rng), 3 * nd(rng));
    VectorXcd red = reduce_mod_lattice(v, lat);
    CHECK((reduce_mod_lattice(red, lat) - red).norm() < 1e-12);

    VectorXcd shift = v;
    for (int j = 0; j < r; ++j)
      shift += static_cast<double>(id(rng)) * lat.gens.col(j);
    CHECK((reduce_mod_lattice(shift, lat) - red).norm() < 1e-11);

    VectorXd a = lat.coords(red);
    CHECK(a.cwiseAbs().maxCoeff() <= 0.5 + 1e-12);
  }
}

TEST_CASE("flow from directions is lattice-real by construction") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 8; ++trial) {
    int d = 2 + trial % 3;
    GeneralizedLattice lat;
    lat.g = d - 1;
    lat.n = 1;
    lat.M = random_involution(d, rng);
    MatrixXcd U(d, 2);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < 2; ++j) U(i, j) = cplx(nd(rng), nd(rng));
    FlowSpec f = FlowSpec::from_directions(U, lat);
    for (int k = 0; k < 5; ++k) {
      VectorXcd z(2);
      z << cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng));
      VectorXcd gamma = gamma_flow_raw(f, z);
      VectorXcd image = lat.M.conjugate() * gamma.conjugate();
      CHECK((gamma + image).norm() < 1e-12);
    }
  }
}

TEST_CASE("rank-1 real lattice: flow, real slice, fiber translation") {
  auto lat = g0_lattice();
  FlowSpec f = FlowSpec::from_directions(
      MatrixXcd::Constant(1, 1, cplx(0.0, -1.0 / kPi)), lat);
  CHECK(std::abs(f.conj_U(0, 0) - cplx(0.0, 1.0 / kPi)) < 1e-15);

  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 25; ++k) {
    cplx z(nd(rng), nd(rng));
    VectorXcd zv(1);
    zv << z;
    VectorXcd gamma = gamma_flow_raw(f, zv);
    CHECK(std::abs(gamma(0) - cplx(2.0 * z.imag() / kPi, 0.0)) < 1e-14);
    CHECK(is_real_point(gamma_flow(f, zv, lat), lat, 1e-12));
  }

  // Translating the fiber keeps the point real and moves it by t mod 1.
  VectorXcd p(1);
  p << cplx(0.25, 0.0);
  VectorXd t(1);
  t << 0.9;
  VectorXcd q = fiber_translate(p, t, lat);
  CHECK(std::abs(q(0) - cplx(1.15, 0.0)) < 1e-15);
  CHECK(is_real_point(q, lat, 1e-12));
  CHECK(std::abs(reduce_mod_lattice(q, lat)(0) - cplx(0.15, 0.0)) < 1e-12);
}

TEST_CASE("fiber translation leaves base coordinates unchanged") {
  GeneralizedLattice lat;
  lat.g = 2;
  lat.n = 2;
  lat.gens = MatrixXcd::Zero(4, 6);  // shape-only use here
  lat.M = MatrixXcd::Identity(4, 4);
  VectorXcd p(4);
  p << cplx(0.1, 0.2), cplx(0.3, -0.4), cplx(1.0, 0.0), cplx(0.0, 1.0);
  VectorXd t(2);
  t << 0.5, -0.25;
  VectorXcd q = fiber_translate(p, t, lat);
  CHECK(q(0) == p(0));
  CHECK(q(1) == p(1));
  CHECK(std::abs(q(2) - (p(2) + 0.5)) < 1e-15);
  CHECK(std::abs(q(3) - (p(3) - 0.25)) < 1e-15);
}

TEST_CASE("lattice validation accepts the rank-1 real lattice, flags rank loss") {
  auto lat = g0_lattice();
  auto rep = lat.validate(1e-8);
  CHECK(rep.all_pass());

  GeneralizedLattice bad;
  bad.g = 1;
  bad.n = 0;
  bad.gens = MatrixXcd::Zero(1, 2);
  bad.gens(0, 0) = 1.0;
  bad.gens(0, 1) = 2.0;  // R-linearly dependent on the first generator
  bad.M = MatrixXcd::Identity(1, 1);
  CHECK_FALSE(bad.validate(1e-8).all_pass());
}

TEST_SUITE_END();
