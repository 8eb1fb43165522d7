#include <doctest.h>

#include <cmath>

#include "harmap/curve.hpp"
#include "harmap/theta.hpp"

using namespace harmap;

TEST_SUITE_BEGIN("curve_hyper");

namespace {

SpectralCurve sample_g1() {
  return SpectralCurve::make_hyperelliptic({0.0, 4.0, 0.25});
}

SpectralCurve genus1_even() {
  return SpectralCurve::make_hyperelliptic({0.5, 2.0, -0.4, -2.5});
}

SpectralCurve genus2() {
  return SpectralCurve::make_hyperelliptic({0.0, 0.5, 2.0, -0.25, -4.0});
}

// marked pair over lambda = 1 on the sample genus-one curve: plus pole on the lower
// sheet, minus pole on the upper one
std::vector<Differential> sample_g1_basis(const SpectralCurve& c) {
  return differential_basis(
      c, {{CurvePoint::hyper(1.0, cplx(0.0, -1.5)),
           CurvePoint::hyper(1.0, cplx(0.0, 1.5))}});
}

// distance of z to the genus-1 lattice Z + tau*Z
double dist_mod_elliptic(cplx z, cplx tau) {
  double m = std::round(z.imag() / tau.imag());
  cplx d = z - m * tau;
  d -= std::round(d.real());
  return std::abs(d);
}

// j-invariant from a period ratio, via the validated theta implementation
double j_from_tau(cplx tau) {
  ThetaParams tp{MatrixXcd::Constant(1, 1, tau)};
  VectorXcd zero = VectorXcd::Zero(1);
  VectorXcd half = VectorXcd::Constant(1, 0.5);
  VectorXcd tau_half = VectorXcd::Constant(1, tau / 2.0);
  cplx th3 = riemann_theta(zero, tp);
  cplx th2 = std::exp(kPi * kI * tau / 4.0) * riemann_theta(tau_half, tp);
  cplx lam = std::pow(th2 / th3, 4);
  cplx j = 256.0 * std::pow(lam * lam - lam + 1.0, 3) /
           (lam * lam * std::pow(1.0 - lam, 2));
  return j.real();
}

}  // namespace

TEST_CASE("factories enforce structural sanity") {
  CHECK_THROWS_AS(SpectralCurve::make_hyperelliptic({0.5, 2.0}), config_error);
  CHECK_THROWS_AS(SpectralCurve::make_hyperelliptic({0.5, 0.5, 2.0}),
                  config_error);
}

TEST_CASE("real-structure validation separates good and bad branch sets") {
  CHECK(validate_real_structure(sample_g1()).all_pass());
  CHECK(validate_real_structure(genus1_even()).all_pass());
  CHECK(validate_real_structure(genus2()).all_pass());

  // -2.0 is not the reciprocal partner of -0.4
  auto rep1 = validate_real_structure(
      SpectralCurve::make_hyperelliptic({0.5, 2.0, -0.4, -2.0}));
  bool closure_failed = false;
  for (const auto& chk : rep1.checks)
    if (chk.name == "branch_closure" && !chk.pass) closure_failed = true;
  CHECK(closure_failed);

  // branch points on the unit circle are forbidden
  auto rep2 = validate_real_structure(
      SpectralCurve::make_hyperelliptic({0.5, 2.0, kI, -kI}));
  bool circle_failed = false;
  for (const auto& chk : rep2.checks)
    if (chk.name == "no_unit_circle_branch" && !chk.pass) circle_failed = true;
  CHECK(circle_failed);

  // odd count without 0 cannot close up through infinity
  auto rep3 = validate_real_structure(
      SpectralCurve::make_hyperelliptic({0.5, 2.0, 3.0}));
  CHECK_FALSE(rep3.all_pass());
}

TEST_CASE("involution fixes the unit-circle fiber and squares to identity") {
  SpectralCurve c = sample_g1();
  CHECK(c.genus == 1);
  CHECK(c.infinity_is_branch());
  CHECK(std::abs(c.rho_fiber_sign - cplx(-1.0)) < 1e-12);

  auto fib = c.fiber(1.0);
  REQUIRE(fib.size() == 2);
  CHECK(std::abs(fib[0].y - cplx(0.0, -1.5)) < 1e-12);
  CHECK(std::abs(fib[1].y - cplx(0.0, 1.5)) < 1e-12);
  for (const auto& p : fib) CHECK(c.rho(p).close_to(p, 1e-10));

  // 0 and infinity are exchanged
  CHECK(c.rho(CurvePoint::hyper(0.0, 0.0)).at_infinity);
  CHECK(c.rho(CurvePoint::hyper_infinity(0)).close_to(
      CurvePoint::hyper(0.0, 0.0), 1e-12));

  CurvePoint q = CurvePoint::hyper(
      cplx(0.7, 0.4), std::sqrt(c.branch_product(cplx(0.7, 0.4))));
  CHECK(c.rho(c.rho(q)).close_to(q, 1e-10));
  CHECK(c.contains(c.rho(q), 1e-10));
}

TEST_CASE("residues of the marked pair are plus and minus one") {
  SpectralCurve c = sample_g1();
  auto diffs = sample_g1_basis(c);
  REQUIRE(diffs.size() == 2);
  const auto& eta = diffs[1];
  CHECK(std::abs(numeric_residue(c, eta, eta.pole_plus) - cplx(1.0)) < 1e-9);
  CHECK(std::abs(numeric_residue(c, eta, eta.pole_minus) + cplx(1.0)) < 1e-9);

  // a pair with distinct lambda values on the genus-2 curve
  SpectralCurve c2 = genus2();
  CurvePoint p = c2.fiber(1.2)[0], q = c2.fiber(cplx(0.3, 0.9))[1];
  auto eta2 = Differential::third_kind_pair(c2, p, q);
  CHECK(std::abs(numeric_residue(c2, eta2, p) - cplx(1.0)) < 1e-9);
  CHECK(std::abs(numeric_residue(c2, eta2, q) + cplx(1.0)) < 1e-9);

  CHECK_THROWS_AS(
      Differential::third_kind_pair(c2, CurvePoint::hyper(0.0, 0.0), p),
      config_error);
}

TEST_CASE("genus one periods match the independent modular oracle") {
  SpectralCurve c = sample_g1();
  auto diffs = sample_g1_basis(c);
  PeriodData pd = period_lattice(c, diffs);
  CHECK(pd.g == 1);
  CHECK(pd.n == 1);

  cplx tau = pd.tau(0, 0);
  CHECK(std::abs(tau.real()) < 1e-8);
  CHECK(tau.imag() > 0.0);
  // j-invariant pins the curve regardless of the homology basis chosen
  CHECK(j_from_tau(tau) == doctest::Approx(62211.2044444444).epsilon(1e-7));

  // one of the two cycle integrals of dlambda/y has the frozen magnitude
  double m1 = std::abs(pd.a_periods(0, 0)), m2 = std::abs(pd.b_periods(0, 0));
  double ref = 3.1924844442635670;
  CHECK(std::min(std::abs(m1 - ref), std::abs(m2 - ref)) < 1e-9 * ref);

  CHECK(pd.deformation_residual < 1e-8);
  auto rep = pd.validate(Tolerances{});
  for (const auto& chk : rep.checks) {
    INFO(chk.name, ": ", chk.detail);
    CHECK(chk.pass);
  }

  // base coordinates do not leak into the fiber under the involution
  CHECK(std::abs(pd.lattice.M(0, 1)) < 1e-7);
  CHECK(std::abs(pd.lattice.M(0, 0) - cplx(1.0)) < 1e-6);
}

TEST_CASE("even-model genus-1 periods stay real-normalized") {
  SpectralCurve c = genus1_even();
  CHECK(c.genus == 1);
  CHECK_FALSE(c.infinity_is_branch());
  auto diffs = differential_basis(c, {});
  REQUIRE(diffs.size() == 1);
  PeriodData pd = period_lattice(c, diffs);
  cplx tau = pd.tau(0, 0);
  CHECK(std::abs(tau.real()) < 1e-8);
  CHECK(tau.imag() > 0.0);
  CHECK(j_from_tau(tau) == doctest::Approx(1811.3018392542202).epsilon(1e-7));
  CHECK(pd.deformation_residual < 1e-8);
}

TEST_CASE("genus-2 riemann matrix is symmetric with definite imaginary part") {
  SpectralCurve c = genus2();
  CHECK(c.genus == 2);
  auto diffs = differential_basis(c, {});
  REQUIRE(diffs.size() == 2);
  PeriodData pd = period_lattice(c, diffs);
  CHECK((pd.tau - pd.tau.transpose()).cwiseAbs().maxCoeff() < 1e-8);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(pd.tau.imag());
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(pd.deformation_residual < 1e-8);
  auto rep = pd.validate(Tolerances{});
  for (const auto& chk : rep.checks) {
    INFO(chk.name, ": ", chk.detail);
    CHECK(chk.pass);
  }
}

TEST_CASE("half-periods double into the lattice") {
  SpectralCurve c = sample_g1();
  auto diffs = sample_g1_basis(c);
  PeriodData pd = period_lattice(c, diffs);
  CurvePoint w0 = CurvePoint::hyper(0.0, 0.0);

  for (cplx e : {cplx(0.25), cplx(4.0)}) {
    VectorXcd v = abel_map(c, diffs, pd, w0, CurvePoint::hyper(e, 0.0));
    CHECK(lattice_distance(2.0 * v, pd.lattice) < 1e-7);
    CHECK(lattice_distance(v, pd.lattice) > 1e-2);
  }
  // the remaining branch point sits over lambda = infinity
  VectorXcd vinf = abel_map(c, diffs, pd, w0, CurvePoint::hyper_infinity(0));
  CHECK(lattice_distance(2.0 * vinf, pd.lattice) < 1e-7);
}

TEST_CASE("path variants and repeated runs agree modulo the lattice") {
  SpectralCurve c = sample_g1();
  auto diffs = sample_g1_basis(c);
  PeriodData pd = period_lattice(c, diffs);
  CurvePoint p = c.fiber(cplx(0.6, 0.3))[0];
  CurvePoint q = c.fiber(cplx(-1.1, 0.7))[1];

  VectorXcd v0 = abel_map(c, diffs, pd, p, q, 0);
  VectorXcd v0b = abel_map(c, diffs, pd, p, q, 0);
  CHECK((v0 - v0b).norm() < 1e-12);  // deterministic

  VectorXcd v1 = abel_map(c, diffs, pd, p, q, 1);
  CHECK(lattice_distance(v0 - v1, pd.lattice) < 1e-8);

  CHECK_THROWS_AS(
      abel_map(c, diffs, pd, p, CurvePoint::hyper(1.0, cplx(0.0, 1.5))),
      config_error);
}

TEST_CASE("fiber b-components tie to the abel image of the marked pair") {
  SpectralCurve c = sample_g1();
  auto diffs = sample_g1_basis(c);
  PeriodData pd = period_lattice(c, diffs);

  // reciprocity: the fiber entry of the b-generator equals the classical
  // abel integral between the poles, modulo the classical lattice
  cplx fiber_b = pd.lattice.gens(1, 1);
  VectorXcd ab = abel_map_base(c, diffs, pd,
                               CurvePoint::hyper(1.0, cplx(0.0, 1.5)),
                               CurvePoint::hyper(1.0, cplx(0.0, -1.5)));
  CHECK(dist_mod_elliptic(fiber_b - ab(0), pd.tau(0, 0)) < 1e-7);
}

TEST_CASE("circle-fiber images sit in the fixed slice of the base torus") {
  SpectralCurve c = sample_g1();
  auto diffs = sample_g1_basis(c);
  PeriodData pd = period_lattice(c, diffs);
  cplx m00 = pd.lattice.M(0, 0);

  CurvePoint base = CurvePoint::hyper(1.0, cplx(0.0, 1.5));
  for (double phi : {0.7, 2.1, -1.3}) {
    CurvePoint tgt = c.fiber(std::polar(1.0, phi))[0];
    CHECK(c.rho(tgt).close_to(tgt, 1e-8));
    VectorXcd v = abel_map_base(c, diffs, pd, base, tgt);
    cplx defect = v(0) - m00 * std::conj(v(0));
    CHECK(dist_mod_elliptic(defect, pd.tau(0, 0)) < 1e-7);
  }
  // a generic target leaves the fixed slice
  VectorXcd voff =
      abel_map_base(c, diffs, pd, base, c.fiber(cplx(0.45, 0.35))[0]);
  cplx off_defect = voff(0) - m00 * std::conj(voff(0));
  CHECK(dist_mod_elliptic(off_defect, pd.tau(0, 0)) > 1e-3);
}

TEST_CASE("local values at the ramified origin match the series") {
  SpectralCurve c = sample_g1();
  auto diffs = sample_g1_basis(c);
  CurvePoint w0 = CurvePoint::hyper(0.0, 0.0);
  VectorXcd vals = diffs.empty() ? VectorXcd()
                                 : differential_values(c, diffs, w0, 2);
  REQUIRE(vals.size() == 2);
  CHECK(std::abs(vals(0) - cplx(2.0)) < 1e-12);
  CHECK(std::abs(vals(1) - cplx(0.0, 3.0)) < 1e-12);

  // independent check against the parametrized expansion lambda = zeta^2,
  // y = zeta * h(zeta)
  for (cplx zeta : {cplx(1e-4), cplx(0.0, 1e-4)}) {
    cplx lam = zeta * zeta;
    cplx h = std::sqrt((lam - 4.0) * (lam - 0.25));
    if (std::abs(h - cplx(1.0)) > 1.0) h = -h;  // stay near h(0) = +1
    cplx y = zeta * h;
    for (int i = 0; i < 2; ++i) {
      cplx approx = diffs[i].coeff(c, lam, y) * 2.0 * zeta;
      CHECK(std::abs(approx - vals(i)) < 2e-3 * (1.0 + std::abs(vals(i))));
    }
  }

  CHECK_THROWS_AS(differential_values(c, diffs, w0, 1), config_error);
  CHECK_THROWS_AS(
      differential_values(c, diffs, CurvePoint::hyper(0.25, 0.0), 2),
      config_error);
}

TEST_SUITE_END();
