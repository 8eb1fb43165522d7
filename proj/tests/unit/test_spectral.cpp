#include <doctest.h>

#include <cmath>
#include <random>

#include "harmap/genjac.hpp"
#include "support/fixtures.hpp"

using namespace harmap;

TEST_SUITE_BEGIN("spectral");

namespace {

void check_all(const ValidationReport& rep) {
  for (const auto& chk : rep.checks) {
    INFO(chk.name, ": ", chk.detail);
    CHECK(chk.pass);
  }
}

bool passed(const ValidationReport& rep, const std::string& name) {
  for (const auto& chk : rep.checks)
    if (chk.name == name) return chk.pass;
  FAIL("no check named ", name);
  return false;
}

}  // namespace

TEST_CASE("structural errors are config errors") {
  auto c = SpectralCurve::make_rational(Poly{{0.0, 0.0, 1.0}},
                                        Poly::constant(1.0));
  // divisor degree must be genus + n
  CHECK_THROWS_AS(
      make_spectral_data(c, {{CurvePoint::rational(0.0), 2}}, 1,
                         TargetKind::grassmannian, {CurvePoint::rational(0.0)}),
      config_error);
  // designated point is not a zero of lambda
  CHECK_THROWS_AS(
      make_spectral_data(c, {{CurvePoint::rational(0.0), 1}}, 1,
                         TargetKind::grassmannian, {CurvePoint::rational(0.5)}),
      config_error);
  // one designated zero too many for a rank-one plane
  CHECK_THROWS_AS(
      make_spectral_data(c, {{CurvePoint::rational(0.0), 1}}, 1,
                         TargetKind::grassmannian,
                         {CurvePoint::rational(0.0), CurvePoint::rational(0.0)}),
      config_error);
}

TEST_CASE("square map marked data") {
  auto data = fixtures::square_map();
  CHECK(data.n() == 1);
  REQUIRE(data.marked.O.size() == 2);
  CHECK(std::abs(data.marked.O[0].coord - 1.0) < 1e-12);
  CHECK(std::abs(data.marked.O[1].coord + 1.0) < 1e-12);
  REQUIRE(data.marked.P.size() == 1);
  CHECK(data.marked.ram[0] == 2);
  CHECK(data.marked.Q[0].at_infinity);
  CHECK(!data.conformal_direction);
  CHECK(divisor_degree(data.marked.R) == 2);
  REQUIRE(data.marked.D_inf.size() == 1);
  CHECK(data.marked.D_inf[0].point.at_infinity);
  CHECK(data.marked.D_inf[0].mult == 1);
  REQUIRE(data.marked.Phat.size() == 1);
  CHECK(divisor_degree(data.marked.Phat[0]) == 1);
  CHECK(!data.marked.Phat[0][0].point.at_infinity);
}

TEST_CASE("square map validates with constant witness and gram 2I") {
  auto data = fixtures::square_map();
  auto wf = witness_function(data);
  CHECK(wf.constant);
  check_all(validate_spectral(data, Tolerances{}));

  auto full = section_space(data, {});
  REQUIRE(full.dim == 2);
  // canonical basis {1/w, 1}
  CHECK(std::abs(full.basis[0].eval(2.0) - 0.5) < 1e-12);
  CHECK(std::abs(full.basis[1].eval(2.0) - 1.0) < 1e-12);

  auto hf = hermitian_form(data);
  REQUIRE(hf.gram.rows() == 2);
  CHECK((hf.gram - 2.0 * MatrixXcd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("square map periods and flow direction") {
  auto data = fixtures::square_map();
  auto diffs = marked_differentials(data);
  REQUIRE(diffs.size() == 1);
  auto pd = period_lattice(data.curve, diffs);
  check_all(validate_spectral_periods(data, diffs, pd, Tolerances{}));

  auto U = direction_vectors(data, diffs, pd);
  REQUIRE(U.rows() == 1);
  REQUIRE(U.cols() == 1);
  // pole-pair differential takes the value 2 at the zero; the coordinate
  // scaling by 1/(2 pi i) turns that into -i/pi
  CHECK(std::abs(U(0, 0) - cplx(0.0, -1.0 / kPi)) < 1e-10);
}

TEST_CASE("divisor on the marked fiber fails the reality checks") {
  auto data = fixtures::square_map_shifted();
  auto rep = validate_spectral(data, Tolerances{});
  CHECK(!rep.all_pass());
  CHECK(!passed(rep, "divisor avoids marked fibers"));
  CHECK(!passed(rep, "witness positive on unit fiber"));
  CHECK(!passed(rep, "witness equal at marked fiber"));
  CHECK(!passed(rep, "sections span marked fiber"));
  CHECK(passed(rep, "divisor degree"));
  CHECK(passed(rep, "witness involution"));

  auto wf = witness_function(data);
  REQUIRE(!wf.constant);
  // normalized witness is -(w-1)^2/w, i.e. 2 - 2 cos(phi) on the circle
  cplx on_circle =
      wf.eval(data.curve, CurvePoint::rational(std::exp(kI * 0.3)));
  CHECK(std::abs(on_circle - (2.0 - 2.0 * std::cos(0.3))) < 1e-10);
  CHECK(std::abs(wf.eval(data.curve, CurvePoint::rational(-1.0)) - 4.0) <
        1e-10);

  CHECK_THROWS_AS(hermitian_form(data), check_failure);
}

TEST_CASE("cube map has a conformal direction and dimension split 1/2") {
  auto data = fixtures::cube_map();
  CHECK(data.n() == 2);
  CHECK(data.conformal_direction);
  CHECK(data.marked.ram[0] == 3);
  REQUIRE(data.marked.O.size() == 3);
  CHECK(std::abs(data.marked.O[1].coord - std::exp(-2.0 * kPi * kI / 3.0)) <
        1e-10);
  CHECK(std::abs(data.marked.O[2].coord - std::exp(2.0 * kPi * kI / 3.0)) <
        1e-10);
  check_all(validate_spectral(data, Tolerances{}));

  auto diffs = marked_differentials(data);
  REQUIRE(diffs.size() == 2);
  auto pd = period_lattice(data.curve, diffs);
  check_all(validate_spectral_periods(data, diffs, pd, Tolerances{}));

  auto full = section_space(data, {});
  auto V = section_space(data, data.marked.D_inf);
  Divisor pdiv{{data.marked.P[0], 1}};
  auto Vp = section_space(data, pdiv);
  CHECK(full.dim == 3);
  CHECK(V.dim == 1);
  CHECK(Vp.dim == 2);

  auto hf = hermitian_form(data);
  CHECK((hf.gram - 3.0 * MatrixXcd::Identity(3, 3)).norm() < 1e-10);
}

TEST_CASE("blaschke flow: second fiber, gram, directions, involution sign") {
  const double a = 0.6;
  auto data = fixtures::blaschke_pair(a);
  CHECK(data.target == TargetKind::projective_unitary);
  CHECK(data.n() == 1);
  REQUIRE(data.marked.S.size() == 2);
  CHECK(std::abs(data.marked.S[0].coord - cplx(0.0, -1.0)) < 1e-10);
  CHECK(std::abs(data.marked.S[1].coord - cplx(0.0, 1.0)) < 1e-10);
  CHECK(data.marked.ram[0] == 1);
  check_all(validate_spectral(data, Tolerances{}));

  auto hf = hermitian_form(data);
  CHECK((hf.gram - 2.0 * MatrixXcd::Identity(2, 2)).norm() < 1e-12);

  auto diffs = marked_differentials(data);
  REQUIRE(diffs.size() == 2);
  auto pd = period_lattice(data.curve, diffs);
  check_all(validate_spectral_periods(data, diffs, pd, Tolerances{}));

  auto U = direction_vectors(data, diffs, pd);
  REQUIRE(U.rows() == 2);
  REQUIRE(U.cols() == 1);
  cplx u_first = (1.0 + a * a) / (2.0 * kPi * kI * a);
  cplx u_second = (1.0 - a * a) / (2.0 * kPi * a);
  CHECK(std::abs(U(0, 0) - u_first) < 1e-9);
  CHECK(std::abs(U(1, 0) - u_second) < 1e-9);

  // the involution flips the sign of both pole-pair coordinates
  CHECK((pd.lattice.M + MatrixXcd::Identity(2, 2)).norm() < 1e-6);
}

TEST_CASE("fiber identification pairing is phase blind") {
  auto data = fixtures::square_map();
  auto basis = section_space(data, {}).basis;

  VectorXcd plain(2);
  plain << 1.0, 1.0;
  MatrixXcd H0 = htilde_form(data, basis, plain);

  VectorXcd spun(2);
  spun << std::exp(kI * 1.234), std::exp(kI * (-2.817));
  CHECK((htilde_form(data, basis, spun) - H0).norm() < 1e-14);

  // equal moduli reproduce the witness gram up to the overall 1/C^2
  auto hf = hermitian_form(data);
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> mod(0.3, 3.0), ph(-kPi, kPi);
  for (int t = 0; t < 50; ++t) {
    double C = mod(rng);
    VectorXcd s(2);
    s << C * std::exp(kI * ph(rng)), C * std::exp(kI * ph(rng));
    MatrixXcd H = htilde_form(data, basis, s);
    CHECK((H - hf.gram / (C * C)).norm() < 1e-10);
  }

  // distinct moduli break the proportionality: the off-diagonal picks up
  // the difference of the inverse squares
  VectorXcd bad(2);
  bad << 1.0, 2.0;
  MatrixXcd Hb = htilde_form(data, basis, bad);
  CHECK(std::abs(Hb(0, 1) - cplx(0.75)) < 1e-12);
}

TEST_CASE("genus one flow data validates end to end") {
  auto data = fixtures::genus_one();
  CHECK(data.curve.genus == 1);
  CHECK(data.n() == 1);
  REQUIRE(data.marked.O.size() == 2);
  CHECK(data.marked.O[0].close_to(CurvePoint::hyper(1.0, cplx(0.0, -1.5)),
                                  1e-9));
  CHECK(data.marked.O[1].close_to(CurvePoint::hyper(1.0, cplx(0.0, 1.5)),
                                  1e-9));
  CHECK(data.marked.ram[0] == 2);
  CHECK(data.marked.Q[0].at_infinity);

  auto wf = witness_function(data);
  CHECK(wf.constant);
  check_all(validate_spectral(data, Tolerances{}));

  auto diffs = marked_differentials(data);
  REQUIRE(diffs.size() == 2);
  auto pd = period_lattice(data.curve, diffs);
  check_all(pd.validate(Tolerances{}));
  check_all(validate_spectral_periods(data, diffs, pd, Tolerances{}));

  auto V = section_space_periods(data, data.marked.D_inf, diffs, pd);
  Divisor pdiv{{data.marked.P[0], 1}};
  auto Vp = section_space_periods(data, pdiv, diffs, pd);
  auto full = section_space_periods(data, {}, diffs, pd);
  CHECK(V.dim == 1);
  CHECK(Vp.dim == 1);
  CHECK(full.dim == 2);

  auto U = direction_vectors(data, diffs, pd);
  REQUIRE(U.rows() == 2);
  CHECK(std::isfinite(std::abs(U(0, 0))));
  CHECK(std::isfinite(std::abs(U(1, 0))));
  CHECK(U.col(0).norm() > 1e-6);

  auto hf = hermitian_form(data);
  CHECK(hf.exact);
  CHECK((hf.gram - MatrixXcd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("genus two data: nondegenerate fiber and dimension split") {
  auto data = fixtures::genus_two();
  CHECK(data.curve.genus == 2);
  CHECK(data.n() == 1);
  check_all(validate_spectral(data, Tolerances{}));

  auto diffs = marked_differentials(data);
  REQUIRE(diffs.size() == 3);
  auto pd = period_lattice(data.curve, diffs);
  check_all(validate_spectral_periods(data, diffs, pd, Tolerances{}));

  CHECK(section_space_periods(data, data.marked.D_inf, diffs, pd).dim == 1);
  Divisor pdiv{{data.marked.P[0], 1}};
  CHECK(section_space_periods(data, pdiv, diffs, pd).dim == 1);
  CHECK(section_space_periods(data, {}, diffs, pd).dim == 2);

  auto U = direction_vectors(data, diffs, pd);
  REQUIRE(U.rows() == 3);
  REQUIRE(U.cols() == 1);
  CHECK(U.col(0).norm() > 1e-6);
}

TEST_CASE("rank-two planes: fiber order, gram pattern, orthogonal split") {
  const double b = 0.5;
  auto data = fixtures::blaschke_square(b);
  CHECK(data.n() == 3);
  CHECK(data.k == 2);
  REQUIRE(data.marked.O.size() == 4);
  CHECK(std::abs(data.marked.O[0].coord - 1.0) < 1e-10);
  CHECK(std::abs(data.marked.O[1].coord - cplx(0.0, -1.0)) < 1e-10);
  CHECK(std::abs(data.marked.O[2].coord - cplx(0.0, 1.0)) < 1e-10);
  CHECK(std::abs(data.marked.O[3].coord + 1.0) < 1e-10);
  CHECK(data.marked.ram == std::vector<int>{2, 2});
  CHECK(!data.conformal_direction);

  check_all(validate_real_structure(data.curve));
  check_all(validate_spectral(data, Tolerances{}));

  auto hf = hermitian_form(data);
  REQUIRE(hf.gram.rows() == 4);
  const double A = 1088.0 / 225.0, B = 512.0 / 225.0;
  MatrixXcd want(4, 4);
  want << A, 0, B, 0,
          0, A, 0, B,
          B, 0, A, 0,
          0, B, 0, A;
  CHECK((hf.gram - want).norm() < 1e-10);

  auto V = section_space(data, data.marked.D_inf);
  Divisor pdiv;
  for (const auto& p : data.marked.P) pdiv.push_back({p, 1});
  auto Vp = section_space(data, pdiv);
  REQUIRE(V.dim == 2);
  REQUIRE(Vp.dim == 2);
  for (const auto& s : V.basis) {
    CHECK(std::abs(s.num.eval(2.0)) < 1e-8);
    CHECK(std::abs(s.num.eval(-2.0)) < 1e-8);
  }
  for (const auto& s : Vp.basis) {
    CHECK(std::abs(s.num.eval(b)) < 1e-8);
    CHECK(std::abs(s.num.eval(-b)) < 1e-8);
  }

  // the plane block and its complement are orthogonal in the witness pairing
  std::vector<RationalFn> joined = V.basis;
  joined.insert(joined.end(), Vp.basis.begin(), Vp.basis.end());
  MatrixXcd Gj = gram_matrix(data, hf.witness, joined);
  CHECK(Gj.block(0, 2, 2, 2).norm() < 1e-10);

  auto diffs = marked_differentials(data);
  REQUIRE(diffs.size() == 3);
  auto pd = period_lattice(data.curve, diffs);
  auto U = direction_vectors(data, diffs, pd);
  REQUIRE(U.cols() == 2);
  CHECK(U.col(0).norm() > 1e-6);
  CHECK(U.col(1).norm() > 1e-6);
}

TEST_SUITE_END();
