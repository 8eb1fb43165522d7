#include <doctest.h>

#include <cmath>
#include <random>

#include "harmap/exact.hpp"
#include "harmap/thetamap.hpp"
#include "harmap/verify.hpp"
#include "support/fixtures.hpp"

using namespace harmap;

TEST_SUITE_BEGIN("verify");

namespace {

const CheckResult& find_check(const ValidationReport& r,
                              const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  REQUIRE_MESSAGE(false, "missing check ", name);
  static CheckResult none;
  return none;
}

MatrixField plane_field(const ExactEngine& e) {
  return [&e](cplx w) {
    VectorXcd z(1);
    z(0) = w;
    return grassmannian_map(e, z);
  };
}

MatrixField unitary_field(const ExactEngine& e) {
  return [&e](cplx w) {
    VectorXcd z(1);
    z(0) = w;
    return pu_map(e, z);
  };
}

MatrixXcd line_proj(const VectorXcd& v) {
  return MatrixXcd((v * v.adjoint()) / v.squaredNorm());
}

// phase-only unitary field diag(e^{i th}, e^{-i th})
MatrixField phase_field(double (*th)(double, double)) {
  return [th](cplx w) {
    MatrixXcd m = MatrixXcd::Zero(2, 2);
    cplx p = std::exp(kI * th(w.real(), w.imag()));
    m(0, 0) = p;
    m(1, 1) = std::conj(p);
    return m;
  };
}

std::vector<cplx> grid_nodes() {
  return {cplx(0.3, 0.2), cplx(-0.4, 0.5), cplx(0.1, -0.6), cplx(0.7, 0.7),
          cplx(-0.2, -0.3)};
}

std::vector<double> ladder() { return {4e-3, 2e-3, 1e-3}; }

struct FlowSetup {
  SpectralData data;
  std::vector<Differential> diffs;
  PeriodData pd;
  FlowSpec flow;
};

FlowSetup flow_setup(SpectralData data) {
  FlowSetup s{std::move(data), {}, {}, {}};
  s.diffs = marked_differentials(s.data);
  s.pd = period_lattice(s.data.curve, s.diffs);
  s.flow = FlowSpec::from_directions(
      direction_vectors(s.data, s.diffs, s.pd), s.pd.lattice);
  return s;
}

}  // namespace

TEST_CASE("loop coefficients pass the structure checks on clean engines") {
  for (auto data : {fixtures::square_map(), fixtures::cube_map(),
                    fixtures::blaschke_square()}) {
    auto rep = loop_structure_check(make_exact_engine(data));
    CHECK_MESSAGE(rep.all_pass(), "grassmannian engine failed");
    CHECK(rep.checks.size() == 5);
  }
  auto pu = loop_structure_check(make_exact_engine(fixtures::blaschke_pair()));
  CHECK_MESSAGE(pu.all_pass(), "unitary engine failed");
  CHECK(pu.checks.size() == 4);

  auto bad = make_exact_engine(fixtures::square_map());
  bad.A[0][0](1, 0) += 1e-3;
  auto rep = loop_structure_check(bad);
  CHECK_FALSE(rep.all_pass());
  const auto& c = find_check(rep, "constant block upper");
  CHECK_FALSE(c.pass);
  CHECK(c.detail.find("(1,0)") != std::string::npos);
}

TEST_CASE("commutator residual ladder separates harmonic from non-harmonic") {
  auto nodes = grid_nodes();

  // constant field: zero at every level, no slope estimate
  MatrixXcd c0 = MatrixXcd::Zero(2, 2);
  c0(0, 0) = 1.0;
  auto flat = harmonicity_residual([&](cplx) { return c0; }, nodes, ladder(),
                                   1e-12);
  CHECK(flat.pass);
  CHECK_FALSE(flat.has_slope);
  CHECK(flat.sup.back() == 0.0);

  // the degenerate plane fixture stays at the rounding floor
  auto eng = make_exact_engine(fixtures::square_map());
  auto deg = harmonicity_residual(plane_field(eng), nodes, ladder(), 1e-6);
  CHECK(deg.pass);

  // holomorphic line: genuine second-order decay
  auto hol = harmonicity_residual(
      [](cplx w) {
        VectorXcd v(2);
        v << 1.0, w;
        return line_proj(v);
      },
      nodes, ladder(), 1e-4);
  CHECK(hol.pass);
  CHECK(hol.has_slope);
  CHECK(hol.slope == doctest::Approx(2.0).epsilon(0.15));

  // modulated phase: not harmonic, the residual plateaus
  auto bad = harmonicity_residual(
      [](cplx w) {
        double x = w.real(), y = w.imag();
        VectorXcd v(2);
        v << 1.0, std::exp(kI * (4.0 * y + 1.1 * std::sin(2.0 * x)));
        return line_proj(v);
      },
      nodes, ladder(), 1e-6);
  CHECK_FALSE(bad.pass);
  CHECK(bad.sup.back() > 1e-2);
  CHECK(bad.slope < 1.0);

  CHECK_THROWS_AS(
      harmonicity_residual([&](cplx) { return c0; }, {cplx(0, 0), cplx(1, 0)},
                           ladder(), 1e-6),
      config_error);
  CHECK_THROWS_AS(harmonicity_residual([&](cplx) { return c0; }, nodes, {},
                                       1e-6),
                  config_error);
}

TEST_CASE("group defect vanishes for flat families and flags curvature") {
  auto nodes = grid_nodes();

  // commuting generators give constant connection fields, so the defect sits
  // at the rounding floor for the exact unitary engine
  auto eng = make_exact_engine(fixtures::blaschke_pair());
  auto rep = group_harmonicity_residual(unitary_field(eng), nodes, ladder(),
                                        1e-6);
  CHECK(rep.pass);

  // harmonic phase: defect decays at second order
  auto harm = group_harmonicity_residual(
      phase_field([](double x, double y) { return std::sin(x) * std::sinh(y); }),
      nodes, ladder(), 1e-4);
  CHECK(harm.pass);
  CHECK(harm.slope == doctest::Approx(2.0).epsilon(0.25));

  // non-harmonic phase: plateau at |laplacian| / 2 * |diag(1,-1)|
  auto bad = group_harmonicity_residual(
      phase_field([](double x, double y) { return x * x + y * y; }), nodes,
      ladder(), 1e-6);
  CHECK_FALSE(bad.pass);
  CHECK(bad.sup.back() > 1.0);
  CHECK(bad.slope < 1.0);
}

TEST_CASE("conformality values detect the degenerate direction") {
  auto hol = conformality_value(
      [](cplx w) {
        VectorXcd v(2);
        v << 1.0, w;
        return line_proj(v);
      },
      cplx(0.3, 0.2), 2e-3);
  CHECK(std::abs(hol) <= 1e-10);

  auto sq = make_exact_engine(fixtures::square_map());
  auto v0 = conformality_value(plane_field(sq), cplx(0.1, 0.4), 2e-3);
  CHECK(std::abs(v0 + 2.0) <= 1e-6);

  auto cu = make_exact_engine(fixtures::cube_map());
  auto v1 = conformality_value(plane_field(cu), cplx(0.1, 0.4), 2e-3);
  CHECK(std::abs(v1) <= 1e-8);
}

TEST_CASE("translation directions split into forced and generic") {
  auto g0 = flow_setup(fixtures::square_map());
  auto s0 = equivariance_directions(g0.flow, g0.pd.g);
  CHECK(s0.total);
  CHECK(s0.kernel.size() == 2);

  // both real translations of the degenerate fixture act by conjugation
  auto eng = make_exact_engine(fixtures::square_map());
  auto fx = equivariance_fit(plane_field(eng), cplx(0.4, 0.0), grid_nodes());
  CHECK(fx.defect <= 1e-8);
  auto fy = equivariance_fit(plane_field(eng), cplx(0.0, 0.3), grid_nodes());
  CHECK(fy.defect <= 1e-8);

  auto g1 = flow_setup(fixtures::genus_one());
  auto s1 = equivariance_directions(g1.flow, g1.pd.g);
  CHECK_FALSE(s1.total);
  REQUIRE(s1.kernel.size() == 1);
  CHECK(s1.singulars(1) <= 1e-6 * s1.singulars(0));

  // the forced direction conjugates the theta field
  auto te = make_theta_engine(fixtures::genus_one());
  const VectorXd& v = s1.kernel[0];
  auto tf = [&te](cplx w) {
    VectorXcd z(1);
    z(0) = w;
    return theta_projection(te, z);
  };
  auto fit = equivariance_fit(tf, 0.5 * cplx(v(0), v(1)), grid_nodes());
  CHECK(fit.defect <= 1e-6);

  auto g2 = flow_setup(fixtures::genus_two());
  auto s2 = equivariance_directions(g2.flow, g2.pd.g);
  CHECK(s2.kernel.empty());
  CHECK(s2.singulars(1) >= 1e-3 * s2.singulars(0));
}

TEST_CASE("fitted isometries align matching fields and expose mismatches") {
  auto eng = make_exact_engine(fixtures::square_map());
  auto te = make_theta_engine(fixtures::square_map());

  std::vector<MatrixXcd> ex, th, detuned;
  ThetaMapEngine off = te;
  off.scales(1) = 0.5;
  for (cplx w : grid_nodes()) {
    VectorXcd z(1);
    z(0) = w;
    ex.push_back(grassmannian_map(eng, z));
    th.push_back(theta_projection(te, z));
    detuned.push_back(theta_projection(off, z));
  }

  auto self = isometry_check(ex, ex, 1);
  CHECK(self.fit.defect <= 1e-12);
  CHECK(self.max_fs <= 1e-7);

  auto cross = isometry_check(th, ex, 1);
  CHECK(cross.max_fs <= 1e-6);

  auto bad = isometry_check(detuned, ex, 1);
  CHECK(bad.max_fs >= 0.05);
}

TEST_CASE("algebraic classification tags the model fixtures") {
  auto g0 = flow_setup(fixtures::square_map());
  CHECK(classify_algebraic(g0.data, g0.pd, g0.flow).tag == "A");

  auto g1 = flow_setup(fixtures::genus_one());
  auto t1 = classify_algebraic(g1.data, g1.pd, g1.flow);
  CHECK(t1.tag == "B");
  CHECK(t1.evidence.find("hyperelliptic") != std::string::npos);

  auto g2 = flow_setup(fixtures::genus_two());
  CHECK(classify_algebraic(g2.data, g2.pd, g2.flow, 50).tag == "none");

  CHECK(rational_relation(0.5, 50).q == 2);
  CHECK(rational_relation(-2.0 / 7.0, 50).q == 7);
  CHECK(rational_relation(1.0 / std::sqrt(2.0), 50).q == 0);
}

TEST_CASE("periodicity search recovers the lattice translations") {
  auto g0 = flow_setup(fixtures::square_map());
  auto rep = periodicity_search(g0.flow, g0.pd.lattice);
  REQUIRE(rep.degenerate.size() == 1);
  CHECK(std::abs(std::abs(rep.degenerate[0](0)) - 1.0) <= 1e-9);
  bool half_pi = false, full_pi = false;
  for (const auto& p : rep.periods) {
    CHECK(std::abs(p.x) <= 1e-8);
    if (std::abs(p.y - kPi / 2) <= 1e-6) half_pi = true;
    if (std::abs(p.y - kPi) <= 1e-6) full_pi = true;
  }
  CHECK(half_pi);
  CHECK(full_pi);
  CHECK_FALSE(rep.torus);

  auto g1 = flow_setup(fixtures::genus_one());
  auto rep1 = periodicity_search(g1.flow, g1.pd.lattice);
  CHECK(rep1.periods.size() >= 2);
  CHECK(rep1.torus);

  // breaking the reality pairing destroys the periods
  FlowSpec skew = g1.flow;
  skew.U *= 1.234;
  auto none = periodicity_search(skew, g1.pd.lattice);
  CHECK(none.periods.empty());

  auto g2k2 = flow_setup(fixtures::blaschke_square());
  CHECK_THROWS_AS(periodicity_search(g2k2.flow, g2k2.pd.lattice),
                  config_error);
}

TEST_CASE("component scales calibrate to the unit ratio") {
  auto te = make_theta_engine(fixtures::square_map());
  std::vector<VectorXcd> sample;
  for (cplx w : grid_nodes()) {
    VectorXcd z(1);
    z(0) = w;
    sample.push_back(z);
  }
  auto cal = calibrate_constants(te, sample);
  CHECK(std::abs(cal.scales(1) - 1.0) <= 1e-6);
  CHECK(cal.curve.size() == 17);

  VectorXd pert = cal.scales;
  pert(1) *= 1.5;
  double raised = calibration_objective(te, pert, sample, 1e-2);
  CHECK(raised >= 0.1);
  CHECK(raised >= 10.0 * cal.residual);
}

TEST_SUITE_END();
