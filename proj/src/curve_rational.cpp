#include <algorithm>
#include <cmath>

#include "harmap/curve_detail.hpp"

namespace harmap {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

cplx principal_root(cplx z, int r) {
  if (r == 1) return z;
  return std::exp(std::log(z) / static_cast<double>(r));
}

// Deterministic sample coordinates staying away from the given special
// values and from the unit-circle neighborhood of 0.
std::vector<cplx> sample_ring(const std::vector<cplx>& avoid, int want) {
  static const double radii[] = {0.73, 1.37, 0.52, 1.91, 1.13, 0.89};
  std::vector<cplx> out;
  for (double r : radii) {
    for (int k = 0; k < 12 && static_cast<int>(out.size()) < want; ++k) {
      cplx z = std::polar(r, kTwoPi * (k + 0.3) / 12.0);
      bool ok = std::abs(z) > 0.1;
      for (cplx a : avoid)
        if (std::abs(z - a) < 0.2) ok = false;
      if (ok) out.push_back(z);
    }
    if (static_cast<int>(out.size()) >= want) break;
  }
  return out;
}

}  // namespace

bool CurvePoint::close_to(const CurvePoint& q, double tol) const {
  if (at_infinity != q.at_infinity) return false;
  if (at_infinity) return inf_sign == q.inf_sign;
  return std::abs(coord - q.coord) <= tol && std::abs(y - q.y) <= tol * 10.0;
}

SpectralCurve SpectralCurve::make_rational(Poly num, Poly den) {
  if (num.is_zero() || den.is_zero())
    throw config_error("rational curve: lambda numerator/denominator is zero");
  if (std::max(num.degree(), den.degree()) < 1)
    throw config_error("rational curve: lambda map is constant");
  auto nr = num.roots();
  auto dr = den.roots();
  for (cplx a : nr)
    for (cplx b : dr)
      if (std::abs(a - b) < 1e-9)
        throw config_error("rational curve: lambda polynomials share a root");
  SpectralCurve c;
  c.kind = CurveKind::rational;
  c.genus = 0;
  c.lambda = RationalFn(std::move(num), std::move(den));
  return c;
}

SpectralCurve SpectralCurve::make_hyperelliptic(std::vector<cplx> branch) {
  if (branch.size() < 3)
    throw config_error("hyperelliptic curve: need at least 3 branch points");
  double scale = 1.0;
  for (cplx e : branch) scale = std::max(scale, std::abs(e));
  for (size_t i = 0; i < branch.size(); ++i)
    for (size_t j = i + 1; j < branch.size(); ++j)
      if (std::abs(branch[i] - branch[j]) < 1e-10 * scale)
        throw config_error("hyperelliptic curve: repeated branch point");
  std::sort(branch.begin(), branch.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  SpectralCurve c;
  c.kind = CurveKind::hyperelliptic;
  c.branch_points = std::move(branch);
  int m = static_cast<int>(c.branch_points.size());
  c.genus = (m % 2 == 0) ? (m - 2) / 2 : (m - 1) / 2;

  // Fiber sign of the lift of lambda -> 1/conj(lambda): the square is pinned
  // by the curve equation, the sign by asking fiber points over |lambda| = 1
  // to be fixed.
  cplx prod_nonzero = 1.0;
  for (cplx e : c.branch_points)
    if (std::abs(e) > 0.0) prod_nonzero *= e;
  cplx s0 = std::sqrt(prod_nonzero);
  double best = 1e300;
  for (cplx s : {s0, -s0}) {
    double worst = 0.0;
    for (cplx lam : {cplx(1.0, 0.0), std::polar(1.0, 0.9),
                     std::polar(1.0, -2.2)}) {
      cplx y0 = std::sqrt(c.branch_product(lam));
      if (std::abs(y0) < 1e-12) continue;
      cplx image = s * std::conj(y0) /
                   std::pow(std::conj(lam), c.genus + 1);
      worst = std::max(worst, std::abs(image - y0) / std::abs(y0));
    }
    if (worst < best) {
      best = worst;
      c.rho_fiber_sign = s;
    }
  }
  return c;
}

cplx SpectralCurve::branch_product(cplx lam) const {
  cplx p = 1.0;
  for (cplx e : branch_points) p *= lam - e;
  return p;
}

cplx SpectralCurve::lambda_at(const CurvePoint& p) const {
  if (p.at_infinity)
    throw config_error("lambda_at: point over lambda = infinity");
  if (kind == CurveKind::rational) return lambda.eval(p.coord);
  return p.coord;
}

CurvePoint SpectralCurve::rho(const CurvePoint& p) const {
  if (kind == CurveKind::rational) {
    if (p.at_infinity) return CurvePoint::rational(0.0);
    if (std::abs(p.coord) < 1e-300) return CurvePoint::rational_infinity();
    return CurvePoint::rational(1.0 / std::conj(p.coord));
  }
  cplx s = rho_fiber_sign;
  if (p.at_infinity) {
    // image lies over lambda = 0
    if (infinity_is_branch()) return CurvePoint::hyper(0.0, 0.0);
    cplx y0 = std::sqrt(branch_product(0.0));
    // match the infinity tag: which preimage of the tag comes back here
    for (cplx y : {y0, -y0}) {
      CurvePoint cand = CurvePoint::hyper(0.0, y);
      if (rho(cand).inf_sign == p.inf_sign) return cand;
    }
    return CurvePoint::hyper(0.0, y0);
  }
  if (std::abs(p.coord) < 1e-300) {
    if (infinity_is_branch()) return CurvePoint::hyper_infinity(0);
    // epsilon tag of the image: limit of y' * s_chart^{g+1} with s_chart =
    // conj(lambda) -> 0, which is s * conj(y(0)) over the tracked root of
    // prod(1 - e s_chart) -> 1.
    cplx eps = s * std::conj(p.y);
    return CurvePoint::hyper_infinity(std::abs(eps - 1.0) <
                                              std::abs(eps + 1.0)
                                          ? 1
                                          : -1);
  }
  cplx lam2 = 1.0 / std::conj(p.coord);
  cplx y2 = s * std::conj(p.y) / std::pow(std::conj(p.coord), genus + 1);
  return CurvePoint::hyper(lam2, y2);
}

std::vector<CurvePoint> SpectralCurve::fiber(cplx lambda_value) const {
  std::vector<CurvePoint> out;
  if (kind == CurveKind::rational) {
    Poly shifted = lambda.num - lambda_value * lambda.den;
    for (cplx w : shifted.roots()) out.push_back(CurvePoint::rational(w));
    return out;
  }
  cplx f = branch_product(lambda_value);
  if (std::abs(f) < 1e-20) {
    out.push_back(CurvePoint::hyper(lambda_value, 0.0));
    return out;
  }
  cplx y = std::sqrt(f);
  CurvePoint p1 = CurvePoint::hyper(lambda_value, y);
  CurvePoint p2 = CurvePoint::hyper(lambda_value, -y);
  auto less = [](const CurvePoint& a, const CurvePoint& b) {
    if (a.y.real() != b.y.real()) return a.y.real() < b.y.real();
    return a.y.imag() < b.y.imag();
  };
  if (less(p1, p2)) {
    out.push_back(p1);
    out.push_back(p2);
  } else {
    out.push_back(p2);
    out.push_back(p1);
  }
  return out;
}

bool SpectralCurve::contains(const CurvePoint& p, double tol) const {
  if (kind == CurveKind::rational) return true;
  if (p.at_infinity) return true;
  cplx f = branch_product(p.coord);
  return std::abs(p.y * p.y - f) <= tol * (1.0 + std::abs(f));
}

ValidationReport validate_real_structure(const SpectralCurve& c) {
  ValidationReport rep;
  if (c.kind == CurveKind::rational) {
    auto den_roots = c.lambda.den.roots();
    auto samples = sample_ring(den_roots, 24);
    double worst = 0.0;
    for (cplx w : samples) {
      cplx lhs = c.lambda.eval(1.0 / std::conj(w)) *
                 std::conj(c.lambda.eval(w));
      worst = std::max(worst, std::abs(lhs - 1.0));
    }
    rep.add("lambda_reciprocal", worst <= 1e-8,
            "lambda(1/conj(w)) * conj(lambda(w)) = 1, error " +
                std::to_string(worst));

    int deg = std::max(c.lambda.num.degree(), c.lambda.den.degree());
    bool unbranched = true;
    double min_sep = 1e300;
    for (int k = 0; k < 64; ++k) {
      cplx val = std::polar(1.0, kTwoPi * (k + 0.21) / 64.0);
      auto fib = c.fiber(val);
      if (static_cast<int>(fib.size()) != deg) unbranched = false;
      for (size_t i = 0; i < fib.size(); ++i)
        for (size_t j = i + 1; j < fib.size(); ++j)
          min_sep = std::min(min_sep,
                             std::abs(fib[i].coord - fib[j].coord));
    }
    if (min_sep < 1e-6) unbranched = false;
    rep.add("unbranched_unit_circle", unbranched,
            "fiber over |lambda| = 1 has full size, min separation " +
                std::to_string(min_sep));

    double fix = 0.0;
    for (int k = 0; k < 8; ++k) {
      cplx val = std::polar(1.0, kTwoPi * (k + 0.37) / 8.0);
      for (const auto& p : c.fiber(val))
        fix = std::max(fix, std::abs(std::abs(p.coord) - 1.0));
    }
    rep.add("rho_fixes_unit_fiber", fix <= 1e-8,
            "fiber over the unit circle sits on |w| = 1, error " +
                std::to_string(fix));
    return rep;
  }

  // hyperelliptic
  bool has_zero = false;
  double scale = 1.0;
  for (cplx e : c.branch_points) {
    if (std::abs(e) < 1e-12) has_zero = true;
    scale = std::max(scale, std::abs(e));
  }
  bool odd = c.branch_points.size() % 2 == 1;
  bool closed = (has_zero == odd);
  std::string witness;
  for (cplx e : c.branch_points) {
    if (std::abs(e) < 1e-12) continue;
    cplx want = 1.0 / std::conj(e);
    bool found = false;
    for (cplx e2 : c.branch_points)
      if (std::abs(e2 - want) <= 1e-8 * (1.0 + std::abs(want))) found = true;
    if (!found) {
      closed = false;
      witness = " missing partner of " + std::to_string(e.real()) + "+" +
                std::to_string(e.imag()) + "i";
    }
  }
  rep.add("branch_closure", closed,
          "branch multiset closed under e -> 1/conj(e)" + witness);

  double circ = 1e300;
  cplx nearest = 0.0;
  for (cplx e : c.branch_points)
    if (std::abs(std::abs(e) - 1.0) < circ) {
      circ = std::abs(std::abs(e) - 1.0);
      nearest = e;
    }
  rep.add("no_unit_circle_branch", circ > 1e-8,
          "branch point " + std::to_string(nearest.real()) + "+" +
              std::to_string(nearest.imag()) + "i has modulus within " +
              std::to_string(circ) + " of 1");

  double fix = 0.0;
  for (cplx lam : {cplx(1.0, 0.0), std::polar(1.0, 0.9),
                   std::polar(1.0, -2.2)}) {
    cplx y0 = std::sqrt(c.branch_product(lam));
    if (std::abs(y0) < 1e-12) continue;
    CurvePoint p = CurvePoint::hyper(lam, y0);
    CurvePoint q = c.rho(p);
    fix = std::max(fix, std::abs(q.coord - lam) + std::abs(q.y - y0));
  }
  rep.add("rho_fixes_unit_fiber", fix <= 1e-8,
          "fiber over |lambda| = 1 fixed pointwise, error " +
              std::to_string(fix));

  double invol = 0.0;
  for (cplx lam : sample_ring(c.branch_points, 6)) {
    cplx y0 = std::sqrt(c.branch_product(lam));
    CurvePoint p = CurvePoint::hyper(lam, y0);
    CurvePoint q = c.rho(c.rho(p));
    invol = std::max(invol, std::abs(q.coord - p.coord) + std::abs(q.y - p.y));
  }
  rep.add("involution_squares_to_identity", invol <= 1e-8,
          "rho composed with itself is the identity, error " +
              std::to_string(invol));
  return rep;
}

Differential Differential::holomorphic_hyper(Poly num) {
  Differential d;
  d.kind = Kind::holomorphic;
  d.num = std::move(num);
  return d;
}

Differential Differential::third_kind_pair(const SpectralCurve& c,
                                           const CurvePoint& plus,
                                           const CurvePoint& minus) {
  Differential d;
  d.kind = Kind::third_kind;
  d.pole_plus = plus;
  d.pole_minus = minus;
  if (c.kind == CurveKind::hyperelliptic) {
    if (plus.at_infinity || minus.at_infinity)
      throw config_error("third-kind pair: infinite poles unsupported on "
                         "hyperelliptic curves");
    for (const CurvePoint& p : {plus, minus}) {
      if (std::abs(p.y) < 1e-10)
        throw config_error("third-kind pair: pole at a branch point");
      if (!c.contains(p, 1e-8))
        throw config_error("third-kind pair: pole not on the curve");
    }
  } else {
    if (plus.at_infinity && minus.at_infinity)
      throw config_error("third-kind pair: both poles at infinity");
    RationalFn f(Poly(), Poly::constant(1.0));
    if (!plus.at_infinity)
      f = f + RationalFn(Poly::constant(1.0), Poly{{-plus.coord, 1.0}});
    if (!minus.at_infinity)
      f = f - RationalFn(Poly::constant(1.0), Poly{{-minus.coord, 1.0}});
    d.f = f;
  }
  return d;
}

cplx Differential::coeff(const SpectralCurve& c, cplx lam, cplx y) const {
  if (c.kind == CurveKind::rational) return f.eval(lam);
  if (kind == Kind::holomorphic) return num.eval(lam) / y;
  cplx lp = pole_plus.coord, yp = pole_plus.y;
  cplx lq = pole_minus.coord, yq = pole_minus.y;
  cplx numer = y * (lp - lq) + (yp - yq) * lam - (yp * lq - yq * lp);
  return numer / (2.0 * y * (lam - lp) * (lam - lq));
}

std::vector<Differential> differential_basis(
    const SpectralCurve& c,
    const std::vector<std::pair<CurvePoint, CurvePoint>>& third_kind_pairs) {
  std::vector<Differential> out;
  if (c.kind == CurveKind::hyperelliptic) {
    std::vector<cplx> coeffs{1.0};
    for (int i = 1; i <= c.genus; ++i) {
      out.push_back(Differential::holomorphic_hyper(Poly(coeffs)));
      coeffs.insert(coeffs.begin(), 0.0);
    }
  }
  for (const auto& pr : third_kind_pairs)
    out.push_back(Differential::third_kind_pair(c, pr.first, pr.second));
  return out;
}

cplx numeric_residue(const SpectralCurve& c, const Differential& d,
                     const CurvePoint& pole) {
  if (d.kind != Differential::Kind::third_kind)
    throw config_error("numeric_residue: differential has no poles");
  if (c.kind == CurveKind::hyperelliptic)
    return detail::hyper_residue(c, d, pole);

  if (pole.at_infinity) {
    double r = 2.0;
    for (const CurvePoint* p : {&d.pole_plus, &d.pole_minus})
      if (!p->at_infinity) r = std::max(r, 2.0 * std::abs(p->coord) + 2.0);
    cplx acc = 0.0;
    int n = 4096;
    for (int k = 0; k < n; ++k) {
      cplx w = std::polar(r, kTwoPi * k / n);
      cplx dw = kI * w * (kTwoPi / n);
      acc += d.f.eval(w) * dw;
    }
    return -acc / (kTwoPi * kI);
  }
  cplx other = d.pole_plus.close_to(pole, 1e-9) ? d.pole_minus.coord
                                                : d.pole_plus.coord;
  double r = 0.25 * (d.pole_plus.at_infinity || d.pole_minus.at_infinity
                         ? 1.0
                         : std::abs(pole.coord - other));
  if (r <= 0.0) r = 0.25;
  cplx prev = 0.0;
  for (int n = 512; n <= 16384; n *= 2) {
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) {
      cplx w = pole.coord + std::polar(r, kTwoPi * k / n);
      cplx dw = kI * (w - pole.coord) * (kTwoPi / n);
      acc += d.f.eval(w) * dw;
    }
    acc /= kTwoPi * kI;
    if (n > 512 && std::abs(acc - prev) < 1e-12) return acc;
    prev = acc;
  }
  return prev;
}

MatrixXcd involution_matrix(const SpectralCurve& c,
                            const std::vector<Differential>& diffs,
                            const MatrixXcd& normalizer,
                            const MatrixXcd& third_a,
                            double* max_residual) {
  const int g = static_cast<int>(normalizer.cols());
  const int n = static_cast<int>(diffs.size()) - g;
  const int dim = g + n;

  std::vector<cplx> avoid;
  if (c.kind == CurveKind::hyperelliptic)
    avoid = c.branch_points;
  else
    for (cplx r : c.lambda.den.roots()) avoid.push_back(r);
  for (const auto& d : diffs)
    if (d.kind == Differential::Kind::third_kind) {
      for (const CurvePoint* p : {&d.pole_plus, &d.pole_minus})
        if (!p->at_infinity) avoid.push_back(p->coord);
    }
  // keep the images under rho clear of the special points too
  size_t direct = avoid.size();
  for (size_t i = 0; i < direct; ++i)
    if (std::abs(avoid[i]) > 1e-6) avoid.push_back(1.0 / std::conj(avoid[i]));
  auto samples = sample_ring(avoid, std::max(30, 6 * dim));

  // scaled coordinate basis evaluated at a point
  auto basis_at = [&](const CurvePoint& p) {
    VectorXcd raw(diffs.size());
    for (size_t i = 0; i < diffs.size(); ++i)
      raw(static_cast<int>(i)) = diffs[i].coeff(c, p.coord, p.y);
    VectorXcd u(dim);
    VectorXcd hol = normalizer * raw.head(g);
    u.head(g) = hol;
    for (int l = 0; l < n; ++l) {
      cplx corr = 0.0;
      for (int i = 0; i < g; ++i) corr += third_a(i, l) * hol(i);
      u(g + l) = (raw(g + l) - corr) / (2.0 * kPi * kI);
    }
    return u;
  };

  const int S = static_cast<int>(samples.size());
  if (S < 2 * dim) throw numeric_error("involution fit: too few samples");
  MatrixXcd A(S, dim), V(S, dim);
  for (int s = 0; s < S; ++s) {
    CurvePoint p;
    if (c.kind == CurveKind::rational) {
      p = CurvePoint::rational(samples[s]);
    } else {
      p = CurvePoint::hyper(samples[s],
                            std::sqrt(c.branch_product(samples[s])));
    }
    A.row(s) = basis_at(p).transpose();
    VectorXcd ub = basis_at(c.rho(p));
    cplx jac = -1.0 / (samples[s] * samples[s]);
    V.row(s) = (ub.conjugate() * jac).transpose();
  }
  MatrixXcd sol = A.colPivHouseholderQr().solve(V);  // columns: M rows
  MatrixXcd M = sol.transpose();
  if (max_residual) {
    double worst = 0.0;
    MatrixXcd R = A * sol - V;
    for (int i = 0; i < dim; ++i) {
      double denom = std::max(V.col(i).norm(), 1e-30);
      worst = std::max(worst, R.col(i).norm() / denom);
    }
    *max_residual = worst;
  }
  return M;
}

VectorXcd PeriodData::to_coords(const VectorXcd& raw) const {
  VectorXcd out(g + n);
  VectorXcd base = normalizer * raw.head(g);
  out.head(g) = base;
  for (int l = 0; l < n; ++l) {
    cplx corr = 0.0;
    for (int i = 0; i < g; ++i) corr += third_a(i, l) * base(i);
    out(g + l) = (raw(g + l) - corr) / (2.0 * kPi * kI);
  }
  return out;
}

ValidationReport PeriodData::validate(const Tolerances& tol) const {
  ValidationReport rep;
  if (g > 0) {
    double sym = (tau - tau.transpose()).cwiseAbs().maxCoeff();
    rep.add("tau_symmetric", sym <= tol.period,
            "max asymmetry " + std::to_string(sym));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(
        (tau.imag() + tau.imag().transpose()) / 2.0);
    double mn = es.eigenvalues().minCoeff();
    rep.add("im_tau_positive", mn > 0.0,
            "min eigenvalue of Im tau is " + std::to_string(mn));
  }
  rep.add("deformation_invariance", deformation_residual <= tol.period,
          "contour deformation residual " +
              std::to_string(deformation_residual));
  for (const auto& chk : lattice.validate(tol.lattice).checks)
    rep.checks.push_back(chk);
  return rep;
}

PeriodData period_lattice(const SpectralCurve& c,
                          const std::vector<Differential>& diffs) {
  if (c.kind == CurveKind::hyperelliptic)
    return detail::hyper_period_lattice(c, diffs);

  PeriodData pd;
  pd.g = 0;
  pd.n = static_cast<int>(diffs.size());
  for (const auto& d : diffs)
    if (d.kind != Differential::Kind::third_kind)
      throw config_error("period_lattice: rational curves carry third-kind "
                         "differentials only");
  pd.a_periods = pd.b_periods = pd.tau = pd.normalizer = MatrixXcd(0, 0);
  pd.third_a = pd.third_b = MatrixXcd(0, pd.n);
  pd.lattice.g = 0;
  pd.lattice.n = pd.n;
  pd.lattice.gens = MatrixXcd::Identity(pd.n, pd.n);
  double res = 0.0;
  pd.lattice.M = involution_matrix(c, diffs, pd.normalizer, pd.third_a, &res);
  if (res > 1e-6)
    throw numeric_error("period_lattice: involution fit residual " +
                        std::to_string(res));
  pd.deformation_residual = 0.0;
  return pd;
}

VectorXcd integrate_differentials(const SpectralCurve& c,
                                  const std::vector<Differential>& diffs,
                                  const CurvePoint& base,
                                  const CurvePoint& target,
                                  int path_variant) {
  if (c.kind == CurveKind::hyperelliptic)
    return detail::hyper_integrate(c, diffs, base, target, path_variant);

  VectorXcd out(diffs.size());
  auto logdiff = [](const CurvePoint& pt, const CurvePoint& p,
                    const CurvePoint& q) -> cplx {
    // log((w - p)/(w - q)) with the convention log(...) -> 0 at w = infinity
    if (pt.at_infinity) {
      if (p.at_infinity || q.at_infinity)
        throw config_error("divergent integral: endpoint at an infinite pole");
      return 0.0;
    }
    cplx acc = 0.0;
    for (const CurvePoint* pole : {&p, &q}) {
      if (pole->at_infinity) continue;
      cplx dz = pt.coord - pole->coord;
      if (std::abs(dz) < 1e-12)
        throw config_error("divergent integral: endpoint equals a pole");
      acc += (pole == &p ? 1.0 : -1.0) * std::log(dz);
    }
    return acc;
  };
  for (size_t i = 0; i < diffs.size(); ++i) {
    const auto& d = diffs[i];
    if (d.kind != Differential::Kind::third_kind)
      throw config_error("integrate: rational curves carry third-kind "
                         "differentials only");
    out(static_cast<int>(i)) = logdiff(target, d.pole_plus, d.pole_minus) -
                               logdiff(base, d.pole_plus, d.pole_minus);
  }
  return out;
}

VectorXcd abel_map(const SpectralCurve& c,
                   const std::vector<Differential>& diffs,
                   const PeriodData& pd, const CurvePoint& base,
                   const CurvePoint& target, int path_variant) {
  return pd.to_coords(
      integrate_differentials(c, diffs, base, target, path_variant));
}

VectorXcd abel_map_base(const SpectralCurve& c,
                        const std::vector<Differential>& diffs,
                        const PeriodData& pd, const CurvePoint& base,
                        const CurvePoint& target) {
  std::vector<Differential> hol(diffs.begin(), diffs.begin() + pd.g);
  for (const auto& d : hol)
    if (d.kind != Differential::Kind::holomorphic)
      throw config_error("abel_map_base: leading differentials must be "
                         "holomorphic");
  if (pd.g == 0) return VectorXcd(0);
  VectorXcd raw = integrate_differentials(c, hol, base, target, 0);
  return pd.normalizer * raw;
}

VectorXcd differential_values(const SpectralCurve& c,
                              const std::vector<Differential>& diffs,
                              const CurvePoint& p, int ram_index) {
  if (c.kind == CurveKind::hyperelliptic)
    return detail::hyper_differential_values(c, diffs, p, ram_index);

  if (p.at_infinity)
    throw config_error("differential_values: infinite point unsupported "
                       "on rational curves");
  // check the ramification index: lambda must vanish to exactly that order
  RationalFn der = c.lambda;
  double lead_scale = std::abs(c.lambda.eval(p.coord + 0.5));
  if (!std::isfinite(lead_scale)) lead_scale = 1.0;
  lead_scale += 1.0;
  for (int k = 0; k < ram_index; ++k) {
    if (std::abs(der.eval(p.coord)) > 1e-8 * lead_scale)
      throw config_error("differential_values: lambda does not vanish to "
                         "the requested order");
    der = der.deriv();
  }
  cplx top = der.eval(p.coord);
  if (std::abs(top) < 1e-10)
    throw config_error("differential_values: ramification index too low");
  double fact = 1.0;
  for (int k = 2; k <= ram_index; ++k) fact *= k;
  cplx dw_dzeta = principal_root(fact / top, ram_index);
  VectorXcd out(diffs.size());
  for (size_t i = 0; i < diffs.size(); ++i)
    out(static_cast<int>(i)) = diffs[i].f.eval(p.coord) * dw_dzeta;
  return out;
}

}  // namespace harmap
