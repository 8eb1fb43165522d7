#include "harmap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "harmap/linalg.hpp"
#include "harmap/thetamap.hpp"

namespace harmap {
namespace {

constexpr double kMatchTol = 1e-6;

// Signed formal sum with close_to clustering of the support.
struct SignedDivisor {
  std::vector<DivisorTerm> terms;

  void add(const CurvePoint& p, int m) {
    for (auto& t : terms) {
      if (t.point.close_to(p, kMatchTol)) {
        t.mult += m;
        return;
      }
    }
    terms.push_back({p, m});
  }
  void add(const Divisor& d, int scale) {
    for (const auto& t : d) add(t.point, scale * t.mult);
  }
  void prune() {
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [](const DivisorTerm& t) { return t.mult == 0; }),
                terms.end());
  }
  int degree() const {
    int s = 0;
    for (const auto& t : terms) s += t.mult;
    return s;
  }
};

// Roots of q grouped into multiple roots, each cluster polished by Newton on
// the (m-1)-th derivative so that user-supplied exact locations match.
Divisor refined_root_divisor(const Poly& q) {
  Divisor out;
  if (q.degree() < 1) return out;
  std::vector<std::pair<cplx, int>> clusters;
  for (cplx r : q.roots()) {
    bool merged = false;
    for (auto& cl : clusters) {
      if (std::abs(cl.first - r) <= 1e-5 * (1.0 + std::abs(r))) {
        cl.first = (cl.first * double(cl.second) + r) / double(cl.second + 1);
        ++cl.second;
        merged = true;
        break;
      }
    }
    if (!merged) clusters.push_back({r, 1});
  }
  for (auto& [x, m] : clusters) {
    Poly d = q;
    for (int j = 0; j < m - 1; ++j) d = d.deriv();
    Poly dp = d.deriv();
    for (int it = 0; it < 3; ++it) {
      cplx den = dp.eval(x);
      if (std::abs(den) < 1e-300) break;
      x -= d.eval(x) / den;
    }
    out.push_back({CurvePoint::rational(x), m});
  }
  std::sort(out.begin(), out.end(), [](const DivisorTerm& a,
                                       const DivisorTerm& b) {
    if (a.point.coord.real() != b.point.coord.real())
      return a.point.coord.real() < b.point.coord.real();
    return a.point.coord.imag() < b.point.coord.imag();
  });
  return out;
}

std::vector<CurvePoint> marked_fiber(const SpectralCurve& c, cplx lam) {
  auto pts = c.fiber(lam);
  if (c.kind == CurveKind::rational) {
    int expect = std::max(c.lambda.num.degree(), c.lambda.den.degree());
    if (static_cast<int>(pts.size()) < expect)
      pts.push_back(CurvePoint::rational_infinity());
    // order by (|arg w|, arg w), infinity last; the magnitude comparison is
    // blurred so that conjugate pairs tie and the signed argument decides
    std::sort(pts.begin(), pts.end(),
              [](const CurvePoint& a, const CurvePoint& b) {
                auto key = [](const CurvePoint& p) {
                  if (p.at_infinity) return std::pair<double, double>(1e9, 0.0);
                  double t = std::arg(p.coord);
                  return std::pair<double, double>(std::abs(t), t);
                };
                auto ka = key(a), kb = key(b);
                if (std::abs(ka.first - kb.first) > 1e-9)
                  return ka.first < kb.first;
                return ka.second < kb.second;
              });
  } else if (pts.size() < 2) {
    throw config_error("marked fiber is ramified");
  }
  return pts;
}

int zero_index(const SpectralCurve& c, const CurvePoint& p) {
  if (c.kind == CurveKind::hyperelliptic)
    return std::abs(p.y) <= 1e-9 ? 2 : 1;
  const Poly& num = c.lambda.num;
  double scale = 0.0;
  for (cplx co : num.c) scale = std::max(scale, std::abs(co));
  Poly q = num;
  int ord = 0;
  while (ord <= num.degree() && std::abs(q.eval(p.coord)) <= 1e-7 * scale) {
    ++ord;
    q = q.deriv();
  }
  return ord;
}

Divisor ramification_divisor(const SpectralCurve& c) {
  Divisor R;
  if (c.kind == CurveKind::hyperelliptic) {
    for (cplx e : c.branch_points) R.push_back({CurvePoint::hyper(e, 0.0), 1});
    if (c.infinity_is_branch())
      R.push_back({CurvePoint::hyper_infinity(0), 1});
    return R;
  }
  Poly rp = c.lambda.num.deriv() * c.lambda.den -
            c.lambda.num * c.lambda.den.deriv();
  R = refined_root_divisor(rp);
  int total = 2 * std::max(c.lambda.num.degree(), c.lambda.den.degree()) - 2;
  int fin = divisor_degree(R);
  if (total - fin > 0)
    R.push_back({CurvePoint::rational_infinity(), total - fin});
  return R;
}

Divisor lambda_pole_divisor(const SpectralCurve& c) {
  if (c.kind == CurveKind::hyperelliptic) {
    if (c.infinity_is_branch()) return {{CurvePoint::hyper_infinity(0), 2}};
    return {{CurvePoint::hyper_infinity(1), 1},
            {CurvePoint::hyper_infinity(-1), 1}};
  }
  Divisor out = refined_root_divisor(c.lambda.den);
  int gap = c.lambda.num.degree() - c.lambda.den.degree();
  if (gap > 0) out.push_back({CurvePoint::rational_infinity(), gap});
  return out;
}

Divisor lambda_zero_divisor(const SpectralCurve& c) {
  if (c.kind == CurveKind::hyperelliptic) {
    auto pts = c.fiber(0.0);
    Divisor out;
    for (const auto& p : pts)
      out.push_back({p, pts.size() == 1 ? 2 : 1});
    return out;
  }
  Divisor out = refined_root_divisor(c.lambda.num);
  int gap = c.lambda.den.degree() - c.lambda.num.degree();
  if (gap > 0) out.push_back({CurvePoint::rational_infinity(), gap});
  return out;
}

Divisor divisor_minus_point(Divisor d, const CurvePoint& p, const char* what) {
  for (auto& t : d) {
    if (t.point.close_to(p, kMatchTol) && t.mult >= 1) {
      --t.mult;
      d.erase(std::remove_if(d.begin(), d.end(),
                             [](const DivisorTerm& t2) { return t2.mult == 0; }),
              d.end());
      return d;
    }
  }
  throw config_error(what);
}

double falling(int i, int j) {
  double v = 1.0;
  for (int t = 0; t < j; ++t) v *= double(i - t);
  return v;
}

// Column-reduced echelon normalization of a column span: pivots scaled to 1,
// columns ordered by pivot row, tiny entries snapped to zero.
MatrixXcd echelon_columns(MatrixXcd B) {
  const int rows = static_cast<int>(B.rows());
  const int cols = static_cast<int>(B.cols());
  double big = B.cwiseAbs().maxCoeff();
  if (big == 0.0) return B;
  int done = 0;
  for (int r = 0; r < rows && done < cols; ++r) {
    int sel = -1;
    double bv = 0.0;
    for (int c2 = done; c2 < cols; ++c2) {
      if (std::abs(B(r, c2)) > bv) {
        bv = std::abs(B(r, c2));
        sel = c2;
      }
    }
    if (sel < 0 || bv < 1e-9 * big) continue;
    B.col(sel).swap(B.col(done));
    B.col(done) /= B(r, done);
    for (int c2 = 0; c2 < cols; ++c2)
      if (c2 != done) B.col(c2) -= B(r, c2) * B.col(done);
    ++done;
  }
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (std::abs(B(i, j)) < 1e-11) B(i, j) = 0.0;
  return B;
}

cplx section_value(const RationalFn& f, const CurvePoint& p) {
  return p.at_infinity ? f.eval_inf() : f.eval(p.coord);
}

GeneralizedLattice base_only_lattice(const PeriodData& pd) {
  GeneralizedLattice bl;
  bl.g = pd.g;
  bl.n = 0;
  bl.gens = MatrixXcd::Zero(pd.g, 2 * pd.g);
  bl.gens.leftCols(pd.g) = MatrixXcd::Identity(pd.g, pd.g);
  bl.gens.rightCols(pd.g) = pd.tau;
  bl.M = MatrixXcd::Zero(pd.g, pd.g);
  return bl;
}

VectorXcd divisor_abel_base(const SpectralData& data,
                            const std::vector<Differential>& diffs,
                            const PeriodData& pd, const Divisor& d) {
  VectorXcd u = VectorXcd::Zero(pd.g);
  const CurvePoint& base = data.marked.O.at(0);
  for (const auto& t : d)
    u += double(t.mult) *
         abel_map_base(data.curve, diffs, pd, base, t.point);
  return u;
}

}  // namespace

int divisor_degree(const Divisor& d) {
  int s = 0;
  for (const auto& t : d) s += t.mult;
  return s;
}

SpectralData make_spectral_data(SpectralCurve curve, Divisor line_divisor,
                                int k, TargetKind target,
                                std::vector<CurvePoint> designated_zeros) {
  SpectralData data;
  data.curve = std::move(curve);
  data.line_divisor = std::move(line_divisor);
  data.k = k;
  data.target = target;
  const SpectralCurve& c = data.curve;

  for (const auto& t : data.line_divisor) {
    if (t.mult <= 0) throw config_error("line divisor must be positive");
    if (!c.contains(t.point, 1e-6))
      throw config_error("line divisor point is off the curve");
  }

  data.marked.O = marked_fiber(c, cplx(1.0, 0.0));
  if (target == TargetKind::projective_unitary)
    data.marked.S = marked_fiber(c, cplx(-1.0, 0.0));
  const int n = data.n();
  if (n < 1) throw config_error("lambda map must have degree at least two");
  if (divisor_degree(data.line_divisor) != c.genus + n)
    throw config_error("line divisor degree must be genus + n");

  const int need = target == TargetKind::grassmannian ? k : n;
  if (static_cast<int>(designated_zeros.size()) != need)
    throw config_error("designated zero count does not match the target");
  if (k < 1 || k > n) throw config_error("plane rank out of range");
  if (target == TargetKind::projective_unitary && k != n)
    throw config_error("projective-unitary flow rank must equal n");

  for (const auto& p : designated_zeros) {
    if (p.at_infinity)
      throw config_error("designated zero at infinity is unsupported");
    if (!c.contains(p, 1e-6) || std::abs(c.lambda_at(p)) > 1e-7)
      throw config_error("designated point is not a zero of lambda");
    int r = zero_index(c, p);
    if (r < 1) throw config_error("designated point is not a zero of lambda");
    data.marked.P.push_back(p);
    data.marked.ram.push_back(r);
    data.marked.Q.push_back(c.rho(p));
    if (target == TargetKind::grassmannian && r > 2)
      data.conformal_direction = true;
  }

  data.marked.R = ramification_divisor(c);
  data.marked.pole_divisor = lambda_pole_divisor(c);
  data.marked.zero_divisor = lambda_zero_divisor(c);

  Divisor dinf = data.marked.pole_divisor;
  for (const auto& q : data.marked.Q)
    dinf = divisor_minus_point(
        dinf, q, "rho image of a designated zero is not a pole of lambda");
  data.marked.D_inf = dinf;
  for (size_t m = 0; m < data.marked.P.size(); ++m) {
    data.marked.Qhat.push_back(divisor_minus_point(
        data.marked.pole_divisor, data.marked.Q[m],
        "rho image of a designated zero is not a pole of lambda"));
    data.marked.Phat.push_back(divisor_minus_point(
        data.marked.zero_divisor, data.marked.P[m],
        "designated point is not a zero of lambda"));
  }
  return data;
}

cplx WitnessFn::eval(const SpectralCurve& c, const CurvePoint& p) const {
  (void)c;
  if (constant) return value;
  return p.at_infinity ? fn.eval_inf() : fn.eval(p.coord);
}

WitnessFn witness_function(const SpectralData& data) {
  SignedDivisor T;
  T.add(data.line_divisor, 1);
  for (const auto& t : data.line_divisor)
    T.add(data.curve.rho(t.point), t.mult);
  T.add(data.marked.R, -1);
  T.prune();

  WitnessFn wf;
  if (T.terms.empty()) return wf;  // constant 1
  if (data.curve.kind != CurveKind::rational)
    throw config_error(
        "witness construction needs an involution-balanced divisor on "
        "positive genus");
  if (T.degree() != 0)
    throw config_error("reality divisor does not balance");

  Poly numf = Poly::constant(1.0), denf = Poly::constant(1.0);
  for (const auto& t : T.terms) {
    if (t.point.at_infinity) continue;  // exponent forced by degree balance
    Poly lin{{-t.point.coord, 1.0}};
    for (int j = 0; j < std::abs(t.mult); ++j) {
      if (t.mult > 0)
        numf = numf * lin;
      else
        denf = denf * lin;
    }
  }
  RationalFn f(numf, denf);

  // normalize so that conj(rho_* f) = f: the two sides differ by a unit
  // modulus constant since their divisors agree
  cplx probe{0.0, 0.0}, val{0.0, 0.0};
  for (double t : {0.377, 1.041, 2.213, 2.771}) {
    probe = std::exp(kI * t);
    val = f.eval(probe);
    if (std::isfinite(std::abs(val)) && std::abs(val) > 1e-8) break;
  }
  if (!(std::abs(val) > 1e-8))
    throw numeric_error("witness normalization probe vanished");
  cplx gamma = std::conj(f.eval(1.0 / std::conj(probe))) / val;
  if (std::abs(std::abs(gamma) - 1.0) > 1e-6)
    throw numeric_error("witness involution ratio should be unimodular");
  // s^2 = gamma makes s*f involution-real; the residual sign ambiguity is
  // fixed by demanding a positive value on the unit circle
  cplx s = std::exp(kI * (std::arg(gamma) / 2.0));
  if ((s * val).real() < 0.0) s = -s;
  wf.constant = false;
  wf.fn = s * f;
  return wf;
}

ValidationReport validate_spectral(const SpectralData& data,
                                   const Tolerances& tol) {
  ValidationReport rep;
  const SpectralCurve& c = data.curve;
  const MarkedPoints& mk = data.marked;
  const int n = data.n();

  bool pos = true;
  for (const auto& t : data.line_divisor) pos = pos && t.mult >= 1;
  rep.add("divisor positive", pos);

  int deg = divisor_degree(data.line_divisor);
  {
    std::ostringstream os;
    os << "degree " << deg << ", genus+n " << c.genus + n;
    rep.add("divisor degree", deg == c.genus + n, os.str());
  }

  auto distinct = [&](const std::vector<CurvePoint>& pts) {
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = i + 1; j < pts.size(); ++j)
        if (pts[i].close_to(pts[j], kMatchTol)) return false;
    return true;
  };
  rep.add("marked fiber distinct",
          distinct(mk.O) && distinct(mk.S) &&
              static_cast<int>(mk.O.size()) == n + 1);

  bool avoid = true;
  for (const auto& t : data.line_divisor) {
    for (const auto& o : mk.O)
      if (t.point.close_to(o, kMatchTol)) avoid = false;
    for (const auto& s : mk.S)
      if (t.point.close_to(s, kMatchTol)) avoid = false;
  }
  rep.add("divisor avoids marked fibers", avoid);

  {
    bool idx_ok = !mk.ram.empty();
    std::ostringstream os;
    os << "indices";
    for (size_t m = 0; m < mk.ram.size(); ++m) {
      os << ' ' << mk.ram[m];
      if (data.target == TargetKind::grassmannian)
        idx_ok = idx_ok && mk.ram[m] >= 2;
      else
        idx_ok = idx_ok && mk.ram[m] == 1;
    }
    rep.add("zero index", idx_ok, os.str());
  }
  rep.add("conformal direction", true,
          data.conformal_direction ? "present" : "absent");

  WitnessFn wf;
  bool built = false;
  try {
    wf = witness_function(data);
    built = true;
    rep.add("reality witness", true, wf.constant ? "constant" : "rational");
  } catch (const std::exception& e) {
    rep.add("reality witness", false, e.what());
  }

  if (built) {
    if (wf.constant) {
      rep.add("witness involution", true, "constant");
    } else {
      double worst = 0.0;
      for (int j = 0; j < 8; ++j) {
        cplx w = (j % 2 ? 0.7 : 1.4) * std::exp(kI * (0.31 + 0.74 * j));
        cplx v1 = std::conj(wf.fn.eval(1.0 / std::conj(w)));
        cplx v2 = wf.fn.eval(w);
        worst = std::max(worst, std::abs(v1 - v2) / (1.0 + std::abs(v2)));
      }
      std::ostringstream os;
      os << "defect " << worst;
      rep.add("witness involution", worst <= 1e-8, os.str());
    }

    {
      bool posok = true;
      double floor_seen = 1e300;
      for (int j = 0; j < 32 && posok; ++j) {
        cplx lam = std::exp(kI * (2.0 * kPi * j / 32.0));
        for (const auto& p : c.fiber(lam)) {
          cplx v = wf.eval(c, p);
          floor_seen = std::min(floor_seen, v.real());
          if (!(v.real() > 1e-7) || std::abs(v.imag()) > 1e-7 * (1.0 + std::abs(v)))
            posok = false;
        }
      }
      std::ostringstream os;
      os << "min real part " << floor_seen;
      rep.add("witness positive on unit fiber", posok, os.str());
    }

    {
      auto cluster_spread = [&](const std::vector<CurvePoint>& pts) {
        if (pts.empty()) return 0.0;
        cplx f0 = wf.eval(c, pts[0]);
        double d = 0.0;
        for (const auto& p : pts)
          d = std::max(d, std::abs(wf.eval(c, p) - f0));
        return d / (1.0 + std::abs(f0));
      };
      double dmax = std::max(cluster_spread(mk.O), cluster_spread(mk.S));
      std::ostringstream os;
      os << "spread " << dmax;
      rep.add("witness equal at marked fiber", dmax <= 1e-8, os.str());
    }
  }

  if (c.kind == CurveKind::rational) {
    auto full = section_space(data, {});
    bool ok = full.dim == n + 1 && avoid;
    std::ostringstream os;
    os << "dim " << full.dim;
    if (ok) {
      auto fiber_rank = [&](const std::vector<CurvePoint>& pts) {
        if (pts.empty()) return true;
        MatrixXcd E(pts.size(), full.basis.size());
        for (size_t i = 0; i < pts.size(); ++i)
          for (size_t j = 0; j < full.basis.size(); ++j)
            E(static_cast<int>(i), static_cast<int>(j)) =
                section_value(full.basis[j], pts[i]);
        Eigen::JacobiSVD<MatrixXcd> svd(E);
        return svd.singularValues()(svd.singularValues().size() - 1) >
               1e-9 * svd.singularValues()(0);
      };
      ok = fiber_rank(mk.O) && fiber_rank(mk.S);
    }
    rep.add("sections span marked fiber", ok, os.str());
  }
  (void)tol;
  return rep;
}

ValidationReport validate_spectral_periods(
    const SpectralData& data, const std::vector<Differential>& diffs,
    const PeriodData& pd, const Tolerances& tol) {
  ValidationReport rep;
  const SpectralCurve& c = data.curve;
  const int g = c.genus, n = data.n();

  bool meets_fiber = false;
  for (const auto& t : data.line_divisor) {
    for (const auto& o : data.marked.O)
      if (t.point.close_to(o, kMatchTol)) meets_fiber = true;
    for (const auto& s : data.marked.S)
      if (t.point.close_to(s, kMatchTol)) meets_fiber = true;
  }

  if (meets_fiber) {
    // the third-kind integrals below would diverge at the divisor points
    rep.add("reality divisor class", false, "divisor meets the marked fiber");
  } else {
    // full generalized class of line_divisor + rho(line_divisor) - R; the
    // combination has total degree zero, so any base away from the marked
    // fibers works, and the first designated zero always is
    const CurvePoint& base = data.marked.P.at(0);
    VectorXcd v = VectorXcd::Zero(g + pd.n);
    for (const auto& t : data.line_divisor) {
      v += double(t.mult) * abel_map(c, diffs, pd, base, t.point);
      v += double(t.mult) * abel_map(c, diffs, pd, base, c.rho(t.point));
    }
    for (const auto& t : data.marked.R)
      v -= double(t.mult) * abel_map(c, diffs, pd, base, t.point);
    double dist = lattice_distance(v, pd.lattice);
    std::ostringstream os;
    os << "distance " << dist;
    rep.add("reality divisor class", dist <= 100.0 * tol.lattice, os.str());
  }

  {
    // no global section vanishes on the whole marked fiber
    Divisor ofib;
    for (const auto& o : data.marked.O) ofib.push_back({o, 1});
    VectorXcd u = divisor_abel_base(data, diffs, pd, data.line_divisor) -
                  divisor_abel_base(data, diffs, pd, ofib);
    bool ok = true;
    std::ostringstream os;
    if (g + n - (n + 1) == g - 1 && g >= 1) {
      if (g == 1) {
        double dist = lattice_distance(u, base_only_lattice(pd));
        os << "class distance " << dist;
        ok = dist >= 1e-2;
      } else {
        VectorXcd K = riemann_constant(c, diffs, pd, data.marked.O.at(0));
        ThetaParams tp;
        tp.tau = pd.tau;
        double val = std::abs(riemann_theta(u + K, tp));
        os << "theta value " << val;
        ok = val >= 1e-4;
      }
    }
    rep.add("marked fiber nondegenerate", ok, os.str());
  }

  {
    Divisor pdiv;
    for (const auto& p : data.marked.P) pdiv.push_back({p, 1});
    auto V = section_space_periods(data, data.marked.D_inf, diffs, pd);
    auto Vp = section_space_periods(data, pdiv, diffs, pd);
    auto full = section_space_periods(data, {}, diffs, pd);
    std::ostringstream os;
    os << "dims " << V.dim << ' ' << Vp.dim << ' ' << full.dim;
    rep.add("section dimensions",
            V.dim == data.k && Vp.dim == n + 1 - data.k && full.dim == n + 1,
            os.str());
  }
  return rep;
}

std::vector<Differential> marked_differentials(const SpectralData& data) {
  std::vector<std::pair<CurvePoint, CurvePoint>> pairs;
  for (int j = 1; j <= data.n(); ++j)
    pairs.push_back({data.marked.O[j], data.marked.O[0]});
  if (data.target == TargetKind::projective_unitary)
    for (int j = 1; j <= data.n(); ++j)
      pairs.push_back({data.marked.S[j], data.marked.S[0]});
  return differential_basis(data.curve, pairs);
}

SectionSpace section_space(const SpectralData& data, const Divisor& vanishing) {
  if (data.curve.kind != CurveKind::rational)
    throw config_error(
        "explicit section bases need genus zero; use the period variant");

  Poly delta = Poly::constant(1.0);
  int m_inf_line = 0;
  for (const auto& t : data.line_divisor) {
    if (t.point.at_infinity) {
      m_inf_line += t.mult;
      continue;
    }
    for (int j = 0; j < t.mult; ++j)
      delta = delta * Poly{{-t.point.coord, 1.0}};
  }
  int m_inf_v = 0;
  std::vector<std::pair<cplx, int>> fin;
  for (const auto& t : vanishing) {
    if (t.point.at_infinity)
      m_inf_v += t.mult;
    else
      fin.push_back({t.point.coord, t.mult});
  }

  SectionSpace out;
  out.exact = true;
  const int dmax = delta.degree() + m_inf_line - m_inf_v;
  if (dmax < 0) return out;

  int rows = 0;
  for (const auto& [q, m] : fin) rows += m;
  MatrixXcd NS;
  if (rows == 0) {
    NS = MatrixXcd::Identity(dmax + 1, dmax + 1);
  } else {
    MatrixXcd C = MatrixXcd::Zero(rows, dmax + 1);
    int row = 0;
    for (const auto& [q, m] : fin)
      for (int j = 0; j < m; ++j, ++row)
        for (int i = j; i <= dmax; ++i)
          C(row, i) = falling(i, j) * std::pow(q, i - j);
    NS = nullspace(C, 1e-10);
    NS = echelon_columns(NS);
  }
  out.dim = static_cast<int>(NS.cols());
  for (int j = 0; j < NS.cols(); ++j) {
    std::vector<cplx> coeff(NS.rows());
    for (int i = 0; i < NS.rows(); ++i) coeff[i] = NS(i, j);
    out.basis.push_back(RationalFn(Poly(std::move(coeff)), delta));
  }
  return out;
}

SectionSpace section_space_periods(const SpectralData& data,
                                   const Divisor& vanishing,
                                   const std::vector<Differential>& diffs,
                                   const PeriodData& pd) {
  if (data.curve.kind == CurveKind::rational)
    return section_space(data, vanishing);

  const int g = data.curve.genus;
  const int d = g + data.n() - divisor_degree(vanishing);
  SectionSpace out;
  if (d < 0) return out;

  VectorXcd u = divisor_abel_base(data, diffs, pd, data.line_divisor) -
                divisor_abel_base(data, diffs, pd, vanishing);
  auto near_trivial = [&](const VectorXcd& v) {
    return lattice_distance(v, base_only_lattice(pd)) <= 1e-5;
  };

  if (d == 0) {
    out.dim = near_trivial(u) ? 1 : 0;
    return out;
  }
  if (d >= 2 * g - 1) {
    out.dim = d - g + 1;
    return out;
  }
  if (d == 2 * g - 2) {
    // canonical class on a hyperelliptic curve: (g-1) fibers through a
    // branch point
    CurvePoint W0 = CurvePoint::hyper(data.curve.branch_points.at(0), 0.0);
    VectorXcd uk = 2.0 * double(g - 1) *
                   abel_map_base(data.curve, diffs, pd,
                                 data.marked.O.at(0), W0);
    out.dim = d - g + 1 + (near_trivial(u - uk) ? 1 : 0);
    return out;
  }
  if (d == g - 1) {
    VectorXcd K = riemann_constant(data.curve, diffs, pd, data.marked.O.at(0));
    ThetaParams tp;
    tp.tau = pd.tau;
    out.dim = std::abs(riemann_theta(u + K, tp)) <= 1e-5 ? 1 : 0;
    return out;
  }
  throw numeric_error("section dimension beyond genus two is unsupported");
}

MatrixXcd gram_matrix(const SpectralData& data, const WitnessFn& f,
                      const std::vector<RationalFn>& basis) {
  const int nb = static_cast<int>(basis.size());
  MatrixXcd G = MatrixXcd::Zero(nb, nb);
  for (const auto& o : data.marked.O) {
    cplx fj = f.eval(data.curve, o);
    VectorXcd vals(nb);
    for (int i = 0; i < nb; ++i) vals(i) = section_value(basis[i], o);
    G += fj * vals * vals.adjoint();
  }
  return G;
}

HermitianForm hermitian_form(const SpectralData& data) {
  HermitianForm out;
  out.witness = witness_function(data);

  for (const auto& t : data.line_divisor) {
    for (const auto& o : data.marked.O)
      if (t.point.close_to(o, kMatchTol))
        throw check_failure("bundle divisor meets the marked fiber");
    for (const auto& s : data.marked.S)
      if (t.point.close_to(s, kMatchTol))
        throw check_failure("bundle divisor meets the marked fiber");
  }

  if (data.curve.kind == CurveKind::rational) {
    out.basis = section_space(data, {}).basis;
    out.gram = gram_matrix(data, out.witness, out.basis);
    out.exact = false;
  } else {
    const int m = data.n() + 1;
    out.gram = MatrixXcd::Zero(m, m);
    for (int j = 0; j < m; ++j)
      out.gram(j, j) = out.witness.eval(data.curve, data.marked.O[j]);
    out.exact = true;
  }

  MatrixXcd H = 0.5 * (out.gram + out.gram.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(lo > 1e-10 * std::max(hi, 1.0)))
    throw check_failure("marked-fiber pairing is not positive definite");
  return out;
}

MatrixXcd htilde_form(const SpectralData& data,
                      const std::vector<RationalFn>& basis,
                      const VectorXcd& fiber_values) {
  const int m = data.n() + 1;
  if (fiber_values.size() != m)
    throw config_error("one fiber identification value per marked point");
  for (int j = 0; j < m; ++j)
    if (!(std::abs(fiber_values(j)) > 0.0))
      throw config_error("fiber identification values must be nonzero");

  if (basis.empty()) {
    MatrixXcd G = MatrixXcd::Zero(m, m);
    for (int j = 0; j < m; ++j)
      G(j, j) = 1.0 / std::norm(fiber_values(j));
    return G;
  }
  const int nb = static_cast<int>(basis.size());
  MatrixXcd G = MatrixXcd::Zero(nb, nb);
  for (int j = 0; j < m; ++j) {
    VectorXcd vals(nb);
    for (int i = 0; i < nb; ++i)
      vals(i) = section_value(basis[i], data.marked.O[j]);
    G += vals * vals.adjoint() / std::norm(fiber_values(j));
  }
  return G;
}

MatrixXcd direction_vectors(const SpectralData& data,
                            const std::vector<Differential>& diffs,
                            const PeriodData& pd) {
  const int dim = pd.g + pd.n;
  MatrixXcd U(dim, static_cast<int>(data.marked.P.size()));
  for (size_t m = 0; m < data.marked.P.size(); ++m) {
    VectorXcd raw = differential_values(data.curve, diffs, data.marked.P[m],
                                        data.marked.ram[m]);
    U.col(static_cast<int>(m)) = pd.to_coords(raw);
  }
  return U;
}

}  // namespace harmap
