#include "harmap/verify.hpp"

#include <algorithm>
#include <cmath>

namespace harmap {

namespace {

MatrixXcd lcoeff(const LaurentMatrix& L, int p, int m) {
  auto it = L.find(p);
  return it == L.end() ? MatrixXcd::Zero(m, m) : it->second;
}

double laurent_scale(const ExactEngine& e) {
  double s = 1.0;
  for (const auto& L : e.A)
    for (const auto& kv : L) s = std::max(s, kv.second.norm());
  for (const auto& L : e.conjA)
    for (const auto& kv : L) s = std::max(s, kv.second.norm());
  return s;
}

// Position of the largest entry, for locating a violation in a report.
std::string locate(const MatrixXcd& M, int row0 = 0, int col0 = 0) {
  int bi = 0, bj = 0;
  double best = -1.0;
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      if (std::abs(M(i, j)) > best) {
        best = std::abs(M(i, j));
        bi = i;
        bj = j;
      }
  return "worst entry (" + std::to_string(row0 + bi) + "," +
         std::to_string(col0 + bj) + ") magnitude " + std::to_string(best);
}

VectorXd realify(const VectorXcd& v) {
  VectorXd out(2 * v.size());
  for (int i = 0; i < v.size(); ++i) {
    out(2 * i) = v(i).real();
    out(2 * i + 1) = v(i).imag();
  }
  return out;
}

double slope_fit(const std::vector<double>& h, const std::vector<double>& r) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = static_cast<int>(h.size());
  for (int i = 0; i < n; ++i) {
    double x = std::log(h[i]), y = std::log(r[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ValidationReport loop_structure_check(const ExactEngine& e, double tol) {
  ValidationReport rep;
  const int m = e.size();
  const int nd = static_cast<int>(e.A.size());
  const double gate = tol * laurent_scale(e);
  auto add = [&](const std::string& name, bool pass, const std::string& det) {
    rep.add(name, pass, pass ? "" : det);
  };

  bool sup_ok = true;
  std::string sup_det;
  for (int d = 0; d < nd; ++d) {
    for (const auto& kv : e.A[d])
      if ((kv.first < -1 || kv.first > 0) && kv.second.norm() > gate) {
        sup_ok = false;
        sup_det = "direction " + std::to_string(d) +
                  ", flow coefficient at power " + std::to_string(kv.first);
      }
    for (const auto& kv : e.conjA[d])
      if ((kv.first < 0 || kv.first > 1) && kv.second.norm() > gate) {
        sup_ok = false;
        sup_det = "direction " + std::to_string(d) +
                  ", conjugate coefficient at power " +
                  std::to_string(kv.first);
      }
  }
  add("laurent support", sup_ok, sup_det);

  double rad = 0.0;
  for (int d = 0; d < nd; ++d) {
    MatrixXcd am = lcoeff(e.A[d], -1, m), a0 = lcoeff(e.A[d], 0, m);
    MatrixXcd b0 = lcoeff(e.conjA[d], 0, m), bp = lcoeff(e.conjA[d], 1, m);
    rad = std::max(rad, (b0 - a0.adjoint()).norm());
    rad = std::max(rad, (bp - am.adjoint()).norm());
  }
  add("adjoint reality", rad <= gate, "adjoint mismatch " + std::to_string(rad));

  if (e.data.target == TargetKind::grassmannian) {
    const int k = e.data.k;

    double pole_worst = 0.0, const_worst = 0.0;
    std::string pole_det, const_det;
    for (int d = 0; d < nd; ++d) {
      MatrixXcd am = lcoeff(e.A[d], -1, m);
      MatrixXcd off = am;
      off.bottomLeftCorner(m - k, k).setZero();
      if (off.norm() > pole_worst) {
        pole_worst = off.norm();
        pole_det = "direction " + std::to_string(d) + ": " + locate(off);
      }
      MatrixXcd low = lcoeff(e.A[d], 0, m).bottomLeftCorner(m - k, k);
      if (low.norm() > const_worst) {
        const_worst = low.norm();
        const_det = "direction " + std::to_string(d) + ": " + locate(low, k, 0);
      }
    }
    add("pole block triangular", pole_worst <= gate, pole_det);
    add("constant block upper", const_worst <= gate, const_det);

    // conjugated form: with lambda = zeta^2 and T = diag(I_k, zeta I),
    // T A(zeta^2) T^{-1} must equal zeta^{-1} A_m1 + A_0 with A_m1 carrying
    // only the off-diagonal blocks
    double worst = 0.0, offdiag = 0.0;
    const cplx zetas[3] = {cplx(0.7, 0.4), cplx(-1.3, 0.25), cplx(2.0, -1.0)};
    for (int d = 0; d < nd; ++d) {
      MatrixXcd am = lcoeff(e.A[d], -1, m), a0 = lcoeff(e.A[d], 0, m);
      MatrixXcd Am1 = am;
      Am1.topRightCorner(k, m - k) = a0.topRightCorner(k, m - k);
      MatrixXcd A0 = MatrixXcd::Zero(m, m);
      A0.topLeftCorner(k, k) = a0.topLeftCorner(k, k);
      A0.bottomRightCorner(m - k, m - k) = a0.bottomRightCorner(m - k, m - k);
      for (const cplx& zeta : zetas) {
        MatrixXcd T = MatrixXcd::Identity(m, m);
        for (int i = k; i < m; ++i) T(i, i) = zeta;
        MatrixXcd lhs = T * laurent_eval(e.A[d], zeta * zeta) * T.inverse();
        worst = std::max(worst, (lhs - Am1 / zeta - A0).norm());
      }
      offdiag = std::max(offdiag, Am1.topLeftCorner(k, k).norm() +
                                      Am1.bottomRightCorner(m - k, m - k).norm());
    }
    add("twisted form collapses", worst <= 10.0 * gate && offdiag <= gate,
        "conjugation residual " + std::to_string(worst) + ", diagonal leak " +
            std::to_string(offdiag));
  } else {
    double tr_worst = 0.0, fac_worst = 0.0;
    const cplx probes[2] = {cplx(2.3, 0.4), cplx(-1.7, 0.9)};
    for (int d = 0; d < nd; ++d) {
      MatrixXcd am = lcoeff(e.A[d], -1, m);
      MatrixXcd A1 = am + lcoeff(e.A[d], 0, m);  // value at lambda = 1
      tr_worst = std::max(tr_worst, std::abs(A1.trace()));
      // the lambda-dependence must be a multiple of 1 - lambda^{-1}
      for (const cplx& lam : probes)
        fac_worst = std::max(
            fac_worst,
            (laurent_eval(e.A[d], lam) - A1 + (1.0 - 1.0 / lam) * am).norm());
    }
    add("identity fiber trace", tr_worst <= gate,
        "trace " + std::to_string(tr_worst));
    add("pole factorization", fac_worst <= 10.0 * gate,
        "factorization residual " + std::to_string(fac_worst));
  }
  return rep;
}

MatrixXcd laplace_commutator(const MatrixField& pi, cplx z, double h) {
  MatrixXcd c = pi(z);
  MatrixXcd lap = pi(z + h) + pi(z - h) + pi(z + cplx(0.0, h)) +
                  pi(z - cplx(0.0, h)) - 4.0 * c;
  lap /= h * h;
  return lap * c - c * lap;
}

double commutator_residual(const MatrixField& pi, cplx z, double h) {
  return laplace_commutator(pi, z, h).norm();
}

MatrixXcd group_defect(const MatrixField& psi, cplx z, double h) {
  // connection pair (Psi^{-1} dbar Psi, Psi^{-1} d Psi) by central
  // differences, then the outer derivatives of those fields
  auto conn = [&](cplx w) {
    MatrixXcd dxv = (psi(w + h) - psi(w - h)) / (2.0 * h);
    MatrixXcd dyv = (psi(w + cplx(0.0, h)) - psi(w - cplx(0.0, h))) / (2.0 * h);
    MatrixXcd inv = psi(w).inverse();
    return std::make_pair(MatrixXcd(inv * 0.5 * (dxv + kI * dyv)),
                          MatrixXcd(inv * 0.5 * (dxv - kI * dyv)));
  };
  auto gx1 = conn(z + h), gx0 = conn(z - h);
  auto gy1 = conn(z + cplx(0.0, h)), gy0 = conn(z - cplx(0.0, h));
  MatrixXcd d_of_dbar =
      ((gx1.first - gx0.first) - kI * (gy1.first - gy0.first)) / (4.0 * h);
  MatrixXcd dbar_of_d =
      ((gx1.second - gx0.second) + kI * (gy1.second - gy0.second)) / (4.0 * h);
  return d_of_dbar + dbar_of_d;
}

namespace {

ResidualReport residual_ladder(
    const std::function<double(cplx, double)>& node_residual,
    const std::vector<cplx>& nodes, const std::vector<double>& ladder,
    double tol) {
  if (nodes.size() < 3) throw config_error("residual grid too coarse");
  if (ladder.empty()) throw config_error("empty refinement ladder");
  ResidualReport rep;
  rep.h = ladder;
  std::sort(rep.h.begin(), rep.h.end(), std::greater<double>());
  for (double h : rep.h) {
    double sup = 0.0, mean = 0.0;
    for (cplx z : nodes) {
      double r = node_residual(z, h);
      sup = std::max(sup, r);
      mean += r;
    }
    rep.sup.push_back(sup);
    rep.mean.push_back(mean / double(nodes.size()));
  }
  bool positive = true;
  for (double s : rep.sup) positive = positive && s > 0.0;
  if (rep.h.size() >= 3 && positive) {
    rep.slope = slope_fit(rep.h, rep.sup);
    rep.has_slope = true;
  }
  rep.pass = rep.sup.back() <= tol;
  return rep;
}

}  // namespace

ResidualReport harmonicity_residual(const MatrixField& pi,
                                    const std::vector<cplx>& nodes,
                                    const std::vector<double>& ladder,
                                    double tol) {
  return residual_ladder(
      [&](cplx z, double h) { return commutator_residual(pi, z, h); }, nodes,
      ladder, tol);
}

ResidualReport group_harmonicity_residual(const MatrixField& psi,
                                          const std::vector<cplx>& nodes,
                                          const std::vector<double>& ladder,
                                          double tol) {
  return residual_ladder(
      [&](cplx z, double h) { return group_defect(psi, z, h).norm(); }, nodes,
      ladder, tol);
}

namespace {

cplx conformality_raw(const MatrixField& pi, cplx z, double h) {
  MatrixXcd dxv = (pi(z + h) - pi(z - h)) / (2.0 * h);
  MatrixXcd dyv = (pi(z + cplx(0.0, h)) - pi(z - cplx(0.0, h))) / (2.0 * h);
  MatrixXcd dz = 0.5 * (dxv - kI * dyv);
  return (dz * dz).trace();
}

}  // namespace

cplx conformality_value(const MatrixField& pi, cplx z, double h) {
  return (4.0 * conformality_raw(pi, z, h / 2) - conformality_raw(pi, z, h)) /
         3.0;
}

ConjugatorFit fit_conjugator(const std::vector<MatrixXcd>& from,
                             const std::vector<MatrixXcd>& to) {
  if (from.empty() || from.size() != to.size())
    throw config_error("conjugator fit needs matched nonempty samples");
  const int m = static_cast<int>(from[0].rows());
  const int mm = m * m;
  MatrixXcd K = MatrixXcd::Zero(static_cast<int>(from.size()) * mm, mm);
  for (size_t s = 0; s < from.size(); ++s) {
    const MatrixXcd& A = to[s];
    const MatrixXcd& B = from[s];
    int r0 = static_cast<int>(s) * mm;
    // vec(A W - W B) = (I kron A - B^T kron I) vec(W), column-major vec
    for (int j = 0; j < m; ++j) {
      K.block(r0 + j * m, j * m, m, m) += A;
      for (int q = 0; q < m; ++q)
        K.block(r0 + j * m, q * m, m, m) -=
            B(q, j) * MatrixXcd::Identity(m, m);
    }
  }
  Eigen::JacobiSVD<MatrixXcd> svd(K, Eigen::ComputeThinV);
  VectorXcd w = svd.matrixV().col(mm - 1);
  MatrixXcd W0 = Eigen::Map<const MatrixXcd>(w.data(), m, m);

  Eigen::JacobiSVD<MatrixXcd> pol(W0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ConjugatorFit fit;
  fit.W = pol.matrixU() * pol.matrixV().adjoint();

  // phase normalization: largest entry real positive
  int bi = 0, bj = 0;
  double best = -1.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (std::abs(fit.W(i, j)) > best) {
        best = std::abs(fit.W(i, j));
        bi = i;
        bj = j;
      }
  fit.W *= std::conj(fit.W(bi, bj)) / std::abs(fit.W(bi, bj));

  for (size_t s = 0; s < from.size(); ++s)
    fit.defect = std::max(
        fit.defect, (to[s] - fit.W * from[s] * fit.W.adjoint()).norm());
  fit.sigma_ratio = svd.singularValues()(mm - 1) /
                    std::max(svd.singularValues()(0), 1e-300);
  return fit;
}

ConjugatorFit equivariance_fit(const MatrixField& pi, cplx step,
                               const std::vector<cplx>& nodes) {
  std::vector<MatrixXcd> from, to;
  for (cplx z : nodes) {
    from.push_back(pi(z));
    to.push_back(pi(z + step));
  }
  return fit_conjugator(from, to);
}

DirectionSplit equivariance_directions(const FlowSpec& flow, int g,
                                       double rel_tol) {
  const int k = static_cast<int>(flow.U.cols());
  DirectionSplit out;
  out.displacement = MatrixXd::Zero(2 * g, 2 * k);
  for (int m = 0; m < k; ++m) {
    VectorXcd d1 = flow.U.col(m).head(g) + flow.conj_U.col(m).head(g);
    VectorXcd d2 = kI * (flow.U.col(m).head(g) - flow.conj_U.col(m).head(g));
    out.displacement.col(2 * m) = realify(d1);
    out.displacement.col(2 * m + 1) = realify(d2);
  }
  if (g == 0) {
    out.total = true;
    for (int j = 0; j < 2 * k; ++j)
      out.kernel.push_back(VectorXd::Unit(2 * k, j));
    return out;
  }
  Eigen::JacobiSVD<MatrixXd> svd(out.displacement, Eigen::ComputeFullV);
  out.singulars = svd.singularValues();
  double smax = out.singulars.size() ? out.singulars(0) : 0.0;
  double gate = rel_tol * std::max(smax, 1e-12);
  for (int j = 0; j < 2 * k; ++j) {
    double s = j < out.singulars.size() ? out.singulars(j) : 0.0;
    if (s <= gate) out.kernel.push_back(svd.matrixV().col(j));
  }
  out.total = static_cast<int>(out.kernel.size()) == 2 * k;
  return out;
}

double fubini_study(const MatrixXcd& P, const MatrixXcd& Q, int k) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> e1(P), e2(Q);
  MatrixXcd B1 = e1.eigenvectors().rightCols(k);
  MatrixXcd B2 = e2.eigenvectors().rightCols(k);
  Eigen::JacobiSVD<MatrixXcd> svd(B1.adjoint() * B2);
  double d2 = 0.0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    double c = std::min(1.0, std::max(0.0, svd.singularValues()(i)));
    double a = std::acos(c);
    d2 += a * a;
  }
  return std::sqrt(d2);
}

IsometryReport isometry_check(const std::vector<MatrixXcd>& a,
                              const std::vector<MatrixXcd>& b, int k) {
  IsometryReport rep;
  rep.fit = fit_conjugator(a, b);
  for (size_t s = 0; s < a.size(); ++s)
    rep.max_fs = std::max(
        rep.max_fs,
        fubini_study(rep.fit.W * a[s] * rep.fit.W.adjoint(), b[s], k));
  return rep;
}

RationalWitness rational_relation(double x, int Q) {
  // continued-fraction convergents are the best approximations, so testing
  // them against the quality bound is exhaustive
  long p0 = 1, q0 = 0;
  long p1 = static_cast<long>(std::floor(x)), q1 = 1;
  double frac = x - std::floor(x);
  for (int it = 0; it < 64; ++it) {
    if (std::abs(x - double(p1) / double(q1)) <= 1e-7 / (double(q1) * q1))
      return {p1, q1};
    if (frac < 1e-12) break;
    double inv = 1.0 / frac;
    long a = static_cast<long>(std::floor(inv));
    frac = inv - std::floor(inv);
    long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > Q) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return {0, 0};
}

AlgebraicType classify_algebraic(const SpectralData& data,
                                 const PeriodData& pd, const FlowSpec& flow,
                                 int Q) {
  const int g = pd.g;
  if (g == 0)
    return {"A", "rational spectral curve; the flow closes in a product of "
                 "punctured planes"};
  if (g == 1 && data.curve.kind == CurveKind::hyperelliptic)
    return {"B", "hyperelliptic genus-one curve with degree-two projection; "
                 "the generalized Jacobian has complex dimension two"};

  // The flow plane in lattice coordinates: columns are the images of the
  // real directions 1 and i.  Double periodicity means the plane carries two
  // independent integer points; candidates are enumerated through the best
  // conditioned pair of coordinate rows with entries bounded by Q.
  for (int m = 0; m < flow.U.cols(); ++m) {
    VectorXd c1 = pd.lattice.coords(
        VectorXcd(flow.U.col(m) + flow.conj_U.col(m)));
    VectorXd ci = pd.lattice.coords(
        VectorXcd(kI * (flow.U.col(m) - flow.conj_U.col(m))));
    const int r = static_cast<int>(c1.size());
    MatrixXd C(r, 2);
    C.col(0) = c1;
    C.col(1) = ci;

    int r1 = 0, r2 = 1;
    double bestdet = -1.0;
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j) {
        double det = std::abs(C(i, 0) * C(j, 1) - C(i, 1) * C(j, 0));
        if (det > bestdet) {
          bestdet = det;
          r1 = i;
          r2 = j;
        }
      }
    if (bestdet < 1e-12)
      return {"none", "flow direction " + std::to_string(m) +
                          " spans no plane in lattice coordinates"};

    Eigen::Matrix2d S;
    S << C(r1, 0), C(r1, 1), C(r2, 0), C(r2, 1);
    Eigen::Matrix2d Sinv = S.inverse();

    std::vector<Eigen::Vector2d> found;
    bool independent = false;
    for (int m1 = -Q; m1 <= Q && !independent; ++m1)
      for (int m2 = -Q; m2 <= Q; ++m2) {
        if (m1 == 0 && m2 == 0) continue;
        Eigen::Vector2d z = Sinv * Eigen::Vector2d(m1, m2);
        VectorXd full = C * z;
        double worst = 0.0;
        for (int i = 0; i < r; ++i)
          worst = std::max(worst, std::abs(full(i) - std::round(full(i))));
        if (worst > 1e-6) continue;
        for (const auto& prev : found)
          if (std::abs(prev(0) * z(1) - prev(1) * z(0)) >=
              1e-3 * prev.norm() * z.norm()) {
            independent = true;
            break;
          }
        found.push_back(z);
        if (independent) break;
      }
    if (!independent)
      return {"none", "no pair of independent integer points with entries "
                      "bounded by " +
                          std::to_string(Q) +
                          " on the flow plane in lattice coordinates"};
  }
  return {"C", "the flow plane is doubly periodic modulo the full lattice"};
}

namespace {

struct PatternResult {
  double x = 0.0, y = 0.0, d = 0.0;
};

PatternResult pattern_refine(const std::function<double(double, double)>& f,
                             double x, double y,
                             const std::vector<VectorXd>& dirs, double step) {
  double d = f(x, y);
  while (step > 1e-12) {
    bool moved = false;
    for (const VectorXd& v : dirs) {
      for (double sgn : {1.0, -1.0}) {
        double nx = x + sgn * step * v(0), ny = y + sgn * step * v(1);
        double nd = f(nx, ny);
        if (nd < d) {
          x = nx;
          y = ny;
          d = nd;
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
    if (d < 1e-13) break;
  }
  return {x, y, d};
}

}  // namespace

PeriodSearchReport periodicity_search(const FlowSpec& flow,
                                      const GeneralizedLattice& lat,
                                      double box, double coarse, double tol) {
  if (flow.U.cols() != 1)
    throw config_error("period search covers a single flow direction");
  PeriodSearchReport rep;

  auto dist = [&](double sx, double sy) {
    VectorXcd z(1);
    z(0) = cplx(sx, sy);
    return lattice_distance(gamma_flow_raw(flow, z), lat);
  };

  VectorXcd d1 = flow.U.col(0) + flow.conj_U.col(0);
  VectorXcd d2 = kI * (flow.U.col(0) - flow.conj_U.col(0));
  MatrixXd D(2 * d1.size(), 2);
  D.col(0) = realify(d1);
  D.col(1) = realify(d2);
  Eigen::JacobiSVD<MatrixXd> svd(D, Eigen::ComputeFullV);
  double smax = svd.singularValues()(0);
  std::vector<VectorXd> active;
  for (int j = 0; j < 2; ++j) {
    double s = j < svd.singularValues().size() ? svd.singularValues()(j) : 0.0;
    if (s <= 1e-9 * std::max(1.0, smax))
      rep.degenerate.push_back(svd.matrixV().col(j));
    else
      active.push_back(svd.matrixV().col(j));
  }
  if (active.empty()) return rep;

  std::vector<PatternResult> hits;
  const int steps = static_cast<int>(std::floor(box / coarse));
  if (active.size() == 1) {
    const VectorXd& v = active[0];
    std::vector<double> vals(2 * steps + 1);
    for (int i = -steps; i <= steps; ++i)
      vals[static_cast<size_t>(i + steps)] = dist(i * coarse * v(0), i * coarse * v(1));
    for (int i = 1; i < 2 * steps; ++i)
      if (vals[i] < 0.4 && vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1])
        hits.push_back(pattern_refine(dist, (i - steps) * coarse * v(0),
                                      (i - steps) * coarse * v(1), active,
                                      coarse));
  } else {
    const int nsz = 2 * steps + 1;
    MatrixXd vals(nsz, nsz);
    for (int i = -steps; i <= steps; ++i)
      for (int j = -steps; j <= steps; ++j)
        vals(i + steps, j + steps) = dist(i * coarse, j * coarse);
    for (int i = 1; i < nsz - 1; ++i)
      for (int j = 1; j < nsz - 1; ++j) {
        double v = vals(i, j);
        if (v >= 0.4) continue;
        bool isMin = true;
        for (int di = -1; di <= 1 && isMin; ++di)
          for (int dj = -1; dj <= 1; ++dj)
            if (vals(i + di, j + dj) < v) {
              isMin = false;
              break;
            }
        if (isMin)
          hits.push_back(pattern_refine(dist, (i - steps) * coarse,
                                        (j - steps) * coarse, active, coarse));
      }
  }

  for (const auto& hit : hits) {
    if (hit.d > tol) continue;
    double norm = std::hypot(hit.x, hit.y);
    if (norm <= 1e-6) continue;
    bool dup = false;
    for (auto& kept : rep.periods)
      if (std::hypot(kept.x - hit.x, kept.y - hit.y) <= 1e-5) {
        dup = true;
        if (hit.d < kept.defect) kept = {hit.x, hit.y, hit.d};
        break;
      }
    if (!dup) rep.periods.push_back({hit.x, hit.y, hit.d});
  }
  std::sort(rep.periods.begin(), rep.periods.end(),
            [](const PeriodHit& a, const PeriodHit& b) {
              double na = std::hypot(a.x, a.y), nb = std::hypot(b.x, b.y);
              if (std::abs(na - nb) > 1e-12) return na < nb;
              if (a.x != b.x) return a.x < b.x;
              return a.y < b.y;
            });

  for (size_t i = 0; i < rep.periods.size() && !rep.torus; ++i)
    for (size_t j = i + 1; j < rep.periods.size(); ++j) {
      const auto& a = rep.periods[i];
      const auto& b = rep.periods[j];
      double cross = std::abs(a.x * b.y - a.y * b.x);
      if (cross >= 1e-3 * std::hypot(a.x, a.y) * std::hypot(b.x, b.y)) {
        rep.torus = true;
        break;
      }
    }
  return rep;
}

}  // namespace harmap
