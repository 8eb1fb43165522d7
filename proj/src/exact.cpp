#include "harmap/exact.hpp"

#include <cmath>
#include <functional>

#include "harmap/linalg.hpp"

namespace harmap {
namespace {

cplx principal_root(cplx z, int r) {
  if (r == 1) return z;
  return std::exp(std::log(z) / static_cast<double>(r));
}

// Evaluation matrix of the basis at the fiber over lambda0: one row per
// fiber point, one column per section.
MatrixXcd fiber_evaluation(const SpectralCurve& c,
                           const std::vector<RationalFn>& basis, cplx lam,
                           std::vector<cplx>* coords) {
  auto pts = c.fiber(lam);
  const int m = static_cast<int>(pts.size());
  if (m != static_cast<int>(basis.size()))
    throw numeric_error("probe fiber is ramified or incomplete");
  MatrixXcd E(m, m);
  coords->clear();
  for (int i = 0; i < m; ++i) {
    if (pts[i].at_infinity)
      throw numeric_error("probe fiber touches infinity");
    coords->push_back(pts[i].coord);
    for (int j = 0; j < m; ++j) E(i, j) = basis[j].eval(pts[i].coord);
  }
  return E;
}

// Matrix of multiplication by the scalar function `values` (diagonal on the
// fiber) in the section basis.
MatrixXcd multiplication_matrix(const MatrixXcd& E,
                                const std::vector<cplx>& vals) {
  VectorXcd d(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) d(static_cast<int>(i)) = vals[i];
  return E.partialPivLu().solve(d.asDiagonal() * E);
}

// Recover the coefficients at the given two powers from probe evaluations
// and certify the ansatz on the remaining probes.
LaurentMatrix fit_two_powers(
    const std::function<MatrixXcd(cplx)>& op, int p_low, int p_high,
    const std::vector<cplx>& probes) {
  MatrixXcd M0 = op(probes[0]);
  MatrixXcd M1 = op(probes[1]);
  cplx x00 = std::pow(probes[0], p_low), x01 = std::pow(probes[0], p_high);
  cplx x10 = std::pow(probes[1], p_low), x11 = std::pow(probes[1], p_high);
  cplx det = x00 * x11 - x01 * x10;
  MatrixXcd lo = (x11 * M0 - x01 * M1) / det;
  MatrixXcd hi = (x00 * M1 - x10 * M0) / det;
  double scale = std::max({lo.norm(), hi.norm(), 1.0});
  for (size_t j = 2; j < probes.size(); ++j) {
    MatrixXcd pred = std::pow(probes[j], p_low) * lo +
                     std::pow(probes[j], p_high) * hi;
    if ((op(probes[j]) - pred).norm() > 1e-12 * scale)
      throw numeric_error("flow matrix is not a two-power loop");
  }
  LaurentMatrix L;
  if (lo.norm() > 1e-13 * scale) L[p_low] = lo;
  L[p_high] = hi;
  return L;
}

}  // namespace

MatrixXcd laurent_eval(const LaurentMatrix& L, cplx lambda) {
  MatrixXcd out;
  for (const auto& [p, M] : L) {
    MatrixXcd term = std::pow(lambda, p) * M;
    out = out.size() ? MatrixXcd(out + term) : term;
  }
  return out;
}

ExactEngine make_exact_engine(const SpectralData& data) {
  if (data.curve.kind != CurveKind::rational)
    throw config_error("exact synthesis needs a genus-zero curve");
  ExactEngine e;
  e.data = data;
  const int n = data.n();

  auto V = section_space(data, data.marked.D_inf);
  Divisor pdiv;
  for (const auto& p : data.marked.P) pdiv.push_back({p, 1});
  auto Vc = section_space(data, pdiv);
  if (V.dim != data.k || V.dim + Vc.dim != n + 1)
    throw numeric_error("section dimensions do not split along the plane");

  std::vector<RationalFn> raw = V.basis;
  raw.insert(raw.end(), Vc.basis.begin(), Vc.basis.end());
  auto wf = witness_function(data);
  MatrixXcd G = gram_matrix(data, wf, raw);
  double gs = G.norm();
  if (G.block(0, data.k, data.k, n + 1 - data.k).norm() > 1e-10 * gs)
    throw numeric_error("plane split is not orthogonal in the pairing");

  // h-orthonormalize inside each block; this keeps the splitting and makes
  // the pairing the identity
  MatrixXcd T = MatrixXcd::Zero(n + 1, n + 1);
  auto put_block = [&](int off, int sz) {
    Eigen::LLT<MatrixXcd> llt(G.block(off, off, sz, sz));
    if (llt.info() != Eigen::Success)
      throw check_failure("marked-fiber pairing is not positive definite");
    MatrixXcd L = llt.matrixL();
    T.block(off, off, sz, sz) =
        L.adjoint().triangularView<Eigen::Upper>().solve(
            MatrixXcd::Identity(sz, sz));
  };
  put_block(0, data.k);
  put_block(data.k, n + 1 - data.k);

  for (int j = 0; j <= n; ++j) {
    Poly num;
    for (int i = 0; i <= n; ++i) num = num + T(i, j) * raw[i].num;
    e.basis.push_back(RationalFn(num, raw[j].den));
  }
  e.gram = gram_matrix(data, wf, e.basis);
  if ((e.gram - MatrixXcd::Identity(n + 1, n + 1)).norm() > 1e-10)
    throw numeric_error("orthonormalization failed");

  // scalar generators
  for (size_t m = 0; m < data.marked.P.size(); ++m) {
    const cplx p = data.marked.P[m].coord;
    const int r = data.marked.ram[m];
    RationalFn d = data.curve.lambda;
    for (int j = 0; j < r; ++j) d = d.deriv();
    double fact = 1.0;
    for (int j = 2; j <= r; ++j) fact *= j;
    cplx lam_r = d.eval(p) / fact;                       // lambda^(r)/r!
    cplx lam_r1 = d.deriv().eval(p) / (fact * (r + 1));  // next coefficient
    FlowGenerator nu;
    nu.pole = p;
    nu.strength = principal_root(1.0 / lam_r, r);
    if (data.target == TargetKind::grassmannian) {
      nu.shift = -lam_r1 * nu.strength / (cplx(double(r)) * lam_r);
    } else {
      cplx s = 0.0;
      for (const auto& o : data.marked.O) s += nu.strength / (o.coord - p);
      nu.shift = -s / double(n + 1);
    }
    e.nu.push_back(nu);
  }

  // Laurent coefficients from dyadic probes; lambda = -2 certifies the
  // two-power ansatz
  const std::vector<cplx> probes{4.0, 0.25, -2.0};
  for (const auto& nu : e.nu) {
    auto op = [&](cplx lam) {
      std::vector<cplx> ws;
      MatrixXcd E = fiber_evaluation(data.curve, e.basis, lam, &ws);
      std::vector<cplx> vals;
      for (cplx w : ws) vals.push_back(nu.eval(w));
      return multiplication_matrix(E, vals);
    };
    auto op_star = [&](cplx lam) {
      std::vector<cplx> ws;
      MatrixXcd E = fiber_evaluation(data.curve, e.basis, lam, &ws);
      std::vector<cplx> vals;
      for (cplx w : ws) vals.push_back(nu.eval_star(w));
      return multiplication_matrix(E, vals);
    };
    e.A.push_back(fit_two_powers(op, -1, 0, probes));
    e.conjA.push_back(fit_two_powers(op_star, 1, 0, probes));
  }
  return e;
}

MatrixXcd frame(const ExactEngine& e, const VectorXcd& z, cplx lambda) {
  if (z.size() != static_cast<int>(e.A.size()))
    throw config_error("one flow time per designated zero");
  MatrixXcd M = MatrixXcd::Zero(e.size(), e.size());
  for (int m = 0; m < z.size(); ++m) {
    M += z(m) * laurent_eval(e.A[m], lambda);
    M -= std::conj(z(m)) * laurent_eval(e.conjA[m], lambda);
  }
  return expm(M);
}

MatrixXcd grassmannian_map(const ExactEngine& e, const VectorXcd& z) {
  MatrixXcd F = frame(e, z, 1.0);
  MatrixXcd P = MatrixXcd::Zero(e.size(), e.size());
  P.topLeftCorner(e.data.k, e.data.k) =
      MatrixXcd::Identity(e.data.k, e.data.k);
  return F * P * F.inverse();
}

MatrixXcd pu_map(const ExactEngine& e, const VectorXcd& z) {
  return frame(e, z, -1.0) * frame(e, z, 1.0).inverse();
}

namespace {
MatrixXcd coeff_or_zero(const LaurentMatrix& L, int p, int sz) {
  auto it = L.find(p);
  return it == L.end() ? MatrixXcd::Zero(sz, sz) : it->second;
}
}  // namespace

cplx conformality_certificate(const ExactEngine& e, int m) {
  MatrixXcd a0 = coeff_or_zero(e.A.at(m), 0, e.size());
  MatrixXcd am = coeff_or_zero(e.A.at(m), -1, e.size());
  return 2.0 * (a0 * am).trace();
}

cplx pu_certificate(const ExactEngine& e, int m) {
  MatrixXcd am = coeff_or_zero(e.A.at(m), -1, e.size());
  return (am * am).trace();
}

}  // namespace harmap
