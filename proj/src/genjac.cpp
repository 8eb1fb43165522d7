#include "harmap/genjac.hpp"

#include <cmath>

namespace harmap {

MatrixXd GeneralizedLattice::realified() const {
  const int d = dim();
  const int r = rank();
  MatrixXd R(2 * d, r);
  R.topRows(d) = gens.real();
  R.bottomRows(d) = gens.imag();
  return R;
}

VectorXd GeneralizedLattice::coords(const VectorXcd& v) const {
  const int d = dim();
  VectorXd rv(2 * d);
  rv.head(d) = v.real();
  rv.tail(d) = v.imag();
  MatrixXd R = realified();
  // Least squares: the lattice generators are R-linearly independent, so this
  // recovers the exact coefficients for vectors in the span.
  return (R.transpose() * R).ldlt().solve(R.transpose() * rv);
}

ValidationReport GeneralizedLattice::validate(double tol_lattice) const {
  ValidationReport rep;
  const int d = dim();
  rep.add("lattice_shape",
          gens.rows() == d && gens.cols() == 2 * g + n && M.rows() == d &&
              M.cols() == d,
          "generator matrix is (g+n) x (2g+n) and M is square");

  MatrixXd R = realified();
  Eigen::JacobiSVD<MatrixXd> svd(R);
  double smin = svd.singularValues().size() > 0
                    ? svd.singularValues().minCoeff()
                    : 0.0;
  rep.add("lattice_rank", smin > tol_lattice,
          "generators R-linearly independent (smallest singular value " +
              std::to_string(smin) + ")");

  // The involution must be an antilinear involution: conj(M)*conj(M v) = v,
  // i.e. conj(M) M = I.
  double inv_err = (M.conjugate() * M - MatrixXcd::Identity(d, d)).norm();
  rep.add("involution_order_two", inv_err <= tol_lattice,
          "conj(M) * M = I, error " + std::to_string(inv_err));

  // The involution must map the lattice to itself: for each generator column
  // c, involution(c) reduces to an (near-)integer combination.
  double worst = 0.0;
  for (int j = 0; j < rank(); ++j) {
    VectorXcd img = involution(gens.col(j));
    VectorXd a = coords(img);
    VectorXd frac = a - a.array().round().matrix();
    worst = std::max(worst, frac.cwiseAbs().maxCoeff());
    // Also require the image to actually lie in the span.
    VectorXcd recon = gens * a.cast<cplx>();
    worst = std::max(worst, (recon - img).cwiseAbs().maxCoeff());
  }
  rep.add("involution_preserves_lattice", worst <= tol_lattice,
          "involution maps generators to integer combinations, error " +
              std::to_string(worst));
  return rep;
}

VectorXcd reduce_mod_lattice(const VectorXcd& v,
                             const GeneralizedLattice& lat) {
  VectorXd a = lat.coords(v);
  VectorXd m = a.array().round().matrix();
  return v - lat.gens * m.cast<cplx>();
}

double lattice_distance(const VectorXcd& v, const GeneralizedLattice& lat) {
  return reduce_mod_lattice(v, lat).norm();
}

FlowSpec FlowSpec::from_directions(const MatrixXcd& U,
                                   const GeneralizedLattice& lat) {
  FlowSpec f;
  f.U = U;
  f.conj_U = -(lat.M.conjugate() * U.conjugate());
  return f;
}

VectorXcd gamma_flow_raw(const FlowSpec& flow, const VectorXcd& z) {
  return flow.U * z + flow.conj_U * z.conjugate();
}

VectorXcd gamma_flow(const FlowSpec& flow, const VectorXcd& z,
                     const GeneralizedLattice& lat) {
  return reduce_mod_lattice(gamma_flow_raw(flow, z), lat);
}

bool is_real_point(const VectorXcd& p, const GeneralizedLattice& lat,
                   double tol) {
  return lattice_distance(p + lat.involution(p), lat) <= tol;
}

VectorXcd fiber_translate(const VectorXcd& p, const VectorXd& t,
                          const GeneralizedLattice& lat) {
  VectorXcd q = p;
  for (int j = 0; j < lat.n && j < t.size(); ++j) {
    q(lat.g + j) += cplx(t(j), 0.0);
  }
  return q;
}

}  // namespace harmap
