#pragma once

#include "harmap/spectral.hpp"
#include "harmap/theta.hpp"

namespace harmap {

// Base-adapted Riemann vector K: theta(A(P) - A(D) - K) vanishes for every
// point P of any non-special degree-g divisor D, with Abel maps taken from
// `base`.  Found as a half-period at a branch point by scanning all 4^g
// candidates against probe divisors, then shifted to the requested base.
// Throws numeric_error when the scan has no clear winner.
VectorXcd riemann_constant(const SpectralCurve& c,
                           const std::vector<Differential>& diffs,
                           const PeriodData& pd, const CurvePoint& base);

// Shift with theta(A(P) + kappa) = 0 on representatives of the degree-g
// class whose Abel image (same base as K) is u.
inline VectorXcd kappa_for_class(const VectorXcd& u, const VectorXcd& K) {
  return -u - K;
}

// Theta-function model of the map on rank-one grassmannian data.  The n+1
// homogeneous components at the flow point gamma in C^{g+n} are
//   v_0 = c_0 theta(gamma_base + kappa),
//   v_i = c_i exp(-2 pi i gamma_{g+i-1}) theta(gamma_base - d_i + kappa)
// where d_i is the base Abel image of O_{i+1} - O_1 and kappa the vanishing
// shift of the class A(line_divisor) - A(Qhat_j).  On a degenerate (genus
// zero) curve the theta factors collapse to 1 and only the fiber
// exponentials remain.  The projective class of v is lattice independent;
// the homogeneous vector itself is not.
struct ThetaMapEngine {
  SpectralData data;
  std::vector<Differential> diffs;
  PeriodData pd;
  FlowSpec flow;                  // gamma(z) = U z + conj_U conj(z), raw
  VectorXcd K;                    // Riemann vector from base O_1 (g >= 1)
  VectorXcd kappa;                // -u - K for u = A(D_L) - A(Qhat_j)
  std::vector<VectorXcd> shifts;  // d_i, i = 1..n
  VectorXd scales;                // c_0..c_n, positive; phases are gauge
  int g = 0;
  int n = 0;

  int directions() const { return static_cast<int>(flow.U.cols()); }
};

// Builds the engine: marked differentials, periods, flow directions, Riemann
// vector and vanishing shift for the designated zero of index which_zero.
// Throws config_error unless the target is a rank-one grassmannian.
ThetaMapEngine make_theta_engine(const SpectralData& data, int which_zero = 0);

// Homogeneous components at an explicit unreduced Jacobian point.
VectorXcd theta_components(const ThetaMapEngine& e, const VectorXcd& gamma);

// Components along the flow, z one entry per designated zero.
VectorXcd theta_map_point(const ThetaMapEngine& e, const VectorXcd& z);

// Same with the fiber part of gamma translated by the real vector t; this
// changes the map by the fixed diagonal unitary diag(1, e^{-2 pi i t_i}).
VectorXcd theta_map_point_translated(const ThetaMapEngine& e,
                                     const VectorXcd& z, const VectorXd& t);

// Normalized rank-one projection v v^* / |v|^2 of the map value.
MatrixXcd theta_projection(const ThetaMapEngine& e, const VectorXcd& z);

// Refinement-extrapolated commutator residual of the projection field with
// the given component scales, averaged over the sample.  The h^2 truncation
// term of the discrete Laplacian is cancelled between h and h/2, so the
// value isolates the scale-dependent part of the defect.
double calibration_objective(const ThetaMapEngine& e, const VectorXd& scales,
                             const std::vector<VectorXcd>& sample, double h);

struct CalibrationResult {
  VectorXd scales;                          // fitted, scales(0) = 1
  double residual = 0.0;                    // objective at the fit
  std::vector<std::pair<double, double>> curve;  // probed (scale, objective)
};

// Fits the positive component scales by minimizing the objective over the
// sample, one coordinate at a time on a log grid refined by golden-section.
// The leading scale is the projective gauge and stays at 1.  Throws
// check_failure when the minimized objective stays above the threshold.
CalibrationResult calibrate_constants(const ThetaMapEngine& e,
                                      const std::vector<VectorXcd>& sample,
                                      double h = 1e-2,
                                      double threshold = 1e-6);

}  // namespace harmap
