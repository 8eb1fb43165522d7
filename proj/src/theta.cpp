#include "harmap/theta.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace harmap {

ThetaParams::ThetaParams(MatrixXcd t, double e) : tau(std::move(t)), eps(e) {
  if (tau.rows() != tau.cols()) throw config_error("theta: tau not square");
  if (eps <= 0) throw config_error("theta: eps must be positive");
  if (tau.rows() == 0) return;
  if ((tau - tau.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * (1.0 + tau.cwiseAbs().maxCoeff()))
    throw config_error("theta: tau not symmetric");
  MatrixXd Y = tau.imag();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es((Y + Y.transpose()) / 2.0);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw config_error("theta: Im(tau) not positive definite");
}

namespace {

double min_eig_imag(const MatrixXcd& tau) {
  MatrixXd Y = tau.imag();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es((Y + Y.transpose()) / 2.0);
  return es.eigenvalues().minCoeff();
}

// z = z0 + tau*m + mp with m = round((Im tau)^{-1} Im z); then
// theta(z) = exp(log_factor) * theta(z0),
// log_factor = -pi*i m^T tau m - 2 pi*i m^T z0.
struct Reduced {
  VectorXcd z0;
  VectorXd m;
  cplx log_factor;
};

Reduced reduce_argument(const VectorXcd& z, const MatrixXcd& tau) {
  const int g = static_cast<int>(z.size());
  Reduced r;
  if (g == 0) {
    r.z0 = z;
    r.m = VectorXd();
    r.log_factor = 0.0;
    return r;
  }
  MatrixXd Y = tau.imag();
  VectorXd mreal = Y.ldlt().solve(z.imag());
  r.m = mreal.array().round();
  VectorXcd zshift = z - tau * r.m.cast<cplx>();
  VectorXd mp(g);
  for (int i = 0; i < g; ++i) mp(i) = std::round(zshift(i).real());
  r.z0 = zshift - mp.cast<cplx>();
  cplx mTtaum = (r.m.cast<cplx>().transpose() * tau * r.m.cast<cplx>())(0, 0);
  cplx mTz0 = (r.m.cast<cplx>().transpose() * r.z0)(0, 0);
  r.log_factor = -kPi * kI * mTtaum - 2.0 * kPi * kI * mTz0;
  return r;
}

// Visit every integer vector in [-R, R]^g in lexicographic order.
template <typename F>
void for_each_lattice(int g, int R, F&& fn) {
  if (g == 0) {
    fn(VectorXd());
    return;
  }
  VectorXd m = VectorXd::Constant(g, -R);
  while (true) {
    fn(m);
    int i = g - 1;
    for (; i >= 0; --i) {
      if (m(i) < R) {
        m(i) += 1.0;
        for (int j = i + 1; j < g; ++j) m(j) = -R;
        break;
      }
    }
    if (i < 0) break;
  }
}

}  // namespace

int truncation_radius(const ThetaParams& params) {
  const int g = params.g();
  if (g == 0) return 0;
  const double sigma = min_eig_imag(params.tau);
  const double rootg = std::sqrt(static_cast<double>(g));
  // After reduction ||(Im tau)^{-1} Im z0||_inf <= 1/2; c0 bounds the shift of
  // the Gaussian peak in integer coordinates.
  const double c0 = 0.5 * rootg;
  double R = c0 + 1.0;
  while (R < 220.0) {
    double tail = std::exp(-kPi * sigma * (R - c0) * (R - c0)) *
                  std::pow(2.0 * R + 3.0, g);
    if (tail <= params.eps) break;
    R += 0.5;
  }
  return static_cast<int>(std::ceil(R / std::sqrt(std::min(sigma, 1.0))));
}

cplx theta_boxsum(const VectorXcd& z, const MatrixXcd& tau, int radius) {
  cplx acc = 0.0;
  for_each_lattice(static_cast<int>(z.size()), radius, [&](const VectorXd& m) {
    VectorXcd mc = m.cast<cplx>();
    cplx expo = kPi * kI * (mc.transpose() * tau * mc)(0, 0) +
                2.0 * kPi * kI * (mc.transpose() * z)(0, 0);
    acc += std::exp(expo);
  });
  return acc;
}

cplx riemann_theta(const VectorXcd& z, const ThetaParams& params) {
  if (z.size() != params.g()) throw config_error("theta: z dimension mismatch");
  Reduced r = reduce_argument(z, params.tau);
  int R = truncation_radius(params);
  cplx val = theta_boxsum(r.z0, params.tau, R);
  return std::exp(r.log_factor) * val;
}

VectorXcd riemann_theta_grad(const VectorXcd& z, const ThetaParams& params) {
  if (z.size() != params.g()) throw config_error("theta: z dimension mismatch");
  const int g = params.g();
  Reduced r = reduce_argument(z, params.tau);
  int R = truncation_radius(params);
  cplx theta0 = 0.0;
  VectorXcd grad0 = VectorXcd::Zero(g);
  for_each_lattice(g, R, [&](const VectorXd& m) {
    VectorXcd mc = m.cast<cplx>();
    cplx expo = kPi * kI * (mc.transpose() * params.tau * mc)(0, 0) +
                2.0 * kPi * kI * (mc.transpose() * r.z0)(0, 0);
    cplx term = std::exp(expo);
    theta0 += term;
    grad0 += (2.0 * kPi * kI * term) * mc;
  });
  // theta(z) = exp(L) theta0(z0), L = -pi i m^T tau m - 2 pi i m^T z0,
  // dz0/dz = I  =>  grad = exp(L) (grad0 - 2 pi i m theta0).
  cplx pref = std::exp(r.log_factor);
  if (g == 0) return VectorXcd();
  return pref * (grad0 - (2.0 * kPi * kI * theta0) * r.m.cast<cplx>());
}

cplx quasi_period_factor(const VectorXcd& z, const VectorXi& m,
                         const VectorXi& mprime, const ThetaParams& params) {
  (void)mprime;  // the integer shift m' contributes multiplier 1
  VectorXcd mc = m.cast<double>().cast<cplx>();
  cplx mTtaum = (mc.transpose() * params.tau * mc)(0, 0);
  cplx mTz = (mc.transpose() * z)(0, 0);
  return std::exp(-kPi * kI * mTtaum - 2.0 * kPi * kI * mTz);
}

}  // namespace harmap
