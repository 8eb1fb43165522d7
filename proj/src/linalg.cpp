#include "harmap/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>

namespace harmap {

// Pade(13,13) numerator coefficients for exp, b[0] + b[1] x + ... (Higham's
// scaling-and-squaring method, order fixed for determinism).
static const double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

MatrixXcd expm(const MatrixXcd& A) {
  const Eigen::Index n = A.rows();
  const double theta13 = 5.371920351148152;  // Pade-13 validity radius
  double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();  // induced inf-norm
  int s = 0;
  if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
  MatrixXcd As = A / std::pow(2.0, s);

  MatrixXcd I = MatrixXcd::Identity(n, n);
  MatrixXcd A2 = As * As;
  MatrixXcd A4 = A2 * A2;
  MatrixXcd A6 = A2 * A4;
  const double* b = kPade13;
  MatrixXcd U = As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) +
                      b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  MatrixXcd V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) +
                b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  MatrixXcd F = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < s; ++i) F = F * F;
  return F;
}

MatrixXcd nullspace(const MatrixXcd& A, double tol) {
  Eigen::JacobiSVD<MatrixXcd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(smax, 1.0)) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

MatrixXcd polar_unitary(const MatrixXcd& A) {
  Eigen::JacobiSVD<MatrixXcd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double fs_distance(const VectorXcd& u, const VectorXcd& v) {
  double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw numeric_error("fs_distance: zero vector");
  // Angle via the sine (residual after projection): accurate near zero, where
  // the tight tolerances live; acos of the overlap loses half the digits there.
  VectorXcd un = u / nu, vn = v / nv;
  double s = (vn - un * (un.dot(vn))).norm();
  if (s > 1.0) s = 1.0;
  return std::asin(s);
}

double subspace_distance(const MatrixXcd& U, const MatrixXcd& V) {
  Eigen::HouseholderQR<MatrixXcd> qu(U), qv(V);
  MatrixXcd Qu = qu.householderQ() * MatrixXcd::Identity(U.rows(), U.cols());
  MatrixXcd Qv = qv.householderQ() * MatrixXcd::Identity(V.rows(), V.cols());
  // sin of the largest principal angle
  MatrixXcd R = Qv - Qu * (Qu.adjoint() * Qv);
  Eigen::JacobiSVD<MatrixXcd> svd(R);
  double s = svd.singularValues().maxCoeff();
  if (s > 1.0) s = 1.0;
  return std::asin(s);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string(buf);
}

}  // namespace harmap
