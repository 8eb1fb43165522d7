#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "harmap/common.hpp"

namespace harmap {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Eigen::VectorXi;

// Matrix exponential by scaling and squaring with a fixed Pade(13,13)
// approximant.  Deterministic: no balancing, no norm-dependent order switch.
MatrixXcd expm(const MatrixXcd& A);

// Orthonormal basis of the (numerical) nullspace, columns; singular values
// below tol * s_max count as zero.
MatrixXcd nullspace(const MatrixXcd& A, double tol = 1e-12);

// Unitary polar factor of A (A = U * P with P Hermitian psd).
MatrixXcd polar_unitary(const MatrixXcd& A);

// Fubini-Study distance between the lines spanned by nonzero u and v.
double fs_distance(const VectorXcd& u, const VectorXcd& v);

// Largest principal-angle distance between the column spans of two full-rank
// (n x k) matrices: acos of the smallest singular value of Qu* Qv.
double subspace_distance(const MatrixXcd& U, const MatrixXcd& V);

// FNV-1a 64-bit hash of a byte string, as fixed-width lowercase hex.
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace harmap
