#pragma once

#include <map>

#include "harmap/spectral.hpp"

namespace harmap {

// Matrix-valued Laurent polynomial in lambda, power -> coefficient.
using LaurentMatrix = std::map<int, MatrixXcd>;

MatrixXcd laurent_eval(const LaurentMatrix& L, cplx lambda);

// Scalar flow generator nu_m = a/(w - p) + b: simple pole at the designated
// zero, principal part 1/zeta in the adapted root of lambda, additive
// constant fixed by the gauge (zero next term at the pole for plane flows,
// zero trace over the lambda = 1 fiber for the projective-unitary ones).
struct FlowGenerator {
  cplx pole;
  cplx strength;  // dw/dzeta at the pole
  cplx shift;

  cplx eval(cplx w) const { return strength / (w - pole) + shift; }
  // conj(nu(1/conj(w))): the involution-transported generator
  cplx eval_star(cplx w) const {
    return std::conj(strength) * w / (1.0 - std::conj(pole) * w) +
           std::conj(shift);
  }
};

// Multiplication-operator realization of the flows on the section space of
// a rational spectral curve.  The basis is h-orthonormal and adapted: the
// k sections vanishing on D_inf come first, the complement vanishing at the
// designated zeros second.  Every A_m is exactly a_0 + a_- / lambda and
// every conjA_m exactly b_0 + b_+ * lambda; the coefficients are recovered
// from two dyadic fiber evaluations and certified against a third.
struct ExactEngine {
  SpectralData data;
  std::vector<RationalFn> basis;
  MatrixXcd gram;  // pairing recomputed on the stored basis
  std::vector<FlowGenerator> nu;
  std::vector<LaurentMatrix> A;
  std::vector<LaurentMatrix> conjA;

  int size() const { return static_cast<int>(basis.size()); }
};

ExactEngine make_exact_engine(const SpectralData& data);

// F(z, lambda) = exp(sum_m z_m A_m(lambda) - conj(z_m) conjA_m(lambda)).
// The generators commute, so this solves the frame equations exactly.
MatrixXcd frame(const ExactEngine& e, const VectorXcd& z, cplx lambda);

// Projection field Pi(z) = F diag(I_k, 0) F^{-1} at lambda = 1.
MatrixXcd grassmannian_map(const ExactEngine& e, const VectorXcd& z);

// Unitary field Psi(z) = F(z, -1) F(z, 1)^{-1}.
MatrixXcd pu_map(const ExactEngine& e, const VectorXcd& z);

// lambda^{-1} coefficient of tr A_m(lambda)^2.  Nonzero exactly when the
// direction m fails to be conformal (designated-zero index two).
cplx conformality_certificate(const ExactEngine& e, int m);

// tr(a_-^2) for direction m: nonzero exactly when the designated zero is
// simple, the non-conformality certificate of the unitary flows.
cplx pu_certificate(const ExactEngine& e, int m);

}  // namespace harmap
