#pragma once

#include "harmap/linalg.hpp"

namespace harmap {

// Period lattice of the generalized Jacobian C^{g+n}/Lambda', together with
// the antilinear involution induced by the curve's real structure.
//
// Coordinates: entries 0..g-1 are base (classical Jacobian) coordinates,
// entries g..g+n-1 are fiber coordinates.  The involution acts by
// v -> conj(M) * conj(v) where M expresses the conjugated pullback of the
// coordinate differentials in the original basis.
struct GeneralizedLattice {
  int g = 0;
  int n = 0;
  MatrixXcd gens;  // (g+n) x (2g+n), one generator per column
  MatrixXcd M;     // (g+n) x (g+n) involution coefficient matrix

  int dim() const { return g + n; }
  int rank() const { return static_cast<int>(gens.cols()); }

  VectorXcd involution(const VectorXcd& v) const {
    return M.conjugate() * v.conjugate();
  }

  // Real 2(g+n) x rank matrix of the realified generators (cached lazily is
  // not worth it at these sizes).
  MatrixXd realified() const;

  // Nearest integer-combination coefficients of v in the lattice span
  // (least squares in the realification), before rounding.
  VectorXd coords(const VectorXcd& v) const;

  ValidationReport validate(double tol_lattice) const;
};

// Canonical representative: v minus the rounded integer combination of the
// generators.  Components off the lattice span are untouched.  Idempotent.
VectorXcd reduce_mod_lattice(const VectorXcd& v, const GeneralizedLattice& lat);

// Distance from v to the nearest lattice vector (0 when v is in Lambda').
double lattice_distance(const VectorXcd& v, const GeneralizedLattice& lat);

// Linear flow data: gamma(z) = U z + conj_U conj(z) for z in C^k.
// conj_U is fixed by the reality requirement gamma + involution(gamma) = 0,
// namely conj_U = -conj(M) conj(U) columnwise.
struct FlowSpec {
  MatrixXcd U;       // (g+n) x k
  MatrixXcd conj_U;  // (g+n) x k

  static FlowSpec from_directions(const MatrixXcd& U,
                                  const GeneralizedLattice& lat);
};

// Unreduced flow value; callers needing the canonical representative reduce.
VectorXcd gamma_flow_raw(const FlowSpec& flow, const VectorXcd& z);
VectorXcd gamma_flow(const FlowSpec& flow, const VectorXcd& z,
                     const GeneralizedLattice& lat);

// p is in the real slice iff p + involution(p) lies in Lambda'.
bool is_real_point(const VectorXcd& p, const GeneralizedLattice& lat,
                   double tol);

// Translate the fiber coordinates by the real vector t; base part unchanged.
VectorXcd fiber_translate(const VectorXcd& p, const VectorXd& t,
                          const GeneralizedLattice& lat);

}  // namespace harmap
