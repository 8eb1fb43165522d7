#pragma once

#include <functional>

#include "harmap/exact.hpp"

namespace harmap {

// A map value field over one complex flow parameter: z -> projection (rank-k
// hermitian idempotent) or z -> unitary, depending on the target.
using MatrixField = std::function<MatrixXcd(cplx)>;

// Structural checks on the Laurent coefficients of the flow matrices.
// Grassmannian engines: support {-1, 0}, pole coefficient strictly in the
// lower-left block, constant coefficient with empty lower-left block, and
// collapse to zeta^{-1} * (off-block) + (block diagonal) after substituting
// lambda = zeta^2 and conjugating by diag(I_k, zeta I).  Projective-unitary
// engines: support {-1, 0}, the pole coefficient equal to minus the
// lambda-part of the identity-fiber value (so the connection is a multiple
// of (1 - lambda^{-1})), and a trace-free value at lambda = 1.  Both: the
// conjugate-direction coefficients are the adjoints of the forward ones.
// Failures carry the offending coefficient position in the detail string.
ValidationReport loop_structure_check(const ExactEngine& e,
                                      double tol = 1e-13);

// 5-point discrete Laplacian commutator [Delta_h Pi, Pi] at z.
MatrixXcd laplace_commutator(const MatrixField& pi, cplx z, double h);
double commutator_residual(const MatrixField& pi, cplx z, double h);

// Group-target defect d_h(Psi^{-1} dbar_h Psi) + dbar_h(Psi^{-1} d_h Psi).
MatrixXcd group_defect(const MatrixField& psi, cplx z, double h);

struct ResidualReport {
  std::vector<double> h;     // ladder, descending
  std::vector<double> sup;   // sup residual per level
  std::vector<double> mean;  // mean residual per level
  double slope = 0.0;        // d log(sup) / d log(h); valid with >= 3 levels
  bool has_slope = false;
  bool pass = false;         // sup at the finest level within tolerance
};

// Residual ladder over the given interior nodes.  Throws config_error with
// fewer than 3 nodes or an empty ladder.
ResidualReport harmonicity_residual(const MatrixField& pi,
                                    const std::vector<cplx>& nodes,
                                    const std::vector<double>& ladder,
                                    double tol);
ResidualReport group_harmonicity_residual(const MatrixField& psi,
                                          const std::vector<cplx>& nodes,
                                          const std::vector<double>& ladder,
                                          double tol);

// Discrete (2,0)-metric coefficient tr((d_h Pi)^2), Richardson-extrapolated
// to O(h^4) so holomorphic fields evaluate to zero at tight tolerance.
cplx conformality_value(const MatrixField& pi, cplx z, double h);

// Best projective-unitary W with to[i] ~ W from[i] W^*, least squares over
// the stacked Sylvester system, unitarized by polar decomposition and phase
// normalized (largest entry real positive).
struct ConjugatorFit {
  MatrixXcd W;
  double defect = 0.0;       // max_i |to[i] - W from[i] W^*|
  double sigma_ratio = 0.0;  // smallest/largest singular value of the system
};
ConjugatorFit fit_conjugator(const std::vector<MatrixXcd>& from,
                             const std::vector<MatrixXcd>& to);

// Conjugator fit between the field and its translate by step.
ConjugatorFit equivariance_fit(const MatrixField& pi, cplx step,
                               const std::vector<cplx>& nodes);

// Forced equivariance directions: real translation directions whose induced
// base-lattice displacement vanishes.  The displacement matrix is 2g x 2k
// (two real directions per flow parameter); its kernel has dimension
// 2k - g for the reality-constrained flows when that count is positive.
struct DirectionSplit {
  MatrixXd displacement;
  VectorXd singulars;
  std::vector<VectorXd> kernel;  // forced directions in R^{2k}
  bool total = false;            // every direction forced (g = 0)
};
DirectionSplit equivariance_directions(const FlowSpec& flow, int g,
                                       double rel_tol = 1e-6);

// Fubini-Study distance between two rank-k projections via principal angles.
double fubini_study(const MatrixXcd& P, const MatrixXcd& Q, int k);

// One fitted conjugator aligning two sampled fields plus the worst
// Fubini-Study distance after alignment.
struct IsometryReport {
  ConjugatorFit fit;
  double max_fs = 0.0;
};
IsometryReport isometry_check(const std::vector<MatrixXcd>& a,
                              const std::vector<MatrixXcd>& b, int k);

// Algebraic type of the spectral data: A for genus zero, B for genus one
// with a degree-two lambda, C when the flow plane is doubly periodic modulo
// the full lattice (two independent integer points with entries bounded by
// Q in its lattice-coordinate image), otherwise none ("not detected", not
// "disproved").
struct AlgebraicType {
  std::string tag;  // "A", "B", "C", "none"
  std::string evidence;
};
AlgebraicType classify_algebraic(const SpectralData& data,
                                 const PeriodData& pd, const FlowSpec& flow,
                                 int Q = 50);

// Best rational approximation p/q with q <= Q accepted at the convergent
// quality bound |p/q - x| <= 1e-7 / q^2; returns q = 0 when none qualifies.
struct RationalWitness {
  long p = 0;
  long q = 0;
};
RationalWitness rational_relation(double x, int Q);

// Translations z* of one flow parameter with gamma(z*) in the lattice.
// Directions along which gamma does not move at all are reported separately
// (every translation along them is trivially a period).
struct PeriodHit {
  double x = 0.0;
  double y = 0.0;
  double defect = 0.0;
};
struct PeriodSearchReport {
  std::vector<PeriodHit> periods;     // nonzero hits, sorted by modulus
  std::vector<VectorXd> degenerate;   // zero-displacement directions in R^2
  bool torus = false;                 // two independent periods present
};
PeriodSearchReport periodicity_search(const FlowSpec& flow,
                                      const GeneralizedLattice& lat,
                                      double box = 3.5, double coarse = 0.125,
                                      double tol = 1e-8);

}  // namespace harmap
