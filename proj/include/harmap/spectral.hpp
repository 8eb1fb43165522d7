#pragma once

#include "harmap/curve.hpp"

namespace harmap {

enum class TargetKind { grassmannian, projective_unitary };

// Formal sum of curve points with integer multiplicities.
struct DivisorTerm {
  CurvePoint point;
  int mult = 1;
};
using Divisor = std::vector<DivisorTerm>;

int divisor_degree(const Divisor& d);

// Distinguished points attached to one set of spectral data.  O is the fiber
// over lambda = 1 and S the fiber over lambda = -1 (kept only for the
// projective-unitary target); P lists the designated zeros of lambda that
// drive the flow, Q their images under the real involution.
struct MarkedPoints {
  std::vector<CurvePoint> O;
  std::vector<CurvePoint> S;
  std::vector<CurvePoint> P;
  std::vector<int> ram;  // ramification index of lambda at each P
  std::vector<CurvePoint> Q;
  Divisor R;             // ramification divisor of lambda
  Divisor pole_divisor;  // poles of lambda with multiplicity
  Divisor zero_divisor;  // zeros of lambda with multiplicity
  Divisor D_inf;         // pole_divisor minus all Q_m
  std::vector<Divisor> Qhat;  // pole_divisor minus the single Q_m
  std::vector<Divisor> Phat;  // zero_divisor minus the single P_m
};

struct SpectralData {
  SpectralCurve curve;
  Divisor line_divisor;  // positive, degree genus + n
  int k = 1;             // rank of the moving plane (grassmannian target)
  TargetKind target = TargetKind::grassmannian;
  MarkedPoints marked;
  // set when some designated zero has ramification index above two; the
  // associated flow direction is then conformal and the map minimal
  bool conformal_direction = false;

  int n() const { return static_cast<int>(marked.O.size()) - 1; }
};

// Computes the marked points for the given curve, bundle divisor and
// designated zeros of lambda.  Throws config_error on structurally impossible
// input (wrong divisor degree, a designated point that is not a zero, more
// designated zeros than the target type admits).
SpectralData make_spectral_data(SpectralCurve curve, Divisor line_divisor,
                                int k, TargetKind target,
                                std::vector<CurvePoint> designated_zeros);

// Meromorphic function whose divisor witnesses the reality condition
// line_divisor + rho(line_divisor) - R ~ 0.  On the fixtures built from
// involution-symmetric divisors the witness collapses to the constant 1.
struct WitnessFn {
  bool constant = true;
  cplx value{1.0, 0.0};
  RationalFn fn;  // rational curves only, when not constant

  cplx eval(const SpectralCurve& c, const CurvePoint& p) const;
};

// Constructs the witness and normalizes it to be involution-real.  Throws
// config_error when the divisor arithmetic does not balance (degree mismatch)
// or the curve kind has no explicit construction for the remainder.
WitnessFn witness_function(const SpectralData& data);

// Structural and reality checks that need no period data: divisor degree and
// positivity, fiber sizes, designated-zero indices, witness construction,
// positivity of the witness over the unit lambda circle, equal witness values
// across each marked fiber, and (genus zero) joint non-vanishing of sections
// at the marked fibers.
ValidationReport validate_spectral(const SpectralData& data,
                                   const Tolerances& tol);

// Period-dependent checks: the divisor class congruence that replaces the
// explicit witness on positive genus (Abel image of line_divisor +
// rho(line_divisor) - R in the lattice) and theta-based non-degeneracy of the
// marked-fiber evaluation.
ValidationReport validate_spectral_periods(const SpectralData& data,
                                           const std::vector<Differential>& diffs,
                                           const PeriodData& pd,
                                           const Tolerances& tol);

// Differential basis matching the marked points: holomorphic part, then one
// third-kind pair (O_{j+1}, O_1) per j, then (S_{j+1}, S_1) for the
// projective-unitary target.
std::vector<Differential> marked_differentials(const SpectralData& data);

// Space of global sections of the bundle twisted down by a vanishing divisor.
// Genus zero: explicit rational-function basis (exact = true).  Positive
// genus: dimension only, certified through lattice / theta non-specialness.
struct SectionSpace {
  int dim = 0;
  bool exact = false;
  std::vector<RationalFn> basis;
};

SectionSpace section_space(const SpectralData& data, const Divisor& vanishing);
SectionSpace section_space_periods(const SpectralData& data,
                                   const Divisor& vanishing,
                                   const std::vector<Differential>& diffs,
                                   const PeriodData& pd);

// Sesquilinear pairing summed over the marked fiber with witness weights:
// h(e_a, e_b) = sum_j f(O_j) e_a(O_j) conj(e_b(O_j)).
struct HermitianForm {
  MatrixXcd gram;
  WitnessFn witness;
  std::vector<RationalFn> basis;  // genus-zero basis the gram refers to
  bool exact = false;             // hyperelliptic: gram on the value basis
};

// Throws check_failure when the gram fails to be positive definite (the
// reality condition is then violated by the divisor choice).
HermitianForm hermitian_form(const SpectralData& data);

// Gram of the same pairing on a caller-supplied basis (genus zero).
MatrixXcd gram_matrix(const SpectralData& data, const WitnessFn& f,
                      const std::vector<RationalFn>& basis);

// Pairing induced by explicit fiber identification values s_j = sigma(O_j):
// sum_j e_a(O_j) conj(e_b(O_j)) / |s_j|^2.  Phases of the s_j cancel exactly.
MatrixXcd htilde_form(const SpectralData& data,
                      const std::vector<RationalFn>& basis,
                      const VectorXcd& fiber_values);

// One column per designated zero: the lattice-coordinate components of the
// flow direction, i.e. each normalized differential divided by d zeta at P_m
// where zeta is the ramification-adapted root of lambda.
MatrixXcd direction_vectors(const SpectralData& data,
                            const std::vector<Differential>& diffs,
                            const PeriodData& pd);

}  // namespace harmap
