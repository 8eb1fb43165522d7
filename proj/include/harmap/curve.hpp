#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "harmap/genjac.hpp"
#include "harmap/poly.hpp"

namespace harmap {

enum class CurveKind { rational, hyperelliptic };

// Point on a spectral curve.  Rational kind: the coordinate w (or the point
// w = infinity).  Hyperelliptic kind: a pair (lambda, y) on y^2 = prod(lambda
// - e_i), with branch points carrying y = 0 and points over lambda = infinity
// tagged by inf_sign (the sign of y * s^{g+1} / sqrt(prod(1 - e s)) as the
// chart coordinate s -> 0; 0 when infinity itself is a branch point).
struct CurvePoint {
  bool at_infinity = false;
  cplx coord{0.0, 0.0};  // w (rational) or lambda (hyperelliptic)
  cplx y{0.0, 0.0};      // hyperelliptic sheet value at finite points
  int inf_sign = 0;

  static CurvePoint rational(cplx w) {
    CurvePoint p;
    p.coord = w;
    return p;
  }
  static CurvePoint rational_infinity() {
    CurvePoint p;
    p.at_infinity = true;
    return p;
  }
  static CurvePoint hyper(cplx lambda, cplx y) {
    CurvePoint p;
    p.coord = lambda;
    p.y = y;
    return p;
  }
  static CurvePoint hyper_infinity(int sign) {
    CurvePoint p;
    p.at_infinity = true;
    p.inf_sign = sign;
    return p;
  }
  bool close_to(const CurvePoint& q, double tol = 1e-9) const;
};

struct SpectralCurve {
  CurveKind kind = CurveKind::rational;
  int genus = 0;

  // hyperelliptic data: finite branch points; an odd count means lambda =
  // infinity is also a branch point (paired with 0 under e -> 1/conj(e)).
  std::vector<cplx> branch_points;
  cplx rho_fiber_sign{1.0, 0.0};  // s in rho(lambda, y) = (1/conj(lambda),
                                  // s conj(y)/conj(lambda)^{g+1})

  // rational data: lambda as a ratio of two coprime polynomials in w
  RationalFn lambda;

  static SpectralCurve make_rational(Poly num, Poly den);
  static SpectralCurve make_hyperelliptic(std::vector<cplx> branch);

  bool infinity_is_branch() const {
    return kind == CurveKind::hyperelliptic && branch_points.size() % 2 == 1;
  }
  // prod(lambda - e_i) over the finite branch points
  cplx branch_product(cplx lam) const;
  // lambda value of a point (finite points only)
  cplx lambda_at(const CurvePoint& p) const;
  // the real involution applied to a point
  CurvePoint rho(const CurvePoint& p) const;
  // finite fiber over a lambda (rational: roots of num - c*den; hyperelliptic:
  // the one or two points (c, +/-y)), deterministic (Re, Im) order
  std::vector<CurvePoint> fiber(cplx lambda_value) const;
  // does the point satisfy the defining equation
  bool contains(const CurvePoint& p, double tol = 1e-8) const;
};

// Structural sanity is enforced by the factories (throw config_error);
// this checks the real-structure conditions and reports each one.
ValidationReport validate_real_structure(const SpectralCurve& c);

struct Differential {
  enum class Kind { holomorphic, third_kind } kind = Kind::holomorphic;

  // hyperelliptic holomorphic: num(lambda) dlambda / y
  Poly num;
  // third kind: simple poles with residue +1 at pole_plus, -1 at pole_minus
  CurvePoint pole_plus, pole_minus;
  // rational kind: f(w) dw
  RationalFn f;

  static Differential holomorphic_hyper(Poly num);
  static Differential third_kind_pair(const SpectralCurve& c,
                                      const CurvePoint& plus,
                                      const CurvePoint& minus);

  // coefficient against dlambda (resp. dw) at a finite point
  cplx coeff(const SpectralCurve& c, cplx lam, cplx y) const;
};

// g holomorphic differentials (hyperelliptic: lambda^{i-1} dlambda / y)
// followed by one third-kind differential per pole pair.
std::vector<Differential> differential_basis(
    const SpectralCurve& c,
    const std::vector<std::pair<CurvePoint, CurvePoint>>& third_kind_pairs);

// Residue of a third-kind differential at one of its poles, by a small
// numerically integrated circle on the correct sheet.
cplx numeric_residue(const SpectralCurve& c, const Differential& d,
                     const CurvePoint& pole);

struct PeriodData {
  int g = 0;  // curve genus
  int n = 0;  // number of third-kind differentials carried

  MatrixXcd a_periods;  // g x g, raw holomorphic a-periods (column per cycle)
  MatrixXcd b_periods;  // g x g, raw holomorphic b-periods
  MatrixXcd tau;        // g x g Riemann matrix of the normalized basis
  MatrixXcd normalizer;  // N = a_periods^{-1}; hatted basis = N * raw
  MatrixXcd third_a;     // g x n raw third-kind a-periods (c_{il})
  MatrixXcd third_b;     // g x n raw third-kind b-periods
  GeneralizedLattice lattice;
  double deformation_residual = 0.0;  // from re-integration on moved contours

  // raw integral vector (g holomorphic + n third-kind components) ->
  // coordinates on the generalized Jacobian
  VectorXcd to_coords(const VectorXcd& raw) const;

  ValidationReport validate(const Tolerances& tol) const;
};

PeriodData period_lattice(const SpectralCurve& c,
                          const std::vector<Differential>& diffs);

// Raw path integrals of all differentials from base to target along a
// deterministic path.  path_variant > 0 selects an alternative admissible
// path (used to confirm path independence modulo the lattice).
VectorXcd integrate_differentials(const SpectralCurve& c,
                                  const std::vector<Differential>& diffs,
                                  const CurvePoint& base,
                                  const CurvePoint& target,
                                  int path_variant = 0);

// Abel map in generalized-Jacobian coordinates (defined modulo the lattice).
VectorXcd abel_map(const SpectralCurve& c,
                   const std::vector<Differential>& diffs,
                   const PeriodData& pd, const CurvePoint& base,
                   const CurvePoint& target, int path_variant = 0);

// Classical part only (the g base coordinates); well-defined also when the
// target or base is a pole of one of the third-kind differentials.
VectorXcd abel_map_base(const SpectralCurve& c,
                        const std::vector<Differential>& diffs,
                        const PeriodData& pd, const CurvePoint& base,
                        const CurvePoint& target);

// Value of each differential against the local parameter at p, where lambda
// has a zero of order ram_index at p: zeta = lambda^(1/ram_index) (principal
// root, arg in (-pi/2, pi/2] for ram_index = 2).
VectorXcd differential_values(const SpectralCurve& c,
                              const std::vector<Differential>& diffs,
                              const CurvePoint& p, int ram_index);

// Least-squares coefficient matrix M of the antilinear action u -> conj(rho^*
// u) on the scaled coordinate basis (normalized holomorphic differentials,
// then third-kind ones over 2 pi i).  max_residual receives the worst
// relative fit residual.
MatrixXcd involution_matrix(const SpectralCurve& c,
                            const std::vector<Differential>& diffs,
                            const MatrixXcd& normalizer,
                            const MatrixXcd& third_a,
                            double* max_residual = nullptr);

}  // namespace harmap
