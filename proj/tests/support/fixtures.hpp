#pragma once

#include "harmap/spectral.hpp"

// Shared spectral-data builders for the unit and acceptance suites.  Each one
// pins a curve, a bundle divisor and the designated zeros; every derived
// quantity (marked fibers, ramification, witness) is computed by the library.
namespace harmap::fixtures {

inline CurvePoint W(cplx e) { return CurvePoint::hyper(e, 0.0); }

// lambda = w^2, bundle divisor (w = 0), plane rank one
inline SpectralData square_map() {
  auto c = SpectralCurve::make_rational(Poly{{0.0, 0.0, 1.0}},
                                        Poly::constant(1.0));
  return make_spectral_data(c, {{CurvePoint::rational(0.0), 1}}, 1,
                            TargetKind::grassmannian,
                            {CurvePoint::rational(0.0)});
}

// same curve with the divisor moved onto the marked fiber; the reality
// checks are expected to fail on this one
inline SpectralData square_map_shifted() {
  auto c = SpectralCurve::make_rational(Poly{{0.0, 0.0, 1.0}},
                                        Poly::constant(1.0));
  return make_spectral_data(c, {{CurvePoint::rational(1.0), 1}}, 1,
                            TargetKind::grassmannian,
                            {CurvePoint::rational(0.0)});
}

// lambda = w^3: designated zero of index three (conformal direction)
inline SpectralData cube_map() {
  auto c = SpectralCurve::make_rational(Poly{{0.0, 0.0, 0.0, 1.0}},
                                        Poly::constant(1.0));
  return make_spectral_data(c, {{CurvePoint::rational(0.0), 2}}, 1,
                            TargetKind::grassmannian,
                            {CurvePoint::rational(0.0)});
}

// lambda = (w^2 - a^2)/(1 - a^2 w^2): simple zeros, projective-unitary target
inline SpectralData blaschke_pair(double a = 0.6) {
  auto c = SpectralCurve::make_rational(Poly{{-a * a, 0.0, 1.0}},
                                        Poly{{1.0, 0.0, -a * a}});
  return make_spectral_data(c, {{CurvePoint::rational(0.0), 1}}, 1,
                            TargetKind::projective_unitary,
                            {CurvePoint::rational(a)});
}

// lambda = [(w^2 - b^2)/(1 - b^2 w^2)]^2: two double zeros, plane rank two
inline SpectralData blaschke_square(double b = 0.5) {
  Poly mn{{-b * b, 0.0, 1.0}};
  Poly md{{1.0, 0.0, -b * b}};
  auto c = SpectralCurve::make_rational(mn * mn, md * md);
  return make_spectral_data(c,
                            {{CurvePoint::rational(0.0), 1},
                             {CurvePoint::rational(b), 1},
                             {CurvePoint::rational(-b), 1}},
                            2, TargetKind::grassmannian,
                            {CurvePoint::rational(b), CurvePoint::rational(-b)});
}

// genus one, branch points {0, 1/4, 4}, divisor at two finite branch points
inline SpectralData genus_one() {
  auto c = SpectralCurve::make_hyperelliptic({0.0, 0.25, 4.0});
  return make_spectral_data(c, {{W(0.0), 1}, {W(4.0), 1}}, 1,
                            TargetKind::grassmannian, {W(0.0)});
}

// genus two, branch points {0, 1/2, 2, -1/4, -4}
inline SpectralData genus_two() {
  auto c = SpectralCurve::make_hyperelliptic({0.0, 0.5, 2.0, -0.25, -4.0});
  return make_spectral_data(
      c, {{CurvePoint::hyper_infinity(0), 1}, {W(0.5), 1}, {W(-0.25), 1}}, 1,
      TargetKind::grassmannian, {W(0.0)});
}

}  // namespace harmap::fixtures
