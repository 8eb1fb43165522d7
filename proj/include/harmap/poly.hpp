#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "harmap/linalg.hpp"

namespace harmap {

// Dense univariate polynomial over C, coefficients ascending.
struct Poly {
  std::vector<cplx> c;

  Poly() = default;
  Poly(std::initializer_list<cplx> init) : c(init) { trim(); }
  explicit Poly(std::vector<cplx> v) : c(std::move(v)) { trim(); }
  static Poly constant(cplx v) { return Poly{{v}}; }
  static Poly x() { return Poly{{0.0, 1.0}}; }

  void trim() {
    while (!c.empty() && std::abs(c.back()) == 0.0) c.pop_back();
  }
  int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c.empty(); }
  cplx lead() const { return c.empty() ? cplx(0) : c.back(); }

  cplx eval(cplx w) const {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * w + *it;
    return acc;
  }

  Poly deriv() const {
    if (c.size() <= 1) return Poly();
    std::vector<cplx> d(c.size() - 1);
    for (size_t i = 1; i < c.size(); ++i) d[i - 1] = cplx(double(i)) * c[i];
    return Poly(std::move(d));
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<cplx> r(std::max(a.c.size(), b.c.size()), 0.0);
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
    return Poly(std::move(r));
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    std::vector<cplx> r(std::max(a.c.size(), b.c.size()), 0.0);
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
    return Poly(std::move(r));
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<cplx> r(a.c.size() + b.c.size() - 1, 0.0);
    for (size_t i = 0; i < a.c.size(); ++i)
      for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return Poly(std::move(r));
  }
  friend Poly operator*(cplx s, const Poly& a) {
    std::vector<cplx> r = a.c;
    for (auto& v : r) v *= s;
    return Poly(std::move(r));
  }

  // Monic polynomial with the given roots.
  static Poly from_roots(const std::vector<cplx>& roots) {
    Poly p = constant(1.0);
    for (cplx r : roots) p = p * Poly{{-r, 1.0}};
    return p;
  }

  // Roots via the companion matrix, sorted by (Re, Im) for determinism.
  std::vector<cplx> roots() const {
    int d = degree();
    if (d <= 0) return {};
    MatrixXcd C = MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) C(i, d - 1) = -c[i] / c[d];
    Eigen::ComplexEigenSolver<MatrixXcd> es(C);
    std::vector<cplx> r(d);
    for (int i = 0; i < d; ++i) r[i] = es.eigenvalues()(i);
    std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
      if (a.real() != b.real()) return a.real() < b.real();
      return a.imag() < b.imag();
    });
    return r;
  }
};

// Ratio of two polynomials in one variable.
struct RationalFn {
  Poly num, den;

  RationalFn() : num(), den(Poly::constant(1.0)) {}
  RationalFn(Poly n, Poly d) : num(std::move(n)), den(std::move(d)) {}

  cplx eval(cplx w) const { return num.eval(w) / den.eval(w); }

  // Value at w = infinity (degree-based limit; 0, finite, or inf).
  cplx eval_inf() const {
    int dn = num.degree(), dd = den.degree();
    if (dn < dd) return 0.0;
    if (dn == dd) return num.lead() / den.lead();
    return cplx(std::numeric_limits<double>::infinity(), 0.0);
  }

  int degree() const { return std::max(num.degree(), den.degree()); }

  RationalFn deriv() const {
    return RationalFn(num.deriv() * den - num * den.deriv(), den * den);
  }

  friend RationalFn operator+(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend RationalFn operator-(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend RationalFn operator*(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num * b.num, a.den * b.den);
  }
  friend RationalFn operator*(cplx s, const RationalFn& a) {
    return RationalFn(s * a.num, a.den);
  }
};

}  // namespace harmap
