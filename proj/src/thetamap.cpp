#include "harmap/thetamap.hpp"

#include <cmath>
#include <limits>

#include "harmap/verify.hpp"

namespace harmap {

VectorXcd riemann_constant(const SpectralCurve& c,
                           const std::vector<Differential>& diffs,
                           const PeriodData& pd, const CurvePoint& base) {
  const int g = pd.g;
  if (g < 1 || c.kind != CurveKind::hyperelliptic)
    throw config_error(
        "riemann constant needs a positive-genus hyperelliptic curve");

  CurvePoint anchor = CurvePoint::hyper(c.branch_points.at(0), 0.0);
  ThetaParams tp;
  tp.tau = pd.tau;

  // Probe with two deterministic non-special degree-g divisors: per probe,
  // the Abel image of each point and of the whole divisor from the anchor.
  const cplx probe_lams[4] = {cplx(0.77, 0.31), cplx(-0.43, 0.87),
                              cplx(-1.3, 0.4), cplx(0.35, -0.9)};
  struct Probe {
    std::vector<VectorXcd> points;
    VectorXcd total;
  };
  std::vector<Probe> probes;
  for (int which = 0; which < 2; ++which) {
    Probe pr;
    pr.total = VectorXcd::Zero(g);
    for (int j = 0; j < g; ++j) {
      auto fib = c.fiber(probe_lams[2 * which + j]);
      VectorXcd a = abel_map_base(c, diffs, pd, anchor,
                                  fib.at(static_cast<size_t>(which)));
      pr.points.push_back(a);
      pr.total += a;
    }
    probes.push_back(std::move(pr));
  }

  // All half-period candidates (m + tau m') / 2, scored by the worst theta
  // magnitude over the probe points; the true vector sends every one of them
  // onto the theta divisor.
  VectorXcd best = VectorXcd::Zero(g);
  double s_best = 1e300, s_second = 1e300, s_max = 0.0;
  for (int mm = 0; mm < (1 << g); ++mm) {
    for (int mp = 0; mp < (1 << g); ++mp) {
      VectorXcd half = VectorXcd::Zero(g);
      for (int i = 0; i < g; ++i) {
        half(i) += 0.5 * ((mm >> i) & 1);
        for (int r = 0; r < g; ++r)
          half(r) += 0.5 * ((mp >> i) & 1) * pd.tau(r, i);
      }
      double score = 0.0;
      for (const auto& pr : probes)
        for (const auto& a : pr.points)
          score = std::max(
              score, std::abs(riemann_theta(a - pr.total - half, tp)));
      s_max = std::max(s_max, score);
      if (score < s_best) {
        s_second = s_best;
        s_best = score;
        best = half;
      } else if (score < s_second) {
        s_second = score;
      }
    }
  }
  if (s_best > 1e-6 * (1.0 + s_max) || s_second < 1e-3 * (1.0 + s_max))
    throw numeric_error("riemann constant scan is ambiguous");

  if (g > 1)
    best += double(g - 1) * abel_map_base(c, diffs, pd, anchor, base);
  return best;
}

namespace {

// Base Abel image of a divisor, one abel_map_base call per term.
VectorXcd divisor_image(const SpectralCurve& c,
                        const std::vector<Differential>& diffs,
                        const PeriodData& pd, const CurvePoint& base,
                        const Divisor& d) {
  VectorXcd out = VectorXcd::Zero(pd.g);
  for (const auto& t : d)
    out += double(t.mult) * abel_map_base(c, diffs, pd, base, t.point);
  return out;
}

}  // namespace

ThetaMapEngine make_theta_engine(const SpectralData& data, int which_zero) {
  if (data.target != TargetKind::grassmannian || data.k != 1)
    throw config_error("theta synthesis covers rank-one grassmannian data");
  if (which_zero < 0 ||
      which_zero >= static_cast<int>(data.marked.P.size()))
    throw config_error("designated zero index out of range");

  ThetaMapEngine e;
  e.data = data;
  e.diffs = marked_differentials(data);
  e.pd = period_lattice(data.curve, e.diffs);
  e.g = e.pd.g;
  e.n = data.n();
  e.flow = FlowSpec::from_directions(direction_vectors(data, e.diffs, e.pd),
                                     e.pd.lattice);
  e.scales = VectorXd::Ones(e.n + 1);

  if (e.g >= 1) {
    const CurvePoint& base = data.marked.O.at(0);
    e.K = riemann_constant(data.curve, e.diffs, e.pd, base);
    VectorXcd u =
        divisor_image(data.curve, e.diffs, e.pd, base, data.line_divisor) -
        divisor_image(data.curve, e.diffs, e.pd, base,
                      data.marked.Qhat.at(static_cast<size_t>(which_zero)));
    e.kappa = kappa_for_class(u, e.K);
    for (int i = 1; i <= e.n; ++i)
      e.shifts.push_back(abel_map_base(data.curve, e.diffs, e.pd, base,
                                       data.marked.O.at(static_cast<size_t>(i))));
  }
  return e;
}

// The twist orientation is pinned by harmonicity, not by periodicity: both
// exp(+-2 pi i gamma_f) paired with -+shift satisfy the same lattice
// functional equation, but only the orientation below solves the harmonic
// map equation (checked against the discrete commutator on the genus-one
// fixture; the opposite choice plateaus at O(1)).
VectorXcd theta_components(const ThetaMapEngine& e, const VectorXcd& gamma) {
  if (gamma.size() != e.g + e.n)
    throw config_error("jacobian point has the wrong dimension");
  const cplx minus_two_pi_i(0.0, -2.0 * kPi);
  VectorXcd out(e.n + 1);
  if (e.g == 0) {
    out(0) = e.scales(0);
    for (int i = 1; i <= e.n; ++i)
      out(i) = e.scales(i) * std::exp(minus_two_pi_i * gamma(i - 1));
    return out;
  }
  ThetaParams tp(e.pd.tau);
  VectorXcd base = gamma.head(e.g);
  out(0) = e.scales(0) * riemann_theta(base + e.kappa, tp);
  for (int i = 1; i <= e.n; ++i)
    out(i) = e.scales(i) * std::exp(minus_two_pi_i * gamma(e.g + i - 1)) *
             riemann_theta(base - e.shifts[static_cast<size_t>(i) - 1] +
                               e.kappa,
                           tp);
  return out;
}

VectorXcd theta_map_point(const ThetaMapEngine& e, const VectorXcd& z) {
  return theta_components(e, gamma_flow_raw(e.flow, z));
}

VectorXcd theta_map_point_translated(const ThetaMapEngine& e,
                                     const VectorXcd& z, const VectorXd& t) {
  if (t.size() != e.n)
    throw config_error("fiber translation has the wrong dimension");
  VectorXcd gamma = gamma_flow_raw(e.flow, z);
  gamma.tail(e.n) += t.cast<cplx>();
  return theta_components(e, gamma);
}

MatrixXcd theta_projection(const ThetaMapEngine& e, const VectorXcd& z) {
  VectorXcd v = theta_map_point(e, z);
  double s = v.squaredNorm();
  if (!(s > 0.0)) throw numeric_error("theta map vanished identically");
  return (v * v.adjoint()) / s;
}

double calibration_objective(const ThetaMapEngine& e, const VectorXd& scales,
                             const std::vector<VectorXcd>& sample, double h) {
  if (scales.size() != e.n + 1)
    throw config_error("one scale per map component expected");
  if (sample.empty()) throw config_error("calibration sample is empty");
  ThetaMapEngine probe = e;
  probe.scales = scales;
  double acc = 0.0;
  for (const VectorXcd& z0 : sample) {
    MatrixField pi = [&probe, &z0](cplx w) {
      VectorXcd z = z0;
      z(0) = w;
      return theta_projection(probe, z);
    };
    MatrixXcd ch = laplace_commutator(pi, z0(0), h);
    MatrixXcd ch2 = laplace_commutator(pi, z0(0), h / 2);
    acc += ((4.0 * ch2 - ch) / 3.0).norm();
  }
  return acc / double(sample.size());
}

CalibrationResult calibrate_constants(const ThetaMapEngine& e,
                                      const std::vector<VectorXcd>& sample,
                                      double h, double threshold) {
  CalibrationResult out;
  out.scales = VectorXd::Ones(e.n + 1);
  auto obj = [&](const VectorXd& s) {
    return calibration_objective(e, s, sample, h);
  };

  const double llo = std::log(0.2), lhi = std::log(5.0);
  const double cell = (lhi - llo) / 16.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int i = 1; i <= e.n; ++i) {
      auto eval = [&](double lx) {
        VectorXd s = out.scales;
        s(i) = std::exp(lx);
        return obj(s);
      };
      double bestl = 0.0, bestv = std::numeric_limits<double>::infinity();
      for (int j = 0; j < 17; ++j) {
        double lx = llo + j * cell;
        double v = eval(lx);
        if (sweep == 0 && i == 1) out.curve.push_back({std::exp(lx), v});
        if (v < bestv) {
          bestv = v;
          bestl = lx;
        }
      }
      double a = bestl - cell, b = bestl + cell;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = eval(x1), f2 = eval(x2);
      while (b - a > 1e-12) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = eval(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = eval(x2);
        }
      }
      out.scales(i) = std::exp(0.5 * (a + b));
    }
  }
  out.residual = obj(out.scales);
  if (out.residual > threshold)
    throw check_failure("calibrated residual " + std::to_string(out.residual) +
                        " stays above " + std::to_string(threshold));
  return out;
}

}  // namespace harmap
