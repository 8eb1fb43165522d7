#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

#include "harmap/curve_detail.hpp"

namespace harmap::detail {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// Continuous branch of sqrt(prod_i f_i(t)) along t in [lo, hi].  Per-factor
// unwrapped arguments are stored at adaptively spaced checkpoints (refined
// until every factor turns by less than half a radian per step); an arbitrary
// t is evaluated by unwrapping each factor's principal argument against the
// nearest checkpoint.
class TrackedSqrt {
 public:
  TrackedSqrt(std::function<void(double, std::vector<cplx>&)> factors,
              double lo, double hi)
      : factors_(std::move(factors)) {
    std::vector<cplx> f;
    factors_(lo, f);
    const size_t m = f.size();
    std::vector<double> cur(m);
    for (size_t i = 0; i < m; ++i) cur[i] = std::arg(f[i]);
    ts_.push_back(lo);
    args_.push_back(cur);
    double t = lo;
    double dt = (hi - lo) / 16.0;
    const double dt_min = (hi - lo) * 1e-9;
    while (t < hi) {
      double t2 = std::min(t + dt, hi);
      factors_(t2, f);
      std::vector<double> nxt(m);
      double worst = 0.0;
      for (size_t i = 0; i < m; ++i) {
        double pa = std::arg(f[i]);
        double k = std::round((cur[i] - pa) / kTwoPi);
        nxt[i] = pa + kTwoPi * k;
        worst = std::max(worst, std::abs(nxt[i] - cur[i]));
      }
      if (worst > 0.5 && dt > dt_min) {
        dt /= 2.0;
        continue;
      }
      cur = nxt;
      t = t2;
      ts_.push_back(t);
      args_.push_back(cur);
      if (ts_.size() > 200000)
        throw numeric_error("sheet tracking: checkpoint budget exhausted");
      dt = std::min(dt * 1.3, (hi - lo) / 16.0);
    }
  }

  cplx eval(double t) const {
    auto it = std::lower_bound(ts_.begin(), ts_.end(), t);
    size_t k = it - ts_.begin();
    if (k == ts_.size()) --k;
    if (k > 0 && (it == ts_.end() || t - ts_[k - 1] < ts_[k] - t)) --k;
    std::vector<cplx> f;
    factors_(t, f);
    double arg_sum = 0.0, log_sum = 0.0;
    for (size_t i = 0; i < f.size(); ++i) {
      double pa = std::arg(f[i]);
      double kk = std::round((args_[k][i] - pa) / kTwoPi);
      arg_sum += pa + kTwoPi * kk;
      log_sum += std::log(std::abs(f[i]));
    }
    return std::exp(cplx(0.5 * log_sum, 0.5 * arg_sum));
  }

 private:
  std::function<void(double, std::vector<cplx>&)> factors_;
  std::vector<double> ts_;
  std::vector<std::vector<double>> args_;
};

// ---------------------------------------------------------------------------
// One parametrized stretch of a path on the curve: lambda(t) for t in [0, 1]
// plus the sigma = +1 branch of y(t) split as prefactor * tracked sqrt.
struct Piece {
  std::function<cplx(double)> lam, dlam;
  std::function<cplx(double)> pref;  // single-valued prefactor of y
  std::shared_ptr<TrackedSqrt> ytr;
  double sigma = 1.0;
  bool free_start = false;  // y -> 0 there (branch point) or untagged end
  bool free_end = false;

  cplx y(double t) const { return sigma * pref(t) * ytr->eval(t); }
};

Piece make_tracked_piece(const SpectralCurve& c,
                         std::function<cplx(double)> lam,
                         std::function<cplx(double)> dlam, double lo) {
  Piece p;
  p.lam = std::move(lam);
  p.dlam = std::move(dlam);
  p.pref = [](double) { return cplx(1.0); };
  auto lam_copy = p.lam;
  auto branch = c.branch_points;
  p.ytr = std::make_shared<TrackedSqrt>(
      [lam_copy, branch](double t, std::vector<cplx>& f) {
        cplx l = lam_copy(t);
        f.resize(branch.size());
        for (size_t i = 0; i < branch.size(); ++i) f[i] = l - branch[i];
      },
      lo, 1.0 - 1e-9);
  return p;
}

Piece make_segment(const SpectralCurve& c, cplx a, cplx b) {
  return make_tracked_piece(
      c, [a, b](double t) { return a + (b - a) * t; },
      [a, b](double) { return b - a; }, 1e-9);
}

// outward from a finite branch point e to vertex v, quadratic so the
// integrand is smooth in t
Piece make_branch_out(const SpectralCurve& c, cplx e, cplx v) {
  cplx d = v - e;
  Piece p = make_tracked_piece(
      c, [e, d](double t) { return e + d * t * t; },
      [d](double t) { return 2.0 * d * t; }, 1e-8);
  p.free_start = true;
  return p;
}

Piece make_branch_in(const SpectralCurve& c, cplx v, cplx e) {
  cplx d = v - e;
  Piece p = make_tracked_piece(
      c, [e, d](double t) { return e + d * (1.0 - t) * (1.0 - t); },
      [d](double t) { return -2.0 * d * (1.0 - t); }, 1e-9);
  p.free_end = true;
  return p;
}

// one segment joining two branch points needs the substitution at both ends
Piece make_branch_bridge(const SpectralCurve& c, cplx e1, cplx e2) {
  cplx d = e2 - e1;
  Piece p = make_tracked_piece(
      c,
      [e1, d](double t) {
        double s = std::sin(0.5 * kPi * t);
        return e1 + d * s * s;
      },
      [d](double t) { return d * 0.5 * kPi * std::sin(kPi * t); }, 1e-8);
  p.free_start = true;
  p.free_end = true;
  return p;
}

Piece make_circle(const SpectralCurve& c, cplx o, double r) {
  return make_tracked_piece(
      c, [o, r](double t) { return o + r * std::exp(cplx(0, kTwoPi * t)); },
      [o, r](double t) {
        return r * kTwoPi * kI * std::exp(cplx(0, kTwoPi * t));
      },
      0.0);
}

// chart piece reaching lambda = infinity; outgoing: t = 1 at infinity,
// incoming: t = 0 at infinity
Piece make_inf_piece(const SpectralCurve& c, cplx anchor, bool outgoing) {
  Piece p;
  bool odd = c.infinity_is_branch();
  int g = c.genus;
  cplx s0 = odd ? cplx(1.0) / std::sqrt(anchor) : cplx(1.0) / anchor;
  auto s_of = [s0, outgoing](double t) {
    return s0 * (outgoing ? 1.0 - t : t);
  };
  cplx ds = outgoing ? -s0 : s0;
  if (odd) {
    p.lam = [s_of](double t) { cplx s = s_of(t); return 1.0 / (s * s); };
    p.dlam = [s_of, ds](double t) {
      cplx s = s_of(t);
      return -2.0 * ds / (s * s * s);
    };
    int k = 2 * g + 1;
    p.pref = [s_of, k](double t) { return std::pow(s_of(t), -k); };
  } else {
    p.lam = [s_of](double t) { return 1.0 / s_of(t); };
    p.dlam = [s_of, ds](double t) {
      cplx s = s_of(t);
      return -ds / (s * s);
    };
    int k = g + 1;
    p.pref = [s_of, k](double t) { return std::pow(s_of(t), -k); };
  }
  auto branch = c.branch_points;
  p.ytr = std::make_shared<TrackedSqrt>(
      [s_of, branch, odd](double t, std::vector<cplx>& f) {
        cplx s = s_of(t);
        cplx ss = odd ? s * s : s;
        f.resize(branch.size());
        for (size_t i = 0; i < branch.size(); ++i)
          f[i] = 1.0 - branch[i] * ss;
      },
      outgoing ? 0.0 : 1e-9, outgoing ? 1.0 - 1e-9 : 1.0);
  if (odd) {
    if (outgoing) p.free_end = true;
    else p.free_start = true;
  }
  return p;
}

// ---------------------------------------------------------------------------
// 16-point Gauss-Legendre rule on [0, 1], nodes by Newton iteration.
const std::vector<std::pair<double, double>>& gl16() {
  static const std::vector<std::pair<double, double>> rule = [] {
    const int n = 16;
    std::vector<std::pair<double, double>> r;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      r.push_back({0.5 * (1.0 + x), 1.0 / ((1.0 - x * x) * dp * dp)});
    }
    return r;
  }();
  return rule;
}

VectorXcd eval_forms(const SpectralCurve& c,
                     const std::vector<Differential>& diffs, cplx lam, cplx y,
                     cplx dlam) {
  VectorXcd v(diffs.size());
  for (size_t i = 0; i < diffs.size(); ++i)
    v(static_cast<int>(i)) = diffs[i].coeff(c, lam, y) * dlam;
  return v;
}

VectorXcd gl_piece(const SpectralCurve& c,
                   const std::vector<Differential>& diffs, const Piece& p,
                   double a, double b) {
  VectorXcd acc = VectorXcd::Zero(diffs.size());
  for (const auto& [x, w] : gl16()) {
    double t = a + (b - a) * x;
    acc += w * eval_forms(c, diffs, p.lam(t), p.y(t), p.dlam(t));
  }
  return acc * (b - a);
}

void integrate_rec(const SpectralCurve& c,
                   const std::vector<Differential>& diffs, const Piece& p,
                   double a, double b, const VectorXcd& whole, int depth,
                   VectorXcd& out, double& worst) {
  double m = 0.5 * (a + b);
  VectorXcd left = gl_piece(c, diffs, p, a, m);
  VectorXcd right = gl_piece(c, diffs, p, m, b);
  double err = (whole - left - right).norm();
  if (err <= 1e-12 * (1.0 + left.norm() + right.norm()) || depth >= 14) {
    if (depth >= 14) worst = std::max(worst, err);
    out += left + right;
    return;
  }
  integrate_rec(c, diffs, p, a, m, left, depth + 1, out, worst);
  integrate_rec(c, diffs, p, m, b, right, depth + 1, out, worst);
}

VectorXcd integrate_piece(const SpectralCurve& c,
                          const std::vector<Differential>& diffs,
                          const Piece& p, double& worst) {
  VectorXcd out = VectorXcd::Zero(diffs.size());
  for (int k = 0; k < 4; ++k) {
    double a = k / 4.0, b = (k + 1) / 4.0;
    integrate_rec(c, diffs, p, a, b, gl_piece(c, diffs, p, a, b), 0, out,
                  worst);
  }
  return out;
}

// Closed-contour trapezoid integral of all differentials; the piece must
// parametrize a loop (lambda periodic with period 1).
VectorXcd integrate_closed(const SpectralCurve& c,
                           const std::vector<Differential>& diffs,
                           const Piece& p, bool& converged) {
  VectorXcd prev = VectorXcd::Zero(diffs.size());
  converged = false;
  for (int n = 256; n <= 65536; n *= 2) {
    VectorXcd acc = VectorXcd::Zero(diffs.size());
    for (int k = 0; k < n; ++k) {
      double t = (k + 0.5) / n;  // midpoint flavor, avoids the seam at 0
      acc += eval_forms(c, diffs, p.lam(t), p.y(t), p.dlam(t));
    }
    acc /= n;
    if (n > 256 && (acc - prev).norm() <= 1e-11 * (1.0 + acc.norm())) {
      converged = true;
      return acc;
    }
    prev = acc;
  }
  return prev;
}

// ---------------------------------------------------------------------------
// Deterministic polyline in the lambda plane from a to b avoiding the given
// obstacle points; side/scale select homotopy variants.
void route_segment(std::vector<cplx>& out, cplx a, cplx b,
                   const std::vector<cplx>& obs, double r_o, double side,
                   double scale, int depth) {
  if (depth < 8) {
    double best_d = r_o;
    cplx best_o = 0.0;
    bool hit = false;
    cplx dir = b - a;
    double len2 = std::norm(dir);
    for (cplx o : obs) {
      if (std::abs(o - a) < 1.2 * r_o || std::abs(o - b) < 1.2 * r_o)
        continue;
      double t = ((o - a) * std::conj(dir)).real() / len2;
      if (t <= 0.0 || t >= 1.0) continue;
      double d = std::abs(a + t * dir - o);
      if (d < best_d) {
        best_d = d;
        best_o = o;
        hit = true;
      }
    }
    if (hit) {
      cplx normal = kI * (b - a) / std::abs(b - a);
      cplx w = best_o + scale * r_o * side * normal;
      route_segment(out, a, w, obs, r_o, side, scale, depth + 1);
      route_segment(out, w, b, obs, r_o, side, scale, depth + 1);
      return;
    }
  }
  out.push_back(b);
}

std::vector<cplx> route(cplx a, cplx b, const std::vector<cplx>& obs_in,
                        int variant) {
  std::vector<cplx> obs;  // duplicates would zero out the separation scale
  for (cplx o : obs_in) {
    bool dup = false;
    for (cplx p : obs)
      if (std::abs(o - p) < 1e-12) dup = true;
    if (!dup) obs.push_back(o);
  }
  double min_sep = 1e300;
  for (size_t i = 0; i < obs.size(); ++i)
    for (size_t j = i + 1; j < obs.size(); ++j)
      min_sep = std::min(min_sep, std::abs(obs[i] - obs[j]));
  if (obs.size() < 2) min_sep = 1.0;
  double r_o = 0.25 * min_sep;
  double side = (variant % 2 == 0) ? 1.0 : -1.0;
  double scale = 1.5 + 0.5 * (variant / 2);
  std::vector<cplx> verts{a};
  route_segment(verts, a, b, obs, r_o, side, scale, 0);
  // nudge interior vertices off any obstacle they grazed
  for (size_t k = 1; k + 1 < verts.size(); ++k)
    for (cplx o : obs)
      if (std::abs(verts[k] - o) < 1e-6)
        verts[k] += 2e-6 * cplx(M_SQRT1_2, M_SQRT1_2);
  return verts;
}

struct PathEndpoint {
  bool infinite = false;
  bool branch = false;   // finite branch point (y = 0)
  cplx lam{0.0, 0.0};
  cplx y{0.0, 0.0};
  int inf_sign = 0;
};

PathEndpoint classify_endpoint(const SpectralCurve& c, const CurvePoint& p) {
  PathEndpoint e;
  if (p.at_infinity) {
    e.infinite = true;
    e.inf_sign = p.inf_sign;
    return e;
  }
  e.lam = p.coord;
  e.y = p.y;
  for (cplx b : c.branch_points)
    if (std::abs(p.coord - b) < 1e-9) {
      e.branch = true;
      e.lam = b;
      e.y = 0.0;
    }
  if (!e.branch && !c.contains(p, 1e-6))
    throw config_error("path endpoint does not satisfy the curve equation");
  return e;
}

// sign picked so that s*v matches target better; requires a clean match
double match_sign(cplx v, cplx target, const char* what) {
  double plus = std::abs(v - target), minus = std::abs(v + target);
  double good = std::min(plus, minus), bad = std::max(plus, minus);
  if (!(good <= 1e-4 * (1.0 + bad)))
    throw numeric_error(std::string("sheet matching failed at ") + what);
  return plus <= minus ? 1.0 : -1.0;
}

std::vector<cplx> gather_obstacles(const SpectralCurve& c,
                                   const std::vector<Differential>& diffs) {
  std::vector<cplx> obs = c.branch_points;
  for (const auto& d : diffs)
    if (d.kind == Differential::Kind::third_kind) {
      for (const CurvePoint* p : {&d.pole_plus, &d.pole_minus})
        if (!p->at_infinity) obs.push_back(p->coord);
    }
  return obs;
}

}  // namespace

VectorXcd hyper_integrate(const SpectralCurve& c,
                          const std::vector<Differential>& diffs,
                          const CurvePoint& base, const CurvePoint& target,
                          int path_variant) {
  if (base.close_to(target, 1e-12)) return VectorXcd::Zero(diffs.size());
  for (const auto& d : diffs)
    if (d.kind == Differential::Kind::third_kind)
      for (const CurvePoint* pl : {&d.pole_plus, &d.pole_minus})
        if (base.close_to(*pl, 1e-9) || target.close_to(*pl, 1e-9))
          throw config_error("divergent integral: endpoint at a pole of a "
                             "third-kind differential");

  PathEndpoint eb = classify_endpoint(c, base);
  PathEndpoint et = classify_endpoint(c, target);
  std::vector<cplx> obs = gather_obstacles(c, diffs);

  double obs_scale = 2.0;
  for (cplx o : obs) obs_scale = std::max(obs_scale, std::abs(o));
  if (!eb.infinite) obs_scale = std::max(obs_scale, std::abs(eb.lam));
  if (!et.infinite) obs_scale = std::max(obs_scale, std::abs(et.lam));
  cplx anchor_inf = (2.0 * obs_scale + 2.0) * std::exp(cplx(0.0, 0.4));

  auto build = [&](bool with_flip) {
    std::vector<Piece> pieces;
    cplx lam_a = eb.infinite ? anchor_inf : eb.lam;
    cplx lam_b = et.infinite ? anchor_inf : et.lam;
    if (eb.infinite) pieces.push_back(make_inf_piece(c, anchor_inf, false));

    auto add_polyline = [&](cplx from, cplx to, bool from_branch,
                            bool to_branch) {
      std::vector<cplx> verts = route(from, to, obs, path_variant);
      for (size_t k = 0; k + 1 < verts.size(); ++k) {
        bool first = k == 0, last = k + 2 == verts.size();
        if (first && last && from_branch && to_branch)
          pieces.push_back(make_branch_bridge(c, verts[k], verts[k + 1]));
        else if (first && from_branch)
          pieces.push_back(make_branch_out(c, verts[0], verts[1]));
        else if (last && to_branch)
          pieces.push_back(make_branch_in(c, verts[k], verts[k + 1]));
        else
          pieces.push_back(make_segment(c, verts[k], verts[k + 1]));
      }
    };

    if (with_flip) {
      // an excursion looping one branch point flips the arriving sheet
      cplx b0 = c.branch_points.front();
      double rc = 1e300;
      for (cplx o : obs)
        if (std::abs(o - b0) > 1e-12)
          rc = std::min(rc, std::abs(o - b0));
      rc = (rc > 1e200 ? 1.0 : 0.45 * rc);
      cplx loop_anchor = b0 + rc;
      // the flip is only needed when both ends are pinned, so lam_a is not
      // itself a branch point here; the return leg retraces the outbound
      // vertices so the excursion winds around b0 and nothing else
      std::vector<cplx> out = route(lam_a, loop_anchor, obs, path_variant);
      for (size_t k = 0; k + 1 < out.size(); ++k)
        pieces.push_back(make_segment(c, out[k], out[k + 1]));
      pieces.push_back(make_circle(c, b0, rc));
      for (size_t k = out.size() - 1; k > 0; --k)
        pieces.push_back(make_segment(c, out[k], out[k - 1]));
      add_polyline(lam_a, lam_b, false, et.branch);
    } else {
      add_polyline(lam_a, lam_b, eb.branch, et.branch);
    }
    if (et.infinite) pieces.push_back(make_inf_piece(c, anchor_inf, true));
    return pieces;
  };

  bool start_free = eb.branch || (eb.infinite && c.infinity_is_branch());

  auto propagate = [&](std::vector<Piece>& pieces) {
    const double tin = 1e-7, tout = 1.0 - 1e-7;
    bool start_pinned = !start_free;
    for (size_t k = 0; k < pieces.size(); ++k) {
      Piece& P = pieces[k];
      cplx v0 = P.pref(tin) * P.ytr->eval(tin);
      if (k == 0) {
        if (!start_pinned) {
          P.sigma = 1.0;
        } else if (eb.infinite) {
          // even-model infinity carries a sign tag; the tracked factor
          // product tends to +/-1 in the chart
          cplx lead = P.ytr->eval(1e-7);
          P.sigma = match_sign(lead, cplx(double(eb.inf_sign)), "inf base");
        } else {
          P.sigma = match_sign(v0, eb.y, "path base");
        }
      } else {
        Piece& Q = pieces[k - 1];
        cplx prev = Q.y(tout);
        if (Q.free_end || P.free_start ||
            std::abs(prev) < 1e-7 * (1.0 + std::abs(v0))) {
          P.sigma = 1.0;  // joint at a branch value, sheets merge
        } else {
          P.sigma = match_sign(v0, prev, "piece joint");
        }
      }
    }
    // does the path arrive on the sheet the target pins?
    const Piece& L = pieces.back();
    if (et.branch || (et.infinite && c.infinity_is_branch())) return true;
    if (et.infinite) {
      cplx lead = L.sigma * L.ytr->eval(1.0 - 1e-7);
      return std::abs(lead - cplx(double(et.inf_sign))) <
             std::abs(lead + cplx(double(et.inf_sign)));
    }
    cplx ye = L.y(tout);
    double ok = std::abs(ye - et.y), bad = std::abs(ye + et.y);
    if (std::min(ok, bad) > 1e-4 * (1.0 + std::max(ok, bad)))
      throw numeric_error("sheet matching failed at path target");
    return ok <= bad;
  };

  std::vector<Piece> pieces = build(false);
  if (!propagate(pieces)) {
    if (start_free) {
      for (auto& p : pieces) p.sigma = -p.sigma;
    } else {
      pieces = build(true);
      if (!propagate(pieces))
        throw numeric_error("sheet repair loop did not flip the sheet");
    }
  }

  VectorXcd total = VectorXcd::Zero(diffs.size());
  double worst = 0.0;
  for (const auto& p : pieces) total += integrate_piece(c, diffs, p, worst);
  if (worst > 1e-7)
    throw numeric_error("path integration did not converge, residual " +
                        std::to_string(worst));
  return total;
}

cplx hyper_residue(const SpectralCurve& c, const Differential& d,
                   const CurvePoint& pole) {
  if (pole.at_infinity)
    throw config_error("residue: infinite poles unsupported here");
  double r = 1e300;
  for (cplx e : c.branch_points)
    r = std::min(r, std::abs(pole.coord - e));
  const CurvePoint& other =
      d.pole_plus.close_to(pole, 1e-9) ? d.pole_minus : d.pole_plus;
  if (!other.at_infinity && std::abs(other.coord - pole.coord) > 1e-12)
    r = std::min(r, std::abs(other.coord - pole.coord));
  r *= 0.4;

  // walk outward from the pole on its own sheet, then seed the circle there
  Piece bridge = make_segment(c, pole.coord, pole.coord + r);
  bridge.sigma = match_sign(bridge.ytr->eval(1e-9), pole.y, "residue seed");
  Piece circ = make_circle(c, pole.coord, r);
  circ.sigma = match_sign(circ.ytr->eval(0.0), bridge.y(1.0 - 1e-9),
                          "residue circle");
  // the circle stays on one sheet (no branch point inside)
  bool conv = false;
  VectorXcd v = integrate_closed(c, {d}, circ, conv);
  if (!conv) throw numeric_error("residue contour did not converge");
  return v(0) / (kTwoPi * kI);
}

namespace {

struct Loop {
  Piece piece;
  VectorXcd integral;           // raw integrals of all differentials
  std::vector<cplx> nodes_lam;  // polyline for intersection counting
  std::vector<cplx> nodes_y;
};

Loop build_loop(const SpectralCurve& c, const std::vector<Differential>& diffs,
                cplx f1, cplx f2, double pad, int label) {
  cplx mid = 0.5 * (f1 + f2);
  cplx dir = (f2 - f1) / std::abs(f2 - f1);
  double a_ax = 0.5 * std::abs(f2 - f1) + pad, b_ax = pad;
  Loop L;
  L.piece = make_tracked_piece(
      c,
      [mid, dir, a_ax, b_ax](double t) {
        return mid + dir * cplx(a_ax * std::cos(kTwoPi * t),
                                b_ax * std::sin(kTwoPi * t));
      },
      [mid, dir, a_ax, b_ax](double t) {
        return dir * kTwoPi *
               cplx(-a_ax * std::sin(kTwoPi * t), b_ax * std::cos(kTwoPi * t));
      },
      0.0);
  // closed-contour sheet consistency: an ellipse encloses exactly two branch
  // points, so the tracked sheet must come back to itself
  cplx y0 = L.piece.ytr->eval(1e-9), y1 = L.piece.ytr->eval(1.0 - 2e-9);
  if (std::abs(y0 - y1) > 1e-5 * (1.0 + std::abs(y0)))
    throw numeric_error("period contour " + std::to_string(label) +
                        " does not close up on one sheet");
  bool conv = false;
  L.integral = integrate_closed(c, diffs, L.piece, conv);
  if (!conv)
    throw numeric_error("period contour " + std::to_string(label) +
                        " did not converge");
  const int N = 2048;
  L.nodes_lam.resize(N);
  L.nodes_y.resize(N);
  for (int k = 0; k < N; ++k) {
    double t = (k + 0.5) / N;
    L.nodes_lam[k] = L.piece.lam(t);
    L.nodes_y[k] = L.piece.y(t);
  }
  return L;
}

// signed same-sheet crossing count of two closed polylines
int intersection_number(const Loop& A, const Loop& B) {
  double acc = 0.0;
  const auto& P = A.nodes_lam;
  const auto& Q = B.nodes_lam;
  const int NP = static_cast<int>(P.size()), NQ = static_cast<int>(Q.size());
  for (int i = 0; i < NP; ++i) {
    cplx a0 = P[i], a1 = P[(i + 1) % NP];
    cplx da = a1 - a0;
    for (int j = 0; j < NQ; ++j) {
      cplx b0 = Q[j], b1 = Q[(j + 1) % NQ];
      cplx db = b1 - b0;
      double den = da.real() * db.imag() - da.imag() * db.real();
      if (std::abs(den) < 1e-300) continue;
      cplx r = b0 - a0;
      double s = (r.real() * db.imag() - r.imag() * db.real()) / den;
      double u = (r.real() * da.imag() - r.imag() * da.real()) / den;
      if (s < 0.0 || s >= 1.0 || u < 0.0 || u >= 1.0) continue;
      cplx ya = A.nodes_y[i], yb = B.nodes_y[j];
      double same = std::abs(ya - yb), diff = std::abs(ya + yb);
      if (std::min(same, diff) > 0.85 * std::max(same, diff))
        throw numeric_error("ambiguous sheet at a contour crossing");
      if (same < diff) acc += den > 0.0 ? 1.0 : -1.0;
    }
  }
  int n = static_cast<int>(std::lround(acc));
  if (std::abs(acc - n) > 0.25)
    throw numeric_error("non-integer intersection count");
  return n;
}

}  // namespace

PeriodData hyper_period_lattice(const SpectralCurve& c,
                                const std::vector<Differential>& diffs) {
  const int g = c.genus;
  const int n = static_cast<int>(diffs.size()) - g;
  if (n < 0)
    throw config_error("period lattice: fewer differentials than the genus");
  for (int i = 0; i < g; ++i)
    if (diffs[i].kind != Differential::Kind::holomorphic)
      throw config_error("period lattice: the first g differentials must be "
                         "holomorphic");
  for (int l = 0; l < n; ++l)
    if (diffs[g + l].kind != Differential::Kind::third_kind)
      throw config_error("period lattice: trailing differentials must be "
                         "third kind");

  const auto& e = c.branch_points;
  const int nloops = 2 * g;
  std::vector<cplx> poles;
  for (int l = 0; l < n; ++l) {
    poles.push_back(diffs[g + l].pole_plus.coord);
    poles.push_back(diffs[g + l].pole_minus.coord);
  }

  auto loop_pad = [&](int i) {
    double dmin = 1e300;
    for (size_t k = 0; k < e.size(); ++k) {
      if (static_cast<int>(k) == i || static_cast<int>(k) == i + 1) continue;
      dmin = std::min(dmin, std::abs(e[k] - e[i]));
      dmin = std::min(dmin, std::abs(e[k] - e[i + 1]));
    }
    double pad = dmin / (std::sqrt(2.0) * 1.3);
    // do not let the contour pass through a pole of a third-kind form
    for (int rounds = 0; rounds < 30; ++rounds) {
      cplx mid = 0.5 * (e[i] + e[i + 1]);
      cplx dir = (e[i + 1] - e[i]) / std::abs(e[i + 1] - e[i]);
      double a_ax = 0.5 * std::abs(e[i + 1] - e[i]) + pad;
      double too_close = false;
      for (int k = 0; k < 256 && !too_close; ++k) {
        cplx z = mid + dir * cplx(a_ax * std::cos(kTwoPi * k / 256.0),
                                  pad * std::sin(kTwoPi * k / 256.0));
        for (cplx p : poles)
          if (std::abs(z - p) < 1e-3) too_close = true;
      }
      if (!too_close) break;
      pad *= 0.9;
    }
    return pad;
  };

  auto build_all = [&](double shrink) {
    std::vector<Loop> loops;
    for (int i = 0; i < nloops; ++i)
      loops.push_back(
          build_loop(c, diffs, e[i], e[i + 1], shrink * loop_pad(i), i));
    return loops;
  };

  std::vector<Loop> loops = build_all(1.0);

  Eigen::MatrixXi omega = Eigen::MatrixXi::Zero(nloops, nloops);
  for (int i = 0; i < nloops; ++i)
    for (int j = i + 1; j < nloops; ++j) {
      int v = intersection_number(loops[i], loops[j]);
      omega(i, j) = v;
      omega(j, i) = -v;
    }

  // integer symplectic basis out of the chain loops
  auto form = [&](const Eigen::VectorXi& u, const Eigen::VectorXi& v) {
    return (u.transpose() * omega * v)(0, 0);
  };
  std::vector<Eigen::VectorXi> pool;
  for (int i = 0; i < nloops; ++i)
    pool.push_back(Eigen::VectorXi::Unit(nloops, i));
  std::vector<Eigen::VectorXi> acyc, bcyc;
  while (!pool.empty()) {
    int pi = -1, pj = -1;
    for (size_t i = 0; i < pool.size() && pi < 0; ++i)
      for (size_t j = i + 1; j < pool.size() && pi < 0; ++j)
        if (std::abs(form(pool[i], pool[j])) == 1) {
          pi = static_cast<int>(i);
          pj = static_cast<int>(j);
        }
    if (pi < 0)
      throw numeric_error("no unimodular pivot in the intersection form");
    Eigen::VectorXi a = pool[pi], b = pool[pj];
    if (form(a, b) == -1) std::swap(a, b);
    std::vector<Eigen::VectorXi> rest;
    for (size_t k = 0; k < pool.size(); ++k) {
      if (static_cast<int>(k) == pi || static_cast<int>(k) == pj) continue;
      Eigen::VectorXi v = pool[k] - form(pool[k], b) * a + form(pool[k], a) * b;
      rest.push_back(v);
    }
    acyc.push_back(a);
    bcyc.push_back(b);
    pool = std::move(rest);
  }
  if (static_cast<int>(acyc.size()) != g)
    throw numeric_error("symplectic reduction produced the wrong rank");

  auto combo = [&](const std::vector<Loop>& ls, const Eigen::VectorXi& v) {
    VectorXcd s = VectorXcd::Zero(diffs.size());
    for (int k = 0; k < nloops; ++k)
      if (v(k) != 0) s += double(v(k)) * ls[k].integral;
    return s;
  };

  auto assemble = [&](const std::vector<Loop>& ls,
                      const std::vector<Eigen::VectorXi>& ac,
                      const std::vector<Eigen::VectorXi>& bc, MatrixXcd& A,
                      MatrixXcd& B, MatrixXcd& ta, MatrixXcd& tb) {
    A.resize(g, g);
    B.resize(g, g);
    ta.resize(g, n);
    tb.resize(g, n);
    for (int j = 0; j < g; ++j) {
      VectorXcd va = combo(ls, ac[j]), vb = combo(ls, bc[j]);
      for (int i = 0; i < g; ++i) {
        A(i, j) = va(i);
        B(i, j) = vb(i);
      }
      for (int l = 0; l < n; ++l) {
        ta(j, l) = va(g + l);  // c_{jl}: a-cycle j against third-kind form l
        tb(j, l) = vb(g + l);
      }
    }
  };

  MatrixXcd A, B, ta_cyc, tb_cyc;
  assemble(loops, acyc, bcyc, A, B, ta_cyc, tb_cyc);
  MatrixXcd tau = A.partialPivLu().solve(B);

  auto posdef = [&](const MatrixXcd& t) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(
        (t.imag() + t.imag().transpose()) / 2.0);
    if (es.eigenvalues().minCoeff() > 0.0) return 1;
    if (es.eigenvalues().maxCoeff() < 0.0) return -1;
    return 0;
  };
  if (posdef(tau) < 0) {
    std::swap(acyc, bcyc);
    assemble(loops, acyc, bcyc, A, B, ta_cyc, tb_cyc);
    tau = A.partialPivLu().solve(B);
  }
  if (posdef(tau) <= 0)
    throw numeric_error("imaginary part of the Riemann matrix is not "
                        "positive definite");

  PeriodData pd;
  pd.g = g;
  pd.n = n;
  pd.a_periods = A;
  pd.b_periods = B;
  pd.tau = tau;
  pd.normalizer = A.inverse();
  pd.third_a = ta_cyc;
  pd.third_b = tb_cyc;

  // fiber components of the b-generators
  MatrixXcd fiberB(n, g);
  for (int j = 0; j < g; ++j)
    for (int l = 0; l < n; ++l) {
      cplx corr = 0.0;
      for (int i = 0; i < g; ++i) corr += pd.third_a(i, l) * tau(i, j);
      fiberB(l, j) = (pd.third_b(j, l) - corr) / (kTwoPi * kI);
    }

  pd.lattice.g = g;
  pd.lattice.n = n;
  pd.lattice.gens = MatrixXcd::Zero(g + n, 2 * g + n);
  for (int i = 0; i < g; ++i) pd.lattice.gens(i, i) = 1.0;
  for (int j = 0; j < g; ++j) {
    for (int i = 0; i < g; ++i) pd.lattice.gens(i, g + j) = tau(i, j);
    for (int l = 0; l < n; ++l) pd.lattice.gens(g + l, g + j) = fiberB(l, j);
  }
  for (int l = 0; l < n; ++l) pd.lattice.gens(g + l, 2 * g + l) = 1.0;

  double fit_res = 0.0;
  pd.lattice.M =
      involution_matrix(c, diffs, pd.normalizer, pd.third_a, &fit_res);
  if (fit_res > 1e-6)
    throw numeric_error("involution fit residual " + std::to_string(fit_res));

  // re-integrate on shrunk contours and compare
  std::vector<Loop> loops2 = build_all(0.7);
  for (int k = 0; k < nloops; ++k) {
    const VectorXcd& v1 = loops[k].integral;
    VectorXcd& v2 = loops2[k].integral;
    if ((v2 + v1).norm() < (v2 - v1).norm()) v2 = -v2;  // seed sheet flip
  }
  MatrixXcd A2, B2, ta2, tb2;
  assemble(loops2, acyc, bcyc, A2, B2, ta2, tb2);
  MatrixXcd tau2 = A2.partialPivLu().solve(B2);
  double resid = (tau - tau2).cwiseAbs().maxCoeff();
  resid = std::max(resid, (A - A2).norm() / (1.0 + A.norm()));
  for (int j = 0; j < g; ++j)
    for (int l = 0; l < n; ++l) {
      cplx corr = 0.0;
      for (int i = 0; i < g; ++i) corr += ta2(i, l) * tau2(i, j);
      cplx f2 = (tb2(j, l) - corr) / (kTwoPi * kI);
      cplx dfib = fiberB(l, j) - f2;
      resid = std::max(resid,
                       std::abs(dfib - std::round(dfib.real())));
    }
  pd.deformation_residual = resid;
  return pd;
}

VectorXcd hyper_differential_values(const SpectralCurve& c,
                                    const std::vector<Differential>& diffs,
                                    const CurvePoint& p, int ram_index) {
  if (p.at_infinity)
    throw config_error("differential values at infinity are unsupported");
  if (std::abs(p.coord) > 1e-8)
    throw config_error("differential values: lambda must vanish at the "
                       "point");
  bool branch_at_zero = false;
  for (cplx e : c.branch_points)
    if (std::abs(e) < 1e-12) branch_at_zero = true;

  VectorXcd out(diffs.size());
  if (branch_at_zero) {
    if (ram_index != 2)
      throw config_error("branch point carries ramification index 2");
    cplx h0 = 1.0;
    for (cplx e : c.branch_points)
      if (std::abs(e) > 1e-12) h0 *= -e;
    h0 = std::sqrt(h0);
    for (size_t i = 0; i < diffs.size(); ++i) {
      const auto& d = diffs[i];
      if (d.kind == Differential::Kind::holomorphic) {
        out(static_cast<int>(i)) = 2.0 * d.num.eval(0.0) / h0;
      } else {
        cplx lp = d.pole_plus.coord, yp = d.pole_plus.y;
        cplx lq = d.pole_minus.coord, yq = d.pole_minus.y;
        out(static_cast<int>(i)) = -(yp * lq - yq * lp) / (h0 * lp * lq);
      }
    }
    return out;
  }
  if (ram_index != 1)
    throw config_error("unramified point carries ramification index 1");
  for (size_t i = 0; i < diffs.size(); ++i)
    out(static_cast<int>(i)) = diffs[i].coeff(c, p.coord, p.y);
  return out;
}

}  // namespace harmap::detail
