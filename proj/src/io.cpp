#include "harmap/io.hpp"

#include <json.hpp>

#include "harmap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace harmap {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string jstr(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string jnum(double v) { return fmt17(v); }

std::string jcplx(cplx v) {
  return "[" + jnum(v.real()) + "," + jnum(v.imag()) + "]";
}

std::string jvec(const VectorXcd& v) {
  std::string out = "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += jcplx(v(i));
  }
  return out + "]";
}

std::string jmat(const MatrixXcd& m) {
  std::string out = "[";
  for (int i = 0; i < m.rows(); ++i) {
    if (i) out += ",";
    out += "[";
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out += ",";
      out += jcplx(m(i, j));
    }
    out += "]";
  }
  return out + "]";
}

void emit_checks(std::ostream& os, const std::vector<CheckResult>& checks) {
  os << "\"checks\":[";
  for (size_t i = 0; i < checks.size(); ++i) {
    if (i) os << ",";
    os << "{\"name\":" << jstr(checks[i].name)
       << ",\"pass\":" << (checks[i].pass ? "true" : "false")
       << ",\"detail\":" << jstr(checks[i].detail) << "}";
  }
  os << "]";
}

std::string tol_block(const Tolerances& t) {
  std::ostringstream os;
  os << "{\"curve\":" << jnum(t.curve) << ",\"period\":" << jnum(t.period)
     << ",\"lattice\":" << jnum(t.lattice)
     << ",\"theta_zero\":" << jnum(t.theta_zero)
     << ",\"exact\":" << jnum(t.exact) << ",\"frame\":" << jnum(t.frame)
     << ",\"proj\":" << jnum(t.proj) << "}";
  return os.str();
}

cplx parse_cplx(const json& j) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (j.is_array() && (j.size() == 1 || j.size() == 2)) {
    double re = j.at(0).get<double>();
    double im = j.size() == 2 ? j.at(1).get<double>() : 0.0;
    return cplx(re, im);
  }
  throw config_error("expected a number or [re, im] pair");
}

Poly parse_poly(const json& j) {
  std::vector<cplx> c;
  for (const auto& e : j) c.push_back(parse_cplx(e));
  return Poly(std::move(c));
}

CurvePoint parse_point(const json& j, const SpectralCurve& c) {
  if (c.kind == CurveKind::rational) {
    if (j.is_string() && j.get<std::string>() == "inf")
      return CurvePoint::rational_infinity();
    return CurvePoint::rational(parse_cplx(j));
  }
  if (!j.is_object())
    throw config_error(
        "hyperelliptic points need an object with branch / infinity / "
        "lambda+sheet");
  if (j.contains("branch")) {
    cplx lam = parse_cplx(j.at("branch"));
    return CurvePoint::hyper(lam, 0.0);
  }
  if (j.contains("infinity"))
    return CurvePoint::hyper_infinity(j.at("infinity").get<int>());
  if (j.contains("lambda")) {
    cplx lam = parse_cplx(j.at("lambda"));
    cplx y = std::sqrt(c.branch_product(lam));
    if (j.value("sheet", 0) != 0) y = -y;
    return CurvePoint::hyper(lam, y);
  }
  throw config_error("unrecognized hyperelliptic point spec");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw config_error(std::string("config parse: ") + e.what());
  }
  try {
    RunConfig cfg;
    cfg.fingerprint = fnv1a64(text);

    const json& jc = j.at("curve");
    std::string kind = jc.at("kind").get<std::string>();
    if (kind == "rational")
      cfg.curve = SpectralCurve::make_rational(parse_poly(jc.at("numerator")),
                                               parse_poly(jc.at("denominator")));
    else if (kind == "hyperelliptic") {
      std::vector<cplx> b;
      for (const auto& e : jc.at("branch_points")) b.push_back(parse_cplx(e));
      cfg.curve = SpectralCurve::make_hyperelliptic(std::move(b));
    } else
      throw config_error("unknown curve kind: " + kind);

    for (const auto& t : j.at("line_divisor"))
      cfg.line_divisor.push_back(
          {parse_point(t.at("point"), cfg.curve), t.value("mult", 1)});
    for (const auto& p : j.at("designated_zeros"))
      cfg.designated_zeros.push_back(parse_point(p, cfg.curve));

    cfg.k = j.value("k", 1);
    std::string tgt = j.value("target", "grassmannian");
    if (tgt == "grassmannian")
      cfg.target = TargetKind::grassmannian;
    else if (tgt == "pu" || tgt == "projective_unitary")
      cfg.target = TargetKind::projective_unitary;
    else
      throw config_error("unknown target: " + tgt);

    cfg.engine = j.value("engine", "exact");
    if (cfg.engine != "exact" && cfg.engine != "theta" &&
        cfg.engine != "both")
      throw config_error("unknown engine: " + cfg.engine);

    if (j.contains("domain")) {
      const auto& d = j.at("domain");
      if (d.size() != 4) throw config_error("domain needs [x0, x1, y0, y1]");
      for (int i = 0; i < 4; ++i) cfg.domain[i] = d.at(i).get<double>();
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.size() != 2) throw config_error("grid needs [nx, ny]");
      cfg.grid[0] = g.at(0).get<int>();
      cfg.grid[1] = g.at(1).get<int>();
    }
    if (cfg.grid[0] < 1 || cfg.grid[1] < 1 ||
        cfg.domain[1] <= cfg.domain[0] || cfg.domain[3] <= cfg.domain[2])
      throw config_error("degenerate grid or domain");

    cfg.out = j.value("out", "");
    cfg.mesh = j.value("mesh", "");
    cfg.fault = j.value("fault", 0.0);
    if (j.contains("checks"))
      for (const auto& c : j.at("checks"))
        cfg.checks.push_back(c.get<std::string>());

    if (j.contains("tol")) {
      const auto& t = j.at("tol");
      cfg.tol.curve = t.value("curve", cfg.tol.curve);
      cfg.tol.period = t.value("period", cfg.tol.period);
      cfg.tol.lattice = t.value("lattice", cfg.tol.lattice);
      cfg.tol.theta_zero = t.value("theta_zero", cfg.tol.theta_zero);
      cfg.tol.exact = t.value("exact", cfg.tol.exact);
      cfg.tol.frame = t.value("frame", cfg.tol.frame);
      cfg.tol.proj = t.value("proj", cfg.tol.proj);
    }
    return cfg;
  } catch (const json::exception& e) {
    throw config_error(std::string("config schema: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

struct Pipeline {
  SpectralData data;
  std::vector<Differential> diffs;
  PeriodData pd;
  FlowSpec flow;
};

Pipeline pipeline(const RunConfig& cfg) {
  Pipeline p{cfg.build(), {}, {}, {}};
  p.diffs = marked_differentials(p.data);
  p.pd = period_lattice(p.data.curve, p.diffs);
  p.flow = FlowSpec::from_directions(direction_vectors(p.data, p.diffs, p.pd),
                                     p.pd.lattice);
  return p;
}

std::vector<cplx> interior_nodes(const RunConfig& cfg) {
  std::vector<cplx> nodes;
  for (int iy = 0; iy < 3; ++iy)
    for (int ix = 0; ix < 3; ++ix)
      nodes.push_back(
          cplx(cfg.domain[0] +
                   (ix + 0.5) * (cfg.domain[1] - cfg.domain[0]) / 3.0,
               cfg.domain[2] +
                   (iy + 0.5) * (cfg.domain[3] - cfg.domain[2]) / 3.0));
  return nodes;
}

// grid coordinate along one axis, endpoints included
double grid_coord(double lo, double hi, int i, int n) {
  return n > 1 ? lo + i * (hi - lo) / (n - 1) : 0.5 * (lo + hi);
}

void append_complex_row(std::string& row, const VectorXcd& v) {
  for (int i = 0; i < v.size(); ++i) {
    row += ",";
    row += fmt17(v(i).real());
    row += ",";
    row += fmt17(v(i).imag());
  }
}

struct MeshResult {
  std::string csv_path;
  std::string meta_path;
  int rows = 0;
};

// evaluates the map on the configured grid and writes CSV plus a metadata
// block; node -> value goes through the supplied evaluator
MeshResult write_mesh(const RunConfig& cfg, const std::string& tag,
                      int value_dim,
                      const std::function<VectorXcd(cplx)>& eval,
                      const std::string& extra_meta) {
  MeshResult res;
  res.csv_path = cfg.out + "_" + tag + ".csv";
  res.meta_path = cfg.out + "_" + tag + ".json";

  std::ofstream csv(res.csv_path, std::ios::binary);
  if (!csv) throw config_error("cannot write " + res.csv_path);
  std::string header = "x,y";
  for (int i = 0; i < value_dim; ++i)
    header += ",re" + std::to_string(i) + ",im" + std::to_string(i);
  csv << header << "\n";

  for (int iy = 0; iy < cfg.grid[1]; ++iy)
    for (int ix = 0; ix < cfg.grid[0]; ++ix) {
      double x = grid_coord(cfg.domain[0], cfg.domain[1], ix, cfg.grid[0]);
      double y = grid_coord(cfg.domain[2], cfg.domain[3], iy, cfg.grid[1]);
      VectorXcd v = eval(cplx(x, y));
      if (v.size() != value_dim)
        throw numeric_error("map value has unexpected dimension");
      std::string row = fmt17(x);
      row += ",";
      row += fmt17(y);
      append_complex_row(row, v);
      csv << row << "\n";
      ++res.rows;
    }
  csv.close();

  std::ofstream meta(res.meta_path, std::ios::binary);
  if (!meta) throw config_error("cannot write " + res.meta_path);
  meta << "{\"config\":" << jstr(hex64(cfg.fingerprint))
       << ",\"engine\":" << jstr(tag) << ",\"target\":"
       << jstr(cfg.target == TargetKind::grassmannian ? "grassmannian"
                                                      : "projective_unitary")
       << ",\"k\":" << cfg.k << ",\"domain\":[" << jnum(cfg.domain[0]) << ","
       << jnum(cfg.domain[1]) << "," << jnum(cfg.domain[2]) << ","
       << jnum(cfg.domain[3]) << "],\"grid\":[" << cfg.grid[0] << ","
       << cfg.grid[1] << "],\"tolerances\":" << tol_block(cfg.tol)
       << ",\"csv\":" << jstr(res.csv_path) << ",\"rows\":" << res.rows
       << ",\"header\":" << jstr(header) << extra_meta << "}\n";
  return res;
}

// flow argument with the grid parameter in the first direction
VectorXcd flow_point(int directions, cplx w) {
  VectorXcd z = VectorXcd::Zero(directions);
  z(0) = w;
  return z;
}

std::string period_meta(const FlowSpec& flow, const GeneralizedLattice& lat) {
  if (flow.U.cols() != 1) return "";
  auto rep = periodicity_search(flow, lat);
  std::string out = ",\"periods\":[";
  for (size_t i = 0; i < rep.periods.size(); ++i) {
    if (i) out += ",";
    out += "[" + jnum(rep.periods[i].x) + "," + jnum(rep.periods[i].y) + "]";
  }
  out += "],\"torus\":";
  out += rep.torus ? "true" : "false";
  return out;
}

bool enabled(const RunConfig& cfg, const std::string& name) {
  if (cfg.checks.empty()) return true;
  for (const auto& c : cfg.checks)
    if (c == name) return true;
  return false;
}

int finish_report(std::ostream& os, const RunConfig& cfg,
                  const std::vector<CheckResult>& checks,
                  const std::string& extra = "") {
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  os << "{\"config\":" << jstr(hex64(cfg.fingerprint)) << ",";
  emit_checks(os, checks);
  os << extra << ",\"all_pass\":" << (all ? "true" : "false") << "}\n";
  return all ? 0 : 1;
}

}  // namespace

int run_validate(const RunConfig& cfg, std::ostream& report) {
  std::vector<CheckResult> checks;
  auto absorb = [&](const ValidationReport& rep, const std::string& prefix) {
    for (const auto& c : rep.checks)
      checks.push_back({prefix + c.name, c.pass, c.detail});
  };

  absorb(validate_real_structure(cfg.curve), "curve: ");

  bool built = false;
  SpectralData data;
  try {
    data = cfg.build();
    built = true;
    checks.push_back({"spectral: construction", true, ""});
  } catch (const config_error& e) {
    checks.push_back({"spectral: construction", false, e.what()});
  }
  if (built) {
    absorb(validate_spectral(data, cfg.tol), "spectral: ");
    try {
      auto diffs = marked_differentials(data);
      auto pd = period_lattice(data.curve, diffs);
      absorb(pd.validate(cfg.tol), "periods: ");
      absorb(pd.lattice.validate(cfg.tol.lattice), "lattice: ");
      absorb(validate_spectral_periods(data, diffs, pd, cfg.tol),
             "spectral: ");
    } catch (const std::exception& e) {
      checks.push_back({"periods: construction", false, e.what()});
    }
  }
  return finish_report(report, cfg, checks);
}

int run_periods(const RunConfig& cfg, std::ostream& report) {
  auto p = pipeline(cfg);
  std::vector<CheckResult> checks;
  for (const auto& c : p.pd.validate(cfg.tol).checks)
    checks.push_back({"periods: " + c.name, c.pass, c.detail});
  for (const auto& c : p.pd.lattice.validate(cfg.tol.lattice).checks)
    checks.push_back({"lattice: " + c.name, c.pass, c.detail});

  std::ostringstream extra;
  extra << ",\"genus\":" << p.pd.g << ",\"marked\":" << p.pd.n
        << ",\"tau\":" << jmat(p.pd.tau)
        << ",\"generators\":" << jmat(p.pd.lattice.gens)
        << ",\"involution\":" << jmat(p.pd.lattice.M)
        << ",\"deformation_residual\":" << jnum(p.pd.deformation_residual);
  return finish_report(report, cfg, checks, extra.str());
}

int run_theta(const RunConfig& cfg, std::ostream& report) {
  auto data = cfg.build();
  auto engine = make_theta_engine(data);
  std::ostringstream os;
  os << "{\"config\":" << jstr(hex64(cfg.fingerprint))
     << ",\"genus\":" << engine.g << ",\"components\":" << engine.n + 1
     << ",\"directions\":" << engine.directions()
     << ",\"riemann_constant\":" << jvec(engine.K)
     << ",\"vanishing_shift\":" << jvec(engine.kappa)
     << ",\"component_shifts\":[";
  for (size_t i = 0; i < engine.shifts.size(); ++i) {
    if (i) os << ",";
    os << jvec(engine.shifts[i]);
  }
  os << "],\"scales\":[";
  for (int i = 0; i < engine.scales.size(); ++i) {
    if (i) os << ",";
    os << jnum(engine.scales(i));
  }
  os << "]}\n";
  report << os.str();
  return 0;
}

int run_synth(const RunConfig& cfg, std::ostream& report) {
  if (cfg.out.empty())
    throw config_error("synth needs an output path prefix (out)");
  auto p = pipeline(cfg);
  const std::string periods = period_meta(p.flow, p.pd.lattice);

  std::vector<MeshResult> written;
  ExactEngine exact;
  ThetaMapEngine theta;
  bool use_exact = cfg.engine == "exact" || cfg.engine == "both";
  bool use_theta = cfg.engine == "theta" || cfg.engine == "both";

  if (use_exact) {
    if (p.pd.g != 0)
      throw config_error("exact engine requires a rational curve");
    exact = make_exact_engine(p.data);
    const int m = exact.size();
    const int dirs = static_cast<int>(exact.nu.size());
    if (cfg.target == TargetKind::grassmannian) {
      auto eval = [&](cplx w) {
        MatrixXcd F = frame(exact, flow_point(dirs, w), cplx(1.0, 0.0));
        VectorXcd v(cfg.k * m);
        for (int c = 0; c < cfg.k; ++c) v.segment(c * m, m) = F.col(c);
        return v;
      };
      written.push_back(write_mesh(cfg, "exact", cfg.k * m, eval, periods));
    } else {
      auto eval = [&](cplx w) {
        MatrixXcd Psi = pu_map(exact, flow_point(dirs, w));
        return VectorXcd(Eigen::Map<const VectorXcd>(Psi.data(), m * m));
      };
      written.push_back(write_mesh(cfg, "exact", m * m, eval, periods));
    }
  }
  if (use_theta) {
    theta = make_theta_engine(p.data);
    std::vector<VectorXcd> sample;
    for (cplx w : interior_nodes(cfg))
      sample.push_back(flow_point(theta.directions(), w));
    sample.resize(5);
    auto cal = calibrate_constants(theta, sample);
    theta.scales = cal.scales;
    std::string extra = periods + ",\"scales\":[";
    for (int i = 0; i < theta.scales.size(); ++i) {
      if (i) extra += ",";
      extra += jnum(theta.scales(i));
    }
    extra += "],\"calibration_residual\":" + jnum(cal.residual);
    auto eval = [&](cplx w) {
      return theta_map_point(theta, flow_point(theta.directions(), w));
    };
    written.push_back(write_mesh(cfg, "theta", theta.n + 1, eval, extra));
  }

  std::ostringstream os;
  os << "{\"config\":" << jstr(hex64(cfg.fingerprint)) << ",\"files\":[";
  for (size_t i = 0; i < written.size(); ++i) {
    if (i) os << ",";
    os << jstr(written[i].csv_path) << "," << jstr(written[i].meta_path);
  }
  os << "]";
  if (use_exact && use_theta &&
      cfg.target == TargetKind::grassmannian && cfg.k == 1) {
    std::vector<MatrixXcd> a, b;
    const int dirs = static_cast<int>(exact.nu.size());
    for (cplx w : interior_nodes(cfg)) {
      a.push_back(theta_projection(theta, flow_point(theta.directions(), w)));
      b.push_back(grassmannian_map(exact, flow_point(dirs, w)));
    }
    auto align = isometry_check(a, b, cfg.k);
    os << ",\"alignment_fs\":" << jnum(align.max_fs);
  }
  os << "}\n";
  report << os.str();
  return 0;
}

int run_verify(const RunConfig& cfg, std::ostream& report) {
  if (!cfg.mesh.empty()) {
    std::ifstream in(cfg.mesh, std::ios::binary);
    if (!in) throw config_error("cannot read mesh metadata: " + cfg.mesh);
    json meta;
    try {
      meta = json::parse(in);
    } catch (const std::exception& e) {
      throw config_error(std::string("mesh metadata parse: ") + e.what());
    }
    if (meta.value("config", "") != hex64(cfg.fingerprint))
      throw config_error("mesh was produced by a different config (hash " +
                         meta.value("config", std::string("missing")) +
                         " vs " + hex64(cfg.fingerprint) + ")");
  }

  auto p = pipeline(cfg);
  std::vector<CheckResult> checks;
  std::ostringstream residuals;
  residuals << ",\"residuals\":{";
  bool first_resid = true;
  auto add_residual = [&](const std::string& name, const ResidualReport& r) {
    if (!first_resid) residuals << ",";
    first_resid = false;
    residuals << jstr(name) << ":{\"h\":[";
    for (size_t i = 0; i < r.h.size(); ++i)
      residuals << (i ? "," : "") << jnum(r.h[i]);
    residuals << "],\"sup\":[";
    for (size_t i = 0; i < r.sup.size(); ++i)
      residuals << (i ? "," : "") << jnum(r.sup[i]);
    residuals << "],\"slope\":" << jnum(r.has_slope ? r.slope : 0.0) << "}";
  };

  bool use_exact = cfg.engine == "exact" || cfg.engine == "both";
  bool use_theta = cfg.engine == "theta" || cfg.engine == "both";
  if (use_exact && p.pd.g != 0)
    throw config_error("exact engine requires a rational curve");

  auto nodes = interior_nodes(cfg);
  const std::vector<double> ladder = {4e-3, 2e-3, 1e-3};
  const double harmonic_tol = 1e-4;

  if (enabled(cfg, "lattice")) {
    for (const auto& c : p.pd.lattice.validate(cfg.tol.lattice).checks)
      checks.push_back({"lattice: " + c.name, c.pass, c.detail});
  }

  ExactEngine exact;
  if (use_exact) {
    exact = make_exact_engine(p.data);
    if (cfg.fault != 0.0) exact.A[0][0](cfg.k, 0) += cfg.fault;
  }

  if (use_exact && enabled(cfg, "structure")) {
    auto rep = loop_structure_check(exact, cfg.tol.exact);
    for (const auto& c : rep.checks)
      checks.push_back({"structure: " + c.name, c.pass, c.detail});
  }

  const int dirs = use_exact ? static_cast<int>(exact.nu.size()) : 0;
  if (use_exact && enabled(cfg, "harmonicity")) {
    if (cfg.target == TargetKind::grassmannian) {
      auto rep = harmonicity_residual(
          [&](cplx w) { return grassmannian_map(exact, flow_point(dirs, w)); },
          nodes, ladder, harmonic_tol);
      checks.push_back({"harmonicity: exact field", rep.pass,
                        "sup " + fmt17(rep.sup.back())});
      add_residual("exact", rep);
    } else {
      auto rep = group_harmonicity_residual(
          [&](cplx w) { return pu_map(exact, flow_point(dirs, w)); }, nodes,
          ladder, harmonic_tol);
      checks.push_back({"harmonicity: exact unitary field", rep.pass,
                        "sup " + fmt17(rep.sup.back())});
      add_residual("exact", rep);
    }
  }
  if (use_exact && enabled(cfg, "conformality") &&
      cfg.target == TargetKind::grassmannian) {
    cplx mid(0.5 * (cfg.domain[0] + cfg.domain[1]) + 0.037,
             0.5 * (cfg.domain[2] + cfg.domain[3]) + 0.041);
    cplx v = conformality_value(
        [&](cplx w) { return grassmannian_map(exact, flow_point(dirs, w)); },
        mid, 2e-3);
    bool conformal = std::abs(v) <= 1e-6;
    checks.push_back(
        {"conformality: matches declared direction type",
         conformal == p.data.conformal_direction,
         "metric coefficient " + fmt17(v.real()) + (v.imag() < 0 ? "-" : "+") +
             fmt17(std::abs(v.imag())) + "i"});
  }
  if (use_exact && enabled(cfg, "equivariance")) {
    MatrixField field =
        cfg.target == TargetKind::grassmannian
            ? MatrixField([&](cplx w) {
                return grassmannian_map(exact, flow_point(dirs, w));
              })
            : MatrixField(
                  [&](cplx w) { return pu_map(exact, flow_point(dirs, w)); });
    double worst = 0.0;
    for (cplx step : {cplx(0.4, 0.0), cplx(0.0, 0.3)})
      worst = std::max(worst, equivariance_fit(field, step, nodes).defect);
    checks.push_back({"equivariance: plane translations act by conjugation",
                      worst <= 1e-6, "worst fit defect " + fmt17(worst)});
  }

  if (use_theta) {
    auto theta = make_theta_engine(p.data);
    auto field = [&](cplx w) {
      return theta_projection(theta, flow_point(theta.directions(), w));
    };
    if (enabled(cfg, "harmonicity")) {
      auto rep = harmonicity_residual(field, nodes, ladder, harmonic_tol);
      checks.push_back({"harmonicity: theta field", rep.pass,
                        "sup " + fmt17(rep.sup.back()) + ", slope " +
                            fmt17(rep.has_slope ? rep.slope : 0.0)});
      add_residual("theta", rep);
    }
    if (enabled(cfg, "equivariance")) {
      auto split = equivariance_directions(p.flow, p.pd.g);
      if (split.kernel.empty()) {
        checks.push_back({"equivariance: forced directions", true,
                          "no forced direction at this genus"});
      } else {
        double worst = 0.0;
        for (const auto& v : split.kernel)
          worst = std::max(
              worst,
              equivariance_fit(field, 0.5 * cplx(v(0), v(1)), nodes).defect);
        checks.push_back({"equivariance: forced directions act by conjugation",
                          worst <= 1e-6, "worst fit defect " + fmt17(worst)});
      }
    }
  }

  residuals << "}";
  return finish_report(report, cfg, checks, residuals.str());
}

int run_classify(const RunConfig& cfg, std::ostream& report) {
  auto p = pipeline(cfg);
  auto type = classify_algebraic(p.data, p.pd, p.flow);
  std::ostringstream os;
  os << "{\"config\":" << jstr(hex64(cfg.fingerprint))
     << ",\"tag\":" << jstr(type.tag)
     << ",\"evidence\":" << jstr(type.evidence);
  if (p.flow.U.cols() == 1) {
    auto rep = periodicity_search(p.flow, p.pd.lattice);
    os << ",\"periods\":[";
    for (size_t i = 0; i < rep.periods.size(); ++i) {
      if (i) os << ",";
      os << "[" << jnum(rep.periods[i].x) << "," << jnum(rep.periods[i].y)
         << "]";
    }
    os << "],\"degenerate_directions\":" << rep.degenerate.size()
       << ",\"torus\":" << (rep.torus ? "true" : "false");
  }
  os << "}\n";
  report << os.str();
  return 0;
}

}  // namespace harmap
