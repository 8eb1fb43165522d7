#include <CLI11.hpp>

#include <Eigen/Core>
#include <cstdlib>
#include <iostream>

#include "harmap/io.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string grid;
  std::string domain;
  std::string engine;
  std::string target;
  std::string out;
  double tol_curve = 0, tol_period = 0, tol_lattice = 0, tol_theta_zero = 0,
         tol_exact = 0, tol_frame = 0, tol_proj = 0;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--config", a.config, "run description (json)")->required();
  sub->add_option("--grid", a.grid, "sample counts NX,NY");
  sub->add_option("--domain", a.domain, "plane window x0,x1,y0,y1");
  sub->add_option("--engine", a.engine, "exact | theta | both")
      ->check(CLI::IsMember({"exact", "theta", "both"}));
  sub->add_option("--target", a.target, "grassmannian | pu");
  sub->add_option("--out", a.out, "output path prefix");
  sub->add_option("--tol.curve", a.tol_curve, "curve reality tolerance");
  sub->add_option("--tol.period", a.tol_period, "period tolerance");
  sub->add_option("--tol.lattice", a.tol_lattice, "lattice tolerance");
  sub->add_option("--tol.theta_zero", a.tol_theta_zero,
                  "theta vanishing tolerance");
  sub->add_option("--tol.exact", a.tol_exact, "loop coefficient tolerance");
  sub->add_option("--tol.frame", a.tol_frame, "frame equation tolerance");
  sub->add_option("--tol.proj", a.tol_proj, "projection tolerance");
}

void apply(const CLI::App* sub, const CommonArgs& a, harmap::RunConfig& cfg) {
  using harmap::config_error;
  if (sub->count("--grid")) {
    if (std::sscanf(a.grid.c_str(), "%d,%d", &cfg.grid[0], &cfg.grid[1]) != 2)
      throw config_error("--grid expects NX,NY");
  }
  if (sub->count("--domain")) {
    if (std::sscanf(a.domain.c_str(), "%lf,%lf,%lf,%lf", &cfg.domain[0],
                    &cfg.domain[1], &cfg.domain[2], &cfg.domain[3]) != 4)
      throw config_error("--domain expects x0,x1,y0,y1");
  }
  if (cfg.grid[0] < 1 || cfg.grid[1] < 1 || cfg.domain[1] <= cfg.domain[0] ||
      cfg.domain[3] <= cfg.domain[2])
    throw config_error("degenerate grid or domain");
  if (sub->count("--engine")) cfg.engine = a.engine;
  if (sub->count("--target")) {
    if (a.target == "grassmannian")
      cfg.target = harmap::TargetKind::grassmannian;
    else if (a.target == "pu" || a.target == "projective_unitary")
      cfg.target = harmap::TargetKind::projective_unitary;
    else
      throw config_error("unknown target: " + a.target);
  }
  if (sub->count("--out")) cfg.out = a.out;
  if (sub->count("--tol.curve")) cfg.tol.curve = a.tol_curve;
  if (sub->count("--tol.period")) cfg.tol.period = a.tol_period;
  if (sub->count("--tol.lattice")) cfg.tol.lattice = a.tol_lattice;
  if (sub->count("--tol.theta_zero")) cfg.tol.theta_zero = a.tol_theta_zero;
  if (sub->count("--tol.exact")) cfg.tol.exact = a.tol_exact;
  if (sub->count("--tol.frame")) cfg.tol.frame = a.tol_frame;
  if (sub->count("--tol.proj")) cfg.tol.proj = a.tol_proj;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("HARMAP_THREADS"))
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));

  CLI::App app{"harmonic map toolkit for spectral-curve families"};
  app.require_subcommand(1);

  CommonArgs args;
  struct Cmd {
    const char* name;
    const char* desc;
    int (*run)(const harmap::RunConfig&, std::ostream&);
  };
  const Cmd cmds[] = {
      {"validate", "check curve, bundle and period consistency",
       harmap::run_validate},
      {"periods", "report the period lattice and Riemann matrix",
       harmap::run_periods},
      {"theta", "report the theta-map constants", harmap::run_theta},
      {"synth", "sample the map over a grid and write CSV + metadata",
       harmap::run_synth},
      {"verify", "run structural and differential checks on the map",
       harmap::run_verify},
      {"classify", "tag the algebraic reduction type and search periods",
       harmap::run_classify},
  };
  for (const auto& c : cmds) add_common(app.add_subcommand(c.name, c.desc), args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const CLI::App* sub = app.get_subcommands().at(0);
    harmap::RunConfig cfg = harmap::load_config(args.config);
    apply(sub, args, cfg);
    for (const auto& c : cmds)
      if (sub->get_name() == c.name) return c.run(cfg, std::cout);
    return 2;
  } catch (const harmap::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
