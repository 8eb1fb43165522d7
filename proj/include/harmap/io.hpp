#pragma once

#include <cstdint>
#include <iosfwd>

#include "harmap/thetamap.hpp"
#include "harmap/verify.hpp"

namespace harmap {

// One run description: curve, bundle data, grid, engine and output routing.
// The curve is constructed at parse time; the spectral data is assembled on
// demand so that validation can report construction problems as failing
// checks instead of refusing the file.
struct RunConfig {
  SpectralCurve curve;
  Divisor line_divisor;
  std::vector<CurvePoint> designated_zeros;
  int k = 1;
  TargetKind target = TargetKind::grassmannian;

  Tolerances tol;
  std::string engine = "exact";  // exact | theta | both
  double domain[4] = {-1.0, 1.0, -1.0, 1.0};
  int grid[2] = {16, 16};
  std::string out;                   // output path prefix; reports default
                                     // to the command stream when empty
  std::vector<std::string> checks;   // verify subset; empty = all applicable
  std::string mesh;                  // mesh metadata to cross-check
  double fault = 0.0;                // test hook perturbing one loop entry
  std::uint64_t fingerprint = 0;     // hash of the raw config bytes

  SpectralData build() const {
    return make_spectral_data(curve, line_divisor, k, target,
                              designated_zeros);
  }
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

std::string hex64(std::uint64_t v);

// fixed float formatting (17 significant digits) used for every number in
// CSV and report output, so identical runs emit identical bytes
std::string fmt17(double v);

// Each command writes a structured-text report to the stream and returns the
// process exit code: 0 all checks passed, 1 a check failed.  Malformed input
// raises config_error, which the CLI maps to exit code 2.
int run_validate(const RunConfig& cfg, std::ostream& report);
int run_periods(const RunConfig& cfg, std::ostream& report);
int run_theta(const RunConfig& cfg, std::ostream& report);
int run_synth(const RunConfig& cfg, std::ostream& report);
int run_verify(const RunConfig& cfg, std::ostream& report);
int run_classify(const RunConfig& cfg, std::ostream& report);

}  // namespace harmap
