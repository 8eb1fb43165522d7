#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace harmap {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline const cplx kI{0.0, 1.0};

// Tolerance bundle threaded through the pipeline; every field can be
// overridden from the run configuration or the CLI.
struct Tolerances {
  double curve = 1e-10;       // point-on-curve and structural identities
  double period = 1e-8;       // Riemann matrix symmetry / contour invariance
  double lattice = 1e-8;      // lattice membership and reduction residuals
  double theta_zero = 1e-7;   // divisor-of-zeros matching for theta translates
  double exact = 1e-13;       // Laurent-coefficient identities in the exact engine
  double frame = 1e-9;        // frame unitarity on the unit circle
  double proj = 1e-10;        // projection-field algebraic identities
};

// A configuration or input file is malformed (schema, parse, impossible
// request).  CLI maps this to exit code 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A mathematical validation check failed on structurally valid input.
// CLI maps this to exit code 1.
struct check_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical procedure failed to converge or an internal invariant broke.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  void add(std::string name, bool pass, std::string detail = "") {
    checks.push_back({std::move(name), pass, std::move(detail)});
  }
};

}  // namespace harmap
