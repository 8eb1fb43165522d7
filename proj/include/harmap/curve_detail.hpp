#pragma once

#include "harmap/curve.hpp"

namespace harmap::detail {

// Heavy hyperelliptic numerics, implemented separately from the shared
// curve core.
PeriodData hyper_period_lattice(const SpectralCurve& c,
                                const std::vector<Differential>& diffs);

VectorXcd hyper_integrate(const SpectralCurve& c,
                          const std::vector<Differential>& diffs,
                          const CurvePoint& base, const CurvePoint& target,
                          int path_variant);

cplx hyper_residue(const SpectralCurve& c, const Differential& d,
                   const CurvePoint& pole);

VectorXcd hyper_differential_values(const SpectralCurve& c,
                                    const std::vector<Differential>& diffs,
                                    const CurvePoint& p, int ram_index);

}  // namespace harmap::detail
