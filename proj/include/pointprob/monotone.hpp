#pragma once

#include <cstddef>
#include <vector>

#include "pointprob/model.hpp"

namespace pointprob {

// log |E exp(i lambda X)| for the whole sum.  Computed family-wise in log
// space, so large counts attenuate without underflow; an exactly vanishing
// transform yields -infinity.
double log_char_modulus(const SumModel& m, double lambda);

// log_char_modulus sampled on a uniform grid over [0, pi], both endpoints
// included.  grid_size must be at least 2.
std::vector<double> modulus_profile(const SumModel& m, std::size_t grid_size);

struct MonotoneReport {
    bool is_monotone = false;
    double worst_increase = 0.0;  // largest rise between adjacent grid points
    double worst_location = 0.0;  // right endpoint (lambda) of that rise
    std::size_t grid_size = 0;
    double tolerance = 0.0;
};

// Checks that the transform modulus never rises across the [0, pi] grid.
// Rises within tolerance count as flat, so plateaus (e.g. constant models)
// pass.  grid_size must be at least 16 and tolerance nonnegative.
MonotoneReport check_monotone(const SumModel& m, std::size_t grid_size = 4096,
                              double tolerance = 1e-12);

struct StrongMonotoneEntry {
    double theta = 0.0;
    MonotoneReport report;
};

struct StrongMonotoneReport {
    bool all_monotone = false;
    std::vector<StrongMonotoneEntry> entries;
};

// Re-runs the modulus check on exponentially tilted copies of the model.
// The tilt parameters form a uniform grid of theta_samples points (at least
// 3) spanning [-3, 3] clipped 1e-3 inside the joint mgf domain.
StrongMonotoneReport check_strong_monotone(const SumModel& m,
                                           std::size_t theta_samples = 7,
                                           std::size_t grid_size = 4096,
                                           double tolerance = 1e-12);

}  // namespace pointprob
