#pragma once

#include <optional>

#include "pointprob/model.hpp"

namespace pointprob {

// Applicability thresholds for the normal-curve point estimate.
struct Thresholds {
    double sigma_sq_floor = 100.0;
    double tau_ceiling = 0.1;
};

struct EstimateFlags {
    bool sigma_large_enough = false;  // Var[X] >= sigma_sq_floor
    bool tau_small_enough = false;    // tau <= tau_ceiling
    bool epsilon_le_pi = false;       // diagnostic width fits one period
};

struct EstimateResult {
    double estimate = 0.0;    // exp(-t^2/2) / (sqrt(2 pi) sigma)
    double error_term = 0.0;  // tau^2; the absolute error scales with it
    double t = 0.0;           // standardized coordinate (n - mu) / sigma
    double tau = 0.0;         // sum of scaled third absolute central moments
    // sqrt(8 log(1/tau)) / sigma; defined only when tau is in (0, 1).
    std::optional<double> epsilon;
    EstimateFlags flags;
};

// Normal-curve estimate of Pr[X = n] for the sum described by m.  Always
// computes the estimate and its error scale; the flags say whether the
// model is inside the regime where the error bound is meaningful.  Throws
// DegenerateModel when the sum is almost surely constant.
EstimateResult gaussian_point_estimate(const SumModel& m, long long n,
                                       const Thresholds& thresholds = {});

}  // namespace pointprob
