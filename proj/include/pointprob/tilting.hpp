#pragma once

#include <optional>

#include "pointprob/estimator.hpp"
#include "pointprob/model.hpp"

namespace pointprob {

// Endpoints of the support of the sum; an absent side is unbounded.
struct EssentialBounds {
    std::optional<long long> lower;
    std::optional<long long> upper;
};
EssentialBounds essential_bounds(const SumModel& m);

// Intersection of the component mgf domains; always contains 0.
MgfInterval mgf_domain_intersection(const SumModel& m);

struct TiltSolution {
    double theta = 0.0;
    double t = 0.0;               // target mean handed to the solver
    double cgf_value = 0.0;       // psi(theta) of the original sum
    SumModel tilted;              // every component tilted by theta
    MomentSummary tilted_moments; // mean matches t up to the residual
    double residual = 0.0;        // |psi'(theta) - t| at the returned theta
};

// Solves psi'(theta) = t by safeguarded Newton iteration, to a residual of
// at most 1e-10 * max(1, |t|).  t must lie strictly between the essential
// bounds of the sum (OutOfRange otherwise; the boundary points themselves
// have the closed form in boundary_point_prob).  Throws DegenerateModel for
// almost surely constant sums.
TiltSolution solve_tilt(const SumModel& m, double t);

// Large-deviation exponent theta t - psi(theta) at the solved tilt;
// nonnegative, and zero exactly when t is the mean.
double rate_function(const TiltSolution& sol);
double rate_function(const SumModel& m, double t);

struct TailEstimate {
    // Final numbers for Pr[X = n]: the normal-curve estimate of the tilted
    // sum at its own mean, scaled back by exp(psi(theta) - theta n).  The
    // diagnostics (t, tau, epsilon, flags) all describe the tilted sum.
    EstimateResult result;
    TiltSolution solution;
};
TailEstimate tail_point_estimate(const SumModel& m, long long n,
                                 const Thresholds& thresholds = {});

enum class Boundary { lower, upper };

// Exact probability that the sum equals its essential boundary point,
// computed in log space.  Throws UnboundedSide when that side is infinite.
double boundary_point_prob(const SumModel& m, Boundary side);

}  // namespace pointprob
