#include "pointprob/estimator.hpp"

#include <cmath>
#include <numbers>

#include "pointprob/errors.hpp"

namespace pointprob {

EstimateResult gaussian_point_estimate(const SumModel& m, long long n,
                                       const Thresholds& thresholds) {
    if (!(thresholds.sigma_sq_floor >= 0.0) || !std::isfinite(thresholds.sigma_sq_floor))
        throw ValidationError("sigma_sq_floor must be finite and nonnegative");
    if (!(thresholds.tau_ceiling > 0.0) || !std::isfinite(thresholds.tau_ceiling))
        throw ValidationError("tau_ceiling must be finite and positive");

    const MomentSummary s = summarize(m);
    if (!s.tau.has_value())
        throw DegenerateModel("point estimate undefined for an almost surely constant sum");

    EstimateResult r;
    const double sigma = s.sigma();
    r.t = (static_cast<double>(n) - s.mu) / sigma;
    r.tau = *s.tau;
    r.estimate = std::exp(-0.5 * r.t * r.t) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
    r.error_term = r.tau * r.tau;
    if (r.tau > 0.0 && r.tau < 1.0)
        r.epsilon = std::sqrt(8.0 * std::log(1.0 / r.tau)) / sigma;

    r.flags.sigma_large_enough = s.sigma_sq >= thresholds.sigma_sq_floor;
    r.flags.tau_small_enough = r.tau <= thresholds.tau_ceiling;
    r.flags.epsilon_le_pi = r.epsilon.has_value() && *r.epsilon <= std::numbers::pi;
    return r;
}

}  // namespace pointprob
