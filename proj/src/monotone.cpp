#include "pointprob/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <variant>

#include "pointprob/errors.hpp"

namespace pointprob {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log |E e^{i lambda X}| for one variable, in closed form per family so the
// value stays finite wherever the true modulus is positive.
double unit_log_modulus(const DistributionSpec& d, double lambda) {
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                return 0.5 * std::log1p(2.0 * g.p * (1.0 - g.p) * (std::cos(lambda) - 1.0));
            } else if constexpr (std::is_same_v<T, Geometric>) {
                if (g.p == 0.0) return 0.0;
                return std::log1p(-g.p) -
                       0.5 * std::log(1.0 + g.p * g.p - 2.0 * g.p * std::cos(lambda));
            } else if constexpr (std::is_same_v<T, Poisson>) {
                return g.rate * (std::cos(lambda) - 1.0);
            } else {
                // No closed form for arbitrary atoms; rounding may leave the
                // squared modulus a hair negative near a zero.
                const double msq = std::max(char_fn_modulus_sq(d, lambda), 0.0);
                return 0.5 * std::log(msq);
            }
        },
        d);
}

}  // namespace

double log_char_modulus(const SumModel& m, double lambda) {
    double total = 0.0;
    for (const Component& c : m.components())
        total += static_cast<double>(c.count) * unit_log_modulus(c.dist, lambda);
    return total;
}

std::vector<double> modulus_profile(const SumModel& m, std::size_t grid_size) {
    if (grid_size < 2)
        throw ValidationError("modulus profile needs at least 2 grid points, got " +
                              std::to_string(grid_size));
    std::vector<double> out(grid_size);
    const double step = std::numbers::pi / static_cast<double>(grid_size - 1);
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double lambda =
            (i + 1 == grid_size) ? std::numbers::pi : step * static_cast<double>(i);
        out[i] = log_char_modulus(m, lambda);
    }
    return out;
}

MonotoneReport check_monotone(const SumModel& m, std::size_t grid_size, double tolerance) {
    if (grid_size < 16)
        throw ValidationError("monotonicity grid needs at least 16 points, got " +
                              std::to_string(grid_size));
    if (!(tolerance >= 0.0) || !std::isfinite(tolerance))
        throw ValidationError("monotonicity tolerance must be finite and nonnegative");

    const std::vector<double> profile = modulus_profile(m, grid_size);
    const double step = std::numbers::pi / static_cast<double>(grid_size - 1);

    MonotoneReport report;
    report.grid_size = grid_size;
    report.tolerance = tolerance;
    report.worst_increase = -kInf;
    for (std::size_t i = 1; i < grid_size; ++i) {
        double rise = profile[i] - profile[i - 1];
        // -inf to -inf: the modulus sits at zero on both points, which is flat.
        if (std::isnan(rise)) rise = 0.0;
        if (rise > report.worst_increase) {
            report.worst_increase = rise;
            report.worst_location =
                (i + 1 == grid_size) ? std::numbers::pi : step * static_cast<double>(i);
        }
    }
    report.is_monotone = report.worst_increase <= tolerance;
    return report;
}

StrongMonotoneReport check_strong_monotone(const SumModel& m, std::size_t theta_samples,
                                           std::size_t grid_size, double tolerance) {
    if (theta_samples < 3)
        throw ValidationError("strong monotonicity needs at least 3 tilt samples, got " +
                              std::to_string(theta_samples));

    MgfInterval domain = MgfInterval::whole_line();
    for (const Component& c : m.components()) domain = domain.intersect(mgf_domain(c.dist));
    const double lo = std::isfinite(domain.lo) ? std::max(-3.0, domain.lo + 1e-3) : -3.0;
    const double hi = std::isfinite(domain.hi) ? std::min(3.0, domain.hi - 1e-3) : 3.0;
    if (!(lo < hi))
        throw DomainError("mgf domain leaves no room for a tilt window");

    StrongMonotoneReport out;
    out.all_monotone = true;
    out.entries.reserve(theta_samples);
    const double step = (hi - lo) / static_cast<double>(theta_samples - 1);
    for (std::size_t k = 0; k < theta_samples; ++k) {
        const double theta = (k + 1 == theta_samples) ? hi : lo + step * static_cast<double>(k);
        StrongMonotoneEntry entry;
        entry.theta = theta;
        entry.report = check_monotone(tilt(m, theta), grid_size, tolerance);
        out.all_monotone = out.all_monotone && entry.report.is_monotone;
        out.entries.push_back(std::move(entry));
    }
    return out;
}

}  // namespace pointprob
