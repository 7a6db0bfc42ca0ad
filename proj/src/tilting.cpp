#include "pointprob/tilting.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>

#include "pointprob/errors.hpp"

namespace pointprob {
namespace {

struct SupportEnds {
    long long lo = 0;
    std::optional<long long> hi;
};

SupportEnds unit_support(const DistributionSpec& d) {
    return std::visit(
        [](const auto& g) -> SupportEnds {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                return {g.p == 1.0 ? 1LL : 0LL, g.p == 0.0 ? 0LL : 1LL};
            } else if constexpr (std::is_same_v<T, Geometric>) {
                if (g.p == 0.0) return {0, 0};
                return {0, std::nullopt};
            } else if constexpr (std::is_same_v<T, Poisson>) {
                if (g.rate == 0.0) return {0, 0};
                return {0, std::nullopt};
            } else {
                return {g.atoms.front().value, g.atoms.back().value};
            }
        },
        d);
}

// Residual tolerance: the solver stops once |psi'(theta) - t| drops below it.
double solve_tolerance(double t) { return 1e-10 * std::max(1.0, std::fabs(t)); }

}  // namespace

EssentialBounds essential_bounds(const SumModel& m) {
    EssentialBounds b;
    b.lower = 0;
    b.upper = 0;
    for (const Component& c : m.components()) {
        const SupportEnds ends = unit_support(c.dist);
        *b.lower += c.count * ends.lo;
        if (b.upper && ends.hi)
            *b.upper += c.count * *ends.hi;
        else
            b.upper.reset();
    }
    return b;
}

MgfInterval mgf_domain_intersection(const SumModel& m) {
    MgfInterval domain = MgfInterval::whole_line();
    for (const Component& c : m.components()) domain = domain.intersect(mgf_domain(c.dist));
    return domain;
}

TiltSolution solve_tilt(const SumModel& m, double t) {
    if (!std::isfinite(t))
        throw ValidationError("tilt target must be finite");
    if (m.degenerate())
        throw DegenerateModel("tilting cannot move an almost surely constant sum");

    const EssentialBounds bounds = essential_bounds(m);
    if (bounds.lower && t <= static_cast<double>(*bounds.lower))
        throw OutOfRange("target " + std::to_string(t) +
                         " is at or below the smallest possible value " +
                         std::to_string(*bounds.lower) +
                         "; the end point mass is exact in boundary_point_prob");
    if (bounds.upper && t >= static_cast<double>(*bounds.upper))
        throw OutOfRange("target " + std::to_string(t) +
                         " is at or above the largest possible value " +
                         std::to_string(*bounds.upper) +
                         "; the end point mass is exact in boundary_point_prob");

    const MgfInterval domain = mgf_domain_intersection(m);
    const double tol = solve_tolerance(t);

    const double f0 = cgf_prime(m, 0.0) - t;
    if (std::fabs(f0) <= tol) {
        // Already at the mean; theta = 0 keeps the model bitwise intact.
        SumModel tilted = tilt(m, 0.0);
        MomentSummary moments = summarize(tilted);
        return TiltSolution{0.0, t, cgf(m, 0.0), std::move(tilted), moments, std::fabs(f0)};
    }

    // Bracket the root of f(theta) = psi'(theta) - t, walking geometrically
    // toward the relevant end of the domain.  psi' is strictly increasing.
    double theta_lo = 0.0;
    double theta_hi = 0.0;
    {
        bool found = false;
        if (f0 >= 0.0) {
            theta_hi = 0.0;
            for (int k = 0; k <= 64 && !found; ++k) {
                const double cand = std::isfinite(domain.lo) ? domain.lo + std::ldexp(1.0, -k)
                                                             : -std::ldexp(1.0, k);
                if (cand >= theta_hi) continue;
                theta_lo = cand;
                found = cgf_prime(m, theta_lo) - t <= 0.0;
            }
        } else {
            theta_lo = 0.0;
            // A finite edge is approached as hi - 2^-k; 2^-45 is the closest
            // the solver will go, which already allows astronomical means.
            const int cap = std::isfinite(domain.hi) ? 45 : 64;
            for (int k = 0; k <= cap && !found; ++k) {
                const double cand = std::isfinite(domain.hi) ? domain.hi - std::ldexp(1.0, -k)
                                                             : std::ldexp(1.0, k);
                if (cand <= theta_lo) continue;
                theta_hi = cand;
                found = cgf_prime(m, theta_hi) - t >= 0.0;
            }
        }
        if (!found)
            throw DomainError("could not bracket a tilt reaching mean " + std::to_string(t));
    }

    double theta = (theta_lo < 0.0 && theta_hi > 0.0) ? 0.0 : 0.5 * (theta_lo + theta_hi);
    double residual = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 256; ++iter) {
        const double f = cgf_prime(m, theta) - t;
        residual = std::fabs(f);
        if (residual <= tol) break;
        if (f < 0.0)
            theta_lo = theta;
        else
            theta_hi = theta;
        const double next = theta - f / cgf_double_prime(m, theta);
        theta = (next > theta_lo && next < theta_hi) ? next : 0.5 * (theta_lo + theta_hi);
    }
    if (!(residual <= tol))
        throw DomainError("tilt iteration stalled at residual " + std::to_string(residual) +
                          " for target " + std::to_string(t));

    SumModel tilted = tilt(m, theta);
    MomentSummary moments = summarize(tilted);
    return TiltSolution{theta, t, cgf(m, theta), std::move(tilted), moments, residual};
}

double rate_function(const TiltSolution& sol) {
    return sol.theta * sol.t - sol.cgf_value;
}

double rate_function(const SumModel& m, double t) { return rate_function(solve_tilt(m, t)); }

TailEstimate tail_point_estimate(const SumModel& m, long long n,
                                 const Thresholds& thresholds) {
    TiltSolution sol = solve_tilt(m, static_cast<double>(n));
    EstimateResult r = gaussian_point_estimate(sol.tilted, n, thresholds);

    // Pr[X = n] = exp(psi(theta) - theta n) Pr[Y = n]; rescale the tilted
    // estimate and its error scale in log space.
    const double log_prefactor = sol.cgf_value - sol.theta * static_cast<double>(n);
    r.estimate = std::exp(log_prefactor + std::log(r.estimate));
    r.error_term = std::exp(log_prefactor + std::log(r.error_term));
    return TailEstimate{std::move(r), std::move(sol)};
}

double boundary_point_prob(const SumModel& m, Boundary side) {
    double log_prob = 0.0;
    for (const Component& c : m.components()) {
        const double term = std::visit(
            [&](const auto& g) -> double {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Bernoulli>) {
                    if (side == Boundary::lower) return g.p == 1.0 ? 0.0 : std::log1p(-g.p);
                    return g.p == 0.0 ? 0.0 : std::log(g.p);
                } else if constexpr (std::is_same_v<T, Geometric>) {
                    if (side == Boundary::lower) return std::log1p(-g.p);
                    if (g.p == 0.0) return 0.0;
                    throw UnboundedSide("a geometric part has no largest value");
                } else if constexpr (std::is_same_v<T, Poisson>) {
                    if (side == Boundary::lower) return -g.rate;
                    if (g.rate == 0.0) return 0.0;
                    throw UnboundedSide("a poisson part has no largest value");
                } else {
                    return std::log(side == Boundary::lower ? g.atoms.front().weight
                                                            : g.atoms.back().weight);
                }
            },
            c.dist);
        log_prob += static_cast<double>(c.count) * term;
    }
    return std::exp(log_prob);
}

}  // namespace pointprob
