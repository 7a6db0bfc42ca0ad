#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pointprob/model.hpp"

namespace pointprob {

// Dense probability window over [offset, offset + masses.size() - 1] plus
// the certified mass dropped outside it.  Invariant: masses are nonnegative
// and sum + tail_defect lies within 1e-12 of 1.
struct Pmf {
    long long offset = 0;
    std::vector<double> masses;
    double tail_defect = 0.0;

    long long lo() const { return offset; }
    long long hi() const { return offset + static_cast<long long>(masses.size()) - 1; }

    // Mass at n; 0 outside the window.
    double at(long long n) const {
        const long long i = n - offset;
        if (i < 0 || i >= static_cast<long long>(masses.size())) return 0.0;
        return masses[static_cast<size_t>(i)];
    }
};

// Window of d covering all but at most eps of the mass; eps in (0, 1e-6].
// The dropped tail is certified analytically (exact geometric tail, Chernoff
// bound for Poisson); finite supports never lose mass.
Pmf truncate(const DistributionSpec& d, double eps);

// Distribution of the sum by direct convolution of truncated component
// windows, combined in a fixed tree order.  The eps budget is split evenly
// across the summed variables.  Throws ResourceLimit when an intermediate
// window would exceed max_entries.
Pmf exact_pmf(const SumModel& m, double eps = 1e-9, std::size_t max_entries = 10'000'000);

struct InversionDetail {
    double prob = 0.0;
    double imag_residual = 0.0;  // |Im| of the quadrature, required < 1e-10
    std::size_t quad_points = 0;
};

// Pr[X = n] through the characteristic-function inversion integral,
// evaluated with the trapezoid rule on [-pi, pi] (spectrally accurate for
// this periodic integrand).  quad_points = 0 selects 4x the support-width
// estimate rounded up to a power of two, at least 256; explicit values must
// be >= 64.
InversionDetail inversion_prob_detail(const SumModel& m, long long n,
                                      std::size_t quad_points = 0);
double inversion_prob(const SumModel& m, long long n, std::size_t quad_points = 0);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Monte Carlo indicator mean Pr[X = n] with binomial standard error.
// Reproducible for a fixed seed.
McEstimate mc_estimate(const SumModel& m, long long n, std::uint64_t samples,
                       std::uint64_t seed);

}  // namespace pointprob
