#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "pointprob/errors.hpp"

namespace pointprob {

// ---------------------------------------------------------------------------
// Distribution families
//
// Supported integer-valued building blocks for sums of independent variables.
// Every instance is valid by construction; constructors throw ValidationError
// on bad parameters.
// ---------------------------------------------------------------------------

// Pr[X = 1] = p, Pr[X = 0] = 1 - p.  p in [0, 1].
struct Bernoulli {
    explicit Bernoulli(double success_prob);
    double p;
};

// Number of failures before the first success when the per-trial failure
// probability is p: Pr[X = k] = p^k (1 - p) for k = 0, 1, 2, ...
// p in [0, 1); p = 0 is the constant 0.
struct Geometric {
    explicit Geometric(double failure_prob);
    double p;
};

// Pr[X = k] = rate^k e^{-rate} / k!.  rate > 0.
struct Poisson {
    explicit Poisson(double rate_param);
    double rate;
};

struct FiniteAtom {
    long long value;
    double weight;
};

// Finitely supported distribution on distinct integer values with positive
// weights.  Input weights must sum to 1 within 1e-9; they are renormalized
// exactly on construction and the atoms are sorted by value.
struct Finite {
    explicit Finite(std::vector<FiniteAtom> support);
    std::vector<FiniteAtom> atoms;
};

using DistributionSpec = std::variant<Bernoulli, Geometric, Poisson, Finite>;

// ---------------------------------------------------------------------------
// Sum model: X = sum of independent components, each an i.i.d. block
// of `count` copies of one DistributionSpec.
// ---------------------------------------------------------------------------

struct Component {
    DistributionSpec dist;
    long long count = 1;
};

class SumModel {
  public:
    explicit SumModel(std::vector<Component> components);

    const std::vector<Component>& components() const { return components_; }

    // Number of summed variables (counts included).
    long long size() const;

    // True iff every component is almost surely constant.
    bool degenerate() const;

  private:
    std::vector<Component> components_;
};

// ---------------------------------------------------------------------------
// Aggregates
// ---------------------------------------------------------------------------

// First three absolute/central moment aggregates of a sum.
//   mu       = E[X]
//   sigma_sq = Var[X]
//   eta      = sum_j E|X_j - E X_j|^3  (third absolute central moments)
//   tau      = eta / sigma^3, undefined for degenerate models
struct MomentSummary {
    double mu = 0.0;
    double sigma_sq = 0.0;
    double eta = 0.0;
    std::optional<double> tau;

    double sigma() const;
};

// Interval of finiteness of E[e^{theta X}].  Always contains 0.  Infinite
// endpoints are encoded as +-infinity and are always open.
struct MgfInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_open = true;
    bool hi_open = true;

    bool interior_contains(double theta) const;
    MgfInterval intersect(const MgfInterval& other) const;

    static MgfInterval whole_line();
};

// ---------------------------------------------------------------------------
// Per-distribution operations
// ---------------------------------------------------------------------------

double mean(const DistributionSpec& d);
double variance(const DistributionSpec& d);

// E|X - E X|^3.  Infinite-support families are summed with a certified
// geometric tail bound; the relative tail error is below 1e-14.
double abs_third_central_moment(const DistributionSpec& d);

// Truncation diagnostics for the series behind abs_third_central_moment.
struct SeriesInfo {
    double value = 0.0;
    long long terms = 0;     // number of summed terms (0 = closed form)
    double tail_bound = 0.0; // certified bound on the dropped tail
};
SeriesInfo abs_third_central_moment_info(const DistributionSpec& d);

// E[e^{i lam X}] and |E[e^{i lam X}]|^2 (the latter via a real closed form
// where one exists; both agree within 1e-12).
std::complex<double> char_fn(const DistributionSpec& d, double lam);
double char_fn_modulus_sq(const DistributionSpec& d, double lam);

MgfInterval mgf_domain(const DistributionSpec& d);

// Cumulant generating function log E[e^{theta X}] and its first two
// derivatives.  theta must lie in the interior of mgf_domain (DomainError).
double cgf(const DistributionSpec& d, double theta);
double cgf_prime(const DistributionSpec& d, double theta);
double cgf_double_prime(const DistributionSpec& d, double theta);

// Exponential tilt: reweights Pr[X = k] by e^{theta k} and renormalizes.
// Stays inside the same family.  theta = 0 returns the spec unchanged.
DistributionSpec tilt(const DistributionSpec& d, double theta);

// ---------------------------------------------------------------------------
// Model-level operations
// ---------------------------------------------------------------------------

// Componentwise moment aggregation with a fixed pairwise summation order,
// so results are reproducible across platforms.
MomentSummary summarize(const SumModel& m);

// CGF of the whole sum and derivatives (theta must be interior to the
// intersection of the component domains).
double cgf(const SumModel& m, double theta);
double cgf_prime(const SumModel& m, double theta);
double cgf_double_prime(const SumModel& m, double theta);

// Tilt every component by the same theta.
SumModel tilt(const SumModel& m, double theta);

// Deterministic pairwise (tree) sum; exposed for reuse in tests.
double pairwise_sum(const std::vector<double>& xs);

}  // namespace pointprob
