#pragma once

// Independent reference values for the tests.  Everything here is computed
// straight from textbook formulas in long double, without calling into the
// library under test.  Keep this file free of pointprob includes.

#include <cmath>
#include <cstdint>
#include <vector>

namespace ref {

// Pr[Binomial(n, p) = k] via the stable pmf recurrence from k = 0.
inline long double binomial_pmf(long long n, long double p, long long k) {
    if (k < 0 || k > n) return 0.0L;
    long double pm = std::pow(1.0L - p, static_cast<long double>(n));
    for (long long j = 0; j < k; ++j) {
        pm *= static_cast<long double>(n - j) / static_cast<long double>(j + 1);
        pm *= p / (1.0L - p);
    }
    return pm;
}

// Pr[sum of `blocks` independent Geometric(p) = t]:
// C(t + blocks - 1, blocks - 1) p^t (1-p)^blocks.
inline long double neg_binomial_pmf(long long blocks, long double p, long long t) {
    if (t < 0) return 0.0L;
    long double pm = std::pow(1.0L - p, static_cast<long double>(blocks));
    for (long long j = 0; j < t; ++j) {
        pm *= static_cast<long double>(j + blocks) / static_cast<long double>(j + 1);
        pm *= p;
    }
    return pm;
}

inline long double poisson_pmf(long double lam, long long k) {
    if (k < 0) return 0.0L;
    long double pm = std::exp(-lam);
    for (long long j = 0; j < k; ++j) pm *= lam / static_cast<long double>(j + 1);
    return pm;
}

inline long double geometric_pmf(long double p, long long k) {
    if (k < 0) return 0.0L;
    return std::pow(p, static_cast<long double>(k)) * (1.0L - p);
}

// E|Z - E Z|^3 for Geometric(p), brute-force series.
inline long double geometric_abs3(long double p) {
    if (p == 0.0L) return 0.0L;
    const long double mu = p / (1.0L - p);
    long double acc = 0.0L, pm = 1.0L - p;
    for (long long k = 0;; ++k) {
        const long double d = std::fabs(static_cast<long double>(k) - mu);
        acc += pm * d * d * d;
        if (pm < 1e-40L && static_cast<long double>(k) > mu + 20.0L) break;
        pm *= p;
    }
    return acc;
}

// Var[Z] for Geometric(p), brute-force series.
inline long double geometric_var(long double p) {
    if (p == 0.0L) return 0.0L;
    const long double mu = p / (1.0L - p);
    long double acc = 0.0L, pm = 1.0L - p;
    for (long long k = 0;; ++k) {
        const long double d = static_cast<long double>(k) - mu;
        acc += pm * d * d;
        if (pm < 1e-40L && static_cast<long double>(k) > mu + 20.0L) break;
        pm *= p;
    }
    return acc;
}

// E|W - rate|^3 for Poisson(rate), brute-force series.
inline long double poisson_abs3(long double lam) {
    long double acc = 0.0L, pm = std::exp(-lam);
    for (long long k = 0;; ++k) {
        const long double d = std::fabs(static_cast<long double>(k) - lam);
        acc += pm * d * d * d;
        if (pm < 1e-40L && static_cast<long double>(k) > lam + 30.0L) break;
        pm *= lam / static_cast<long double>(k + 1);
    }
    return acc;
}

}  // namespace ref
