#include "pointprob/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <variant>

#include "pointprob/errors.hpp"

namespace pointprob {
namespace {

constexpr double kEpsCeiling = 1e-6;
// Dense windows wider than this are refused outright; they indicate a
// pathological spec (e.g. a near-1 geometric or far-flung finite atoms)
// rather than a legitimate workload.
constexpr std::size_t kWindowHardCap = 100'000'000;

void require_eps(double eps) {
    if (!(eps > 0.0) || eps > kEpsCeiling)
        throw ValidationError("truncation budget must lie in (0, 1e-6], got " +
                              std::to_string(eps));
}

// log of the Chernoff bound exp(-rate) (e*rate/m)^m for Pr[W >= m] when
// m > rate and for Pr[W <= m] when m < rate (W Poisson with mean rate).
// At m == 0 the limit -rate is log Pr[W = 0] exactly.
long double poisson_log_tail_bound(long double rate, long double m) {
    if (m == 0.0L) return -rate;
    return m - rate + m * (std::log(rate) - std::log(m));
}

Pmf point_mass(long long v) {
    Pmf out;
    out.offset = v;
    out.masses = {1.0};
    return out;
}

Pmf truncate_bernoulli(const Bernoulli& d) {
    if (d.p == 0.0) return point_mass(0);
    if (d.p == 1.0) return point_mass(1);
    Pmf out;
    out.masses = {1.0 - d.p, d.p};
    return out;
}

Pmf truncate_geometric(const Geometric& d, double eps) {
    if (d.p == 0.0) return point_mass(0);
    const double width_estimate = std::log(eps) / std::log(d.p);
    if (!(width_estimate < static_cast<double>(kWindowHardCap)))
        throw ResourceLimit("geometric window would need about " +
                            std::to_string(width_estimate) + " entries");
    // Exact upper tail Pr[X > K] = p^(K+1); cut at the first K that drops
    // below the budget.
    long long k_max = 0;
    long double tail = d.p;
    while (tail >= eps) {
        ++k_max;
        tail *= d.p;
    }
    Pmf out;
    out.masses.resize(static_cast<std::size_t>(k_max) + 1);
    long double pm = 1.0L - d.p;
    for (std::size_t i = 0; i < out.masses.size(); ++i) {
        out.masses[i] = static_cast<double>(pm);
        pm *= d.p;
    }
    out.tail_defect = static_cast<double>(tail);
    return out;
}

Pmf truncate_poisson(const Poisson& d, double eps) {
    if (d.rate == 0.0) return point_mass(0);
    const long double rate = d.rate;
    const long double log_eps = std::log(static_cast<long double>(eps));

    // Upper cut: smallest K past the mean whose certified tail bound for
    // Pr[W > K] falls below eps (eps/2 when the window is also cut below).
    const bool two_sided = d.rate >= 500.0;
    const long double budget = two_sided ? log_eps - std::log(2.0L) : log_eps;
    long long hi = static_cast<long long>(std::ceil(d.rate));
    while (poisson_log_tail_bound(rate, static_cast<long double>(hi + 1)) >= budget) ++hi;

    long long lo = 0;
    if (two_sided) {
        lo = static_cast<long long>(std::floor(d.rate));
        while (lo > 0 &&
               poisson_log_tail_bound(rate, static_cast<long double>(lo - 1)) >= budget)
            --lo;
    }
    if (static_cast<std::size_t>(hi - lo) + 1 > kWindowHardCap)
        throw ResourceLimit("poisson window would need " + std::to_string(hi - lo + 1) +
                            " entries");

    Pmf out;
    out.offset = lo;
    out.masses.resize(static_cast<std::size_t>(hi - lo) + 1);
    long double total = 0.0L;
    if (two_sided) {
        // Too far from 0 for the running recurrence to start at exp(-rate);
        // evaluate each mass through lgamma instead.
        for (long long k = lo; k <= hi; ++k) {
            const long double lp = static_cast<long double>(k) * std::log(rate) - rate -
                                   std::lgamma(static_cast<long double>(k) + 1.0L);
            const long double pm = std::exp(lp);
            out.masses[static_cast<std::size_t>(k - lo)] = static_cast<double>(pm);
            total += pm;
        }
    } else {
        long double pm = std::exp(-rate);
        for (long long k = 0; k <= hi; ++k) {
            out.masses[static_cast<std::size_t>(k)] = static_cast<double>(pm);
            total += pm;
            pm *= rate / static_cast<long double>(k + 1);
        }
    }
    out.tail_defect = static_cast<double>(std::max(0.0L, 1.0L - total));
    return out;
}

Pmf truncate_finite(const Finite& d) {
    const long long lo = d.atoms.front().value;
    const long long hi = d.atoms.back().value;
    const unsigned long long span = static_cast<unsigned long long>(hi - lo);
    if (span + 1 > kWindowHardCap)
        throw ResourceLimit("finite support spans " + std::to_string(span + 1) + " entries");
    Pmf out;
    out.offset = lo;
    out.masses.assign(static_cast<std::size_t>(span) + 1, 0.0);
    for (const FiniteAtom& a : d.atoms)
        out.masses[static_cast<std::size_t>(a.value - lo)] = a.weight;
    return out;
}

Pmf convolve(const Pmf& a, const Pmf& b, std::size_t max_entries) {
    const std::size_t width = a.masses.size() + b.masses.size() - 1;
    if (width > max_entries)
        throw ResourceLimit("sum window needs " + std::to_string(width) +
                            " entries, limit is " + std::to_string(max_entries));
    Pmf out;
    out.offset = a.offset + b.offset;
    out.masses.assign(width, 0.0);
    for (std::size_t i = 0; i < a.masses.size(); ++i) {
        const double ai = a.masses[i];
        if (ai == 0.0) continue;
        for (std::size_t j = 0; j < b.masses.size(); ++j)
            out.masses[i + j] += ai * b.masses[j];
    }
    // Windows miss independently: 1 - (1-da)(1-db).
    out.tail_defect = a.tail_defect + b.tail_defect - a.tail_defect * b.tail_defect;
    return out;
}

Pmf pmf_pow(Pmf base, long long count, std::size_t max_entries) {
    Pmf acc;
    bool have_acc = false;
    while (true) {
        if (count & 1) {
            acc = have_acc ? convolve(acc, base, max_entries) : base;
            have_acc = true;
        }
        count >>= 1;
        if (count == 0) break;
        base = convolve(base, base, max_entries);
    }
    return acc;
}

std::complex<double> pow_ll(std::complex<double> z, long long e) {
    std::complex<double> r(1.0, 0.0);
    while (e > 0) {
        if (e & 1) r *= z;
        z *= z;
        e >>= 1;
    }
    return r;
}

}  // namespace

Pmf truncate(const DistributionSpec& d, double eps) {
    require_eps(eps);
    return std::visit(
        [&](const auto& g) -> Pmf {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Bernoulli>) return truncate_bernoulli(g);
            else if constexpr (std::is_same_v<T, Geometric>) return truncate_geometric(g, eps);
            else if constexpr (std::is_same_v<T, Poisson>) return truncate_poisson(g, eps);
            else return truncate_finite(g);
        },
        d);
}

Pmf exact_pmf(const SumModel& m, double eps, std::size_t max_entries) {
    require_eps(eps);
    const double unit_eps = eps / static_cast<double>(m.size());

    std::vector<Pmf> blocks;
    blocks.reserve(m.components().size());
    for (const Component& c : m.components())
        blocks.push_back(pmf_pow(truncate(c.dist, unit_eps), c.count, max_entries));

    // Balanced combine keeps intermediate windows (and rounding) small.
    while (blocks.size() > 1) {
        std::vector<Pmf> next;
        next.reserve(blocks.size() / 2 + 1);
        for (std::size_t i = 0; i + 1 < blocks.size(); i += 2)
            next.push_back(convolve(blocks[i], blocks[i + 1], max_entries));
        if (blocks.size() % 2 == 1) next.push_back(std::move(blocks.back()));
        blocks = std::move(next);
    }
    return std::move(blocks.front());
}

InversionDetail inversion_prob_detail(const SumModel& m, long long n,
                                      std::size_t quad_points) {
    std::size_t points = quad_points;
    if (points == 0) {
        // Support-width estimate: per-unit windows covering all but 1e-12.
        std::size_t width = 1;
        for (const Component& c : m.components())
            width += static_cast<std::size_t>(c.count) * (truncate(c.dist, 1e-12).masses.size() - 1);
        points = std::bit_ceil(std::max<std::size_t>(256, 4 * width));
    } else if (points < 64) {
        throw ValidationError("quadrature needs at least 64 points, got " +
                              std::to_string(points));
    }

    const double step = 2.0 * std::numbers::pi / static_cast<double>(points);
    long double re = 0.0L;
    long double im = 0.0L;
    for (std::size_t k = 0; k < points; ++k) {
        const double lambda = -std::numbers::pi + step * static_cast<double>(k);
        std::complex<double> transform(1.0, 0.0);
        for (const Component& c : m.components())
            transform *= pow_ll(char_fn(c.dist, lambda), c.count);
        const std::complex<double> term =
            transform * std::polar(1.0, -lambda * static_cast<double>(n));
        re += term.real();
        im += term.imag();
    }

    InversionDetail out;
    out.prob = static_cast<double>(re / static_cast<long double>(points));
    out.imag_residual = std::fabs(static_cast<double>(im / static_cast<long double>(points)));
    out.quad_points = points;
    if (!(out.imag_residual < 1e-10))
        throw DomainError("inversion quadrature left an imaginary residual of " +
                          std::to_string(out.imag_residual));
    return out;
}

double inversion_prob(const SumModel& m, long long n, std::size_t quad_points) {
    return inversion_prob_detail(m, n, quad_points).prob;
}

McEstimate mc_estimate(const SumModel& m, long long n, std::uint64_t samples,
                       std::uint64_t seed) {
    if (samples == 0) throw ValidationError("sample count must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    using Sampler = std::function<long long()>;
    std::vector<std::pair<Sampler, long long>> draws;
    draws.reserve(m.components().size());
    for (const Component& c : m.components()) {
        Sampler s = std::visit(
            [&](const auto& g) -> Sampler {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Bernoulli>) {
                    return [&rng, &unit, p = g.p]() -> long long { return unit(rng) < p ? 1 : 0; };
                } else if constexpr (std::is_same_v<T, Geometric>) {
                    // Inverse transform: floor(log(1-u) / log(p)).
                    return [&rng, &unit, p = g.p]() -> long long {
                        if (p == 0.0) return 0;
                        const double u = unit(rng);
                        return static_cast<long long>(std::floor(std::log1p(-u) / std::log(p)));
                    };
                } else if constexpr (std::is_same_v<T, Poisson>) {
                    return [&rng, gen = std::poisson_distribution<long long>(g.rate)]() mutable {
                        return gen(rng);
                    };
                } else {
                    return [&rng, &unit, atoms = g.atoms]() -> long long {
                        const double u = unit(rng);
                        double cum = 0.0;
                        for (const FiniteAtom& a : atoms) {
                            cum += a.weight;
                            if (u < cum) return a.value;
                        }
                        return atoms.back().value;
                    };
                }
            },
            c.dist);
        draws.emplace_back(std::move(s), c.count);
    }

    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        long long total = 0;
        for (auto& [draw, count] : draws)
            for (long long i = 0; i < count; ++i) total += draw();
        hits += (total == n);
    }

    McEstimate out;
    out.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    out.std_error =
        std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(samples));
    return out;
}

}  // namespace pointprob
