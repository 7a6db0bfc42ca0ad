#include "pointprob/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pointprob {

namespace {

constexpr double kWeightSumTol = 1e-9;  // input tolerance on finite weight sums
constexpr double kSeriesRelTol = 1e-16; // target relative tail of truncated series

double logaddexp(double a, double b) {
    const double m = std::max(a, b);
    if (std::isinf(m) && m < 0) return m;
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

[[noreturn]] void fail_validation(const std::string& msg) { throw ValidationError(msg); }

void require_interior(const DistributionSpec& d, double theta) {
    const MgfInterval iv = mgf_domain(d);
    if (!iv.interior_contains(theta)) {
        std::ostringstream os;
        os << "theta=" << theta << " outside the interior (" << iv.lo << ", " << iv.hi
           << ") of the mgf domain";
        throw DomainError(os.str());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction / validation
// ---------------------------------------------------------------------------

Bernoulli::Bernoulli(double success_prob) : p(success_prob) {
    if (!(p >= 0.0 && p <= 1.0)) fail_validation("bernoulli: p must be in [0, 1]");
}

Geometric::Geometric(double failure_prob) : p(failure_prob) {
    if (!(p >= 0.0 && p < 1.0)) fail_validation("geometric: p must be in [0, 1)");
}

Poisson::Poisson(double rate_param) : rate(rate_param) {
    if (!(rate > 0.0) || !std::isfinite(rate)) fail_validation("poisson: rate must be positive");
}

Finite::Finite(std::vector<FiniteAtom> support) : atoms(std::move(support)) {
    if (atoms.empty()) fail_validation("finite: support must be non-empty");
    double sum = 0.0;
    for (const auto& a : atoms) {
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            fail_validation("finite: weights must be positive");
        sum += a.weight;
    }
    if (std::fabs(sum - 1.0) > kWeightSumTol)
        fail_validation("finite: weights must sum to 1 within 1e-9");
    std::sort(atoms.begin(), atoms.end(),
              [](const FiniteAtom& a, const FiniteAtom& b) { return a.value < b.value; });
    for (size_t i = 1; i < atoms.size(); ++i)
        if (atoms[i].value == atoms[i - 1].value)
            fail_validation("finite: support values must be distinct");
    for (auto& a : atoms) a.weight /= sum;
}

SumModel::SumModel(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) fail_validation("model: at least one component required");
    for (const auto& c : components_)
        if (c.count < 1) fail_validation("model: component count must be >= 1");
}

long long SumModel::size() const {
    long long n = 0;
    for (const auto& c : components_) n += c.count;
    return n;
}

bool SumModel::degenerate() const {
    for (const auto& c : components_)
        if (variance(c.dist) > 0.0) return false;
    return true;
}

double MomentSummary::sigma() const { return std::sqrt(sigma_sq); }

// ---------------------------------------------------------------------------
// MgfInterval
// ---------------------------------------------------------------------------

bool MgfInterval::interior_contains(double theta) const {
    return theta > lo && theta < hi;  // NaN compares false
}

MgfInterval MgfInterval::intersect(const MgfInterval& other) const {
    MgfInterval out;
    if (lo > other.lo) { out.lo = lo; out.lo_open = lo_open; }
    else if (other.lo > lo) { out.lo = other.lo; out.lo_open = other.lo_open; }
    else { out.lo = lo; out.lo_open = lo_open || other.lo_open; }
    if (hi < other.hi) { out.hi = hi; out.hi_open = hi_open; }
    else if (other.hi < hi) { out.hi = other.hi; out.hi_open = other.hi_open; }
    else { out.hi = hi; out.hi_open = hi_open || other.hi_open; }
    return out;
}

MgfInterval MgfInterval::whole_line() { return MgfInterval{}; }

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

double mean(const DistributionSpec& d) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Bernoulli>) return v.p;
            else if constexpr (std::is_same_v<T, Geometric>) return v.p / (1.0 - v.p);
            else if constexpr (std::is_same_v<T, Poisson>) return v.rate;
            else {
                double acc = 0.0;
                for (const auto& a : v.atoms) acc += a.weight * static_cast<double>(a.value);
                return acc;
            }
        },
        d);
}

double variance(const DistributionSpec& d) {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Bernoulli>) return v.p * (1.0 - v.p);
            else if constexpr (std::is_same_v<T, Geometric>) {
                const double q = 1.0 - v.p;
                return v.p / (q * q);
            } else if constexpr (std::is_same_v<T, Poisson>) return v.rate;
            else {
                const double mu = mean(d);
                double acc = 0.0;
                for (const auto& a : v.atoms) {
                    const double dv = static_cast<double>(a.value) - mu;
                    acc += a.weight * dv * dv;
                }
                return acc;
            }
        },
        d);
}

namespace {

// E|Z - mu|^3 for Geometric(p) by direct summation.  The loop stops once the
// term ratio is provably below r < 1, giving a geometric tail certificate
// term * r / (1 - r).
SeriesInfo geometric_abs3_series(double p) {
    SeriesInfo info;
    if (p == 0.0) return info;
    const double mu = p / (1.0 - p);
    long double acc = 0.0L;
    long double pm = 1.0L - static_cast<long double>(p);
    long long k = 0;
    for (;;) {
        const long double dist = std::fabs(static_cast<long double>(k) - mu);
        const long double term = pm * dist * dist * dist;
        acc += term;
        ++k;
        pm *= p;
        if (static_cast<double>(k) > mu + 1.0) {
            // Term ratio p ((k+1-mu)/(k-mu))^3 decreases in k from here on.
            const long double grow = (static_cast<long double>(k) + 1.0L - mu) /
                                     (static_cast<long double>(k) - mu);
            const long double r = p * grow * grow * grow;
            if (r < 1.0L) {
                const long double next =
                    pm * (static_cast<long double>(k) - mu) * (static_cast<long double>(k) - mu) *
                    std::fabs(static_cast<long double>(k) - mu);
                const long double tail = next / (1.0L - r);
                if (tail <= kSeriesRelTol * acc) {
                    info.value = static_cast<double>(acc);
                    info.terms = k;
                    info.tail_bound = static_cast<double>(tail);
                    return info;
                }
            }
        }
    }
}

// E|W - rate|^3 for Poisson(rate).  Small rates run the pmf recurrence from
// zero; large rates evaluate terms through lgamma on a window around the
// mean, certified by term-ratio tail bounds on both edges.
SeriesInfo poisson_abs3_series(double rate) {
    SeriesInfo info;
    if (rate < 500.0) {
        long double acc = 0.0L;
        long double pm = std::exp(static_cast<long double>(-rate));
        long long k = 0;
        for (;;) {
            const long double dist = std::fabs(static_cast<long double>(k) - rate);
            acc += pm * dist * dist * dist;
            ++k;
            pm *= rate / static_cast<long double>(k);
            if (static_cast<double>(k) > rate + 1.0) {
                const long double grow = (static_cast<long double>(k) + 1.0L - rate) /
                                         (static_cast<long double>(k) - rate);
                const long double r = (rate / static_cast<long double>(k + 1)) * grow * grow * grow;
                if (r < 1.0L) {
                    const long double d0 = static_cast<long double>(k) - rate;
                    const long double tail = pm * d0 * d0 * d0 / (1.0L - r);
                    if (tail <= kSeriesRelTol * acc) {
                        info.value = static_cast<double>(acc);
                        info.terms = k;
                        info.tail_bound = static_cast<double>(tail);
                        return info;
                    }
                }
            }
        }
    }

    const double sigma = std::sqrt(rate);
    const double loglam = std::log(rate);
    auto term = [&](long long k) -> long double {
        const double kk = static_cast<double>(k);
        const long double pm =
            std::exp(static_cast<long double>(kk * loglam - rate - std::lgamma(kk + 1.0)));
        const long double dist = std::fabs(static_cast<long double>(kk) - rate);
        return pm * dist * dist * dist;
    };
    for (double c = 12.0;; c *= 2.0) {
        const long long klo = std::max<long long>(0, static_cast<long long>(rate - c * sigma) - 2);
        const long long khi = static_cast<long long>(rate + c * sigma) + 2;
        long double acc = 0.0L;
        for (long long k = klo; k <= khi; ++k) acc += term(k);
        long double tail = 0.0L;
        bool ok = true;
        {  // upper edge
            const double kk = static_cast<double>(khi);
            const long double grow = (kk + 2.0L - rate) / (kk + 1.0L - rate);
            const long double r = (rate / (kk + 1.0)) * grow * grow * grow;
            if (r < 1.0L) tail += term(khi + 1) / (1.0L - r);
            else ok = false;
        }
        if (klo > 0) {  // lower edge
            const double kk = static_cast<double>(klo);
            const long double grow = (rate - kk + 2.0L) / (rate - kk + 1.0L);
            const long double r = (kk / rate) * grow * grow * grow;
            if (r < 1.0L) tail += term(klo - 1) / (1.0L - r);
            else ok = false;
        }
        if (ok && tail <= kSeriesRelTol * acc) {
            info.value = static_cast<double>(acc);
            info.terms = khi - klo + 1;
            info.tail_bound = static_cast<double>(tail);
            return info;
        }
    }
}

}  // namespace

SeriesInfo abs_third_central_moment_info(const DistributionSpec& d) {
    return std::visit(
        [&](const auto& v) -> SeriesInfo {
            using T = std::decay_t<decltype(v)>;
            SeriesInfo info;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                const double q = 1.0 - v.p;
                info.value = v.p * q * (v.p * v.p + q * q);
            } else if constexpr (std::is_same_v<T, Geometric>) {
                info = geometric_abs3_series(v.p);
            } else if constexpr (std::is_same_v<T, Poisson>) {
                info = poisson_abs3_series(v.rate);
            } else {
                const double mu = mean(d);
                double acc = 0.0;
                for (const auto& a : v.atoms) {
                    const double dist = std::fabs(static_cast<double>(a.value) - mu);
                    acc += a.weight * dist * dist * dist;
                }
                info.value = acc;
            }
            return info;
        },
        d);
}

double abs_third_central_moment(const DistributionSpec& d) {
    return abs_third_central_moment_info(d).value;
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

std::complex<double> char_fn(const DistributionSpec& d, double lam) {
    return std::visit(
        [&](const auto& v) -> std::complex<double> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                return {1.0 - v.p + v.p * std::cos(lam), v.p * std::sin(lam)};
            } else if constexpr (std::is_same_v<T, Geometric>) {
                if (v.p == 0.0) return {1.0, 0.0};
                const std::complex<double> den(1.0 - v.p * std::cos(lam), -v.p * std::sin(lam));
                return (1.0 - v.p) / den;
            } else if constexpr (std::is_same_v<T, Poisson>) {
                return std::polar(std::exp(v.rate * (std::cos(lam) - 1.0)),
                                  v.rate * std::sin(lam));
            } else {
                double re = 0.0, im = 0.0;
                for (const auto& a : v.atoms) {
                    const double x = lam * static_cast<double>(a.value);
                    re += a.weight * std::cos(x);
                    im += a.weight * std::sin(x);
                }
                return {re, im};
            }
        },
        d);
}

double char_fn_modulus_sq(const DistributionSpec& d, double lam) {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                return 1.0 + 2.0 * v.p * (1.0 - v.p) * (std::cos(lam) - 1.0);
            } else if constexpr (std::is_same_v<T, Geometric>) {
                if (v.p == 0.0) return 1.0;
                const double q = 1.0 - v.p;
                return q * q / (1.0 + v.p * v.p - 2.0 * v.p * std::cos(lam));
            } else if constexpr (std::is_same_v<T, Poisson>) {
                return std::exp(2.0 * v.rate * (std::cos(lam) - 1.0));
            } else {
                return std::norm(char_fn(d, lam));
            }
        },
        d);
}

MgfInterval mgf_domain(const DistributionSpec& d) {
    if (const auto* g = std::get_if<Geometric>(&d); g && g->p > 0.0) {
        MgfInterval iv;
        iv.hi = -std::log(g->p);
        return iv;
    }
    return MgfInterval::whole_line();
}

double cgf(const DistributionSpec& d, double theta) {
    require_interior(d, theta);
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                if (v.p == 0.0) return 0.0;
                if (v.p == 1.0) return theta;
                return logaddexp(std::log1p(-v.p), std::log(v.p) + theta);
            } else if constexpr (std::is_same_v<T, Geometric>) {
                if (v.p == 0.0) return 0.0;
                return std::log1p(-v.p) - std::log1p(-v.p * std::exp(theta));
            } else if constexpr (std::is_same_v<T, Poisson>) {
                return v.rate * std::expm1(theta);
            } else {
                double m = -std::numeric_limits<double>::infinity();
                for (const auto& a : v.atoms)
                    m = std::max(m, std::log(a.weight) + theta * static_cast<double>(a.value));
                double acc = 0.0;
                for (const auto& a : v.atoms)
                    acc += std::exp(std::log(a.weight) + theta * static_cast<double>(a.value) - m);
                return m + std::log(acc);
            }
        },
        d);
}

double cgf_prime(const DistributionSpec& d, double theta) {
    require_interior(d, theta);
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                if (v.p == 0.0) return 0.0;
                if (v.p == 1.0) return 1.0;
                return 1.0 / (1.0 + (1.0 - v.p) / v.p * std::exp(-theta));
            } else if constexpr (std::is_same_v<T, Geometric>) {
                if (v.p == 0.0) return 0.0;
                const double u = v.p * std::exp(theta);
                return u / (1.0 - u);
            } else if constexpr (std::is_same_v<T, Poisson>) {
                return v.rate * std::exp(theta);
            } else {
                // Softmax-weighted mean of the support.
                double m = -std::numeric_limits<double>::infinity();
                for (const auto& a : v.atoms)
                    m = std::max(m, std::log(a.weight) + theta * static_cast<double>(a.value));
                double den = 0.0, num = 0.0;
                for (const auto& a : v.atoms) {
                    const double w =
                        std::exp(std::log(a.weight) + theta * static_cast<double>(a.value) - m);
                    den += w;
                    num += w * static_cast<double>(a.value);
                }
                return num / den;
            }
        },
        d);
}

double cgf_double_prime(const DistributionSpec& d, double theta) {
    require_interior(d, theta);
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                const double s = cgf_prime(d, theta);
                return s * (1.0 - s);
            } else if constexpr (std::is_same_v<T, Geometric>) {
                const double s = cgf_prime(d, theta);
                return s * (1.0 + s);
            } else if constexpr (std::is_same_v<T, Poisson>) {
                return v.rate * std::exp(theta);
            } else {
                // Softmax-weighted central second moment of the support.
                double m = -std::numeric_limits<double>::infinity();
                for (const auto& a : v.atoms)
                    m = std::max(m, std::log(a.weight) + theta * static_cast<double>(a.value));
                double den = 0.0, num = 0.0;
                for (const auto& a : v.atoms) {
                    const double w =
                        std::exp(std::log(a.weight) + theta * static_cast<double>(a.value) - m);
                    den += w;
                    num += w * static_cast<double>(a.value);
                }
                const double m1 = num / den;
                double acc = 0.0;
                for (const auto& a : v.atoms) {
                    const double w =
                        std::exp(std::log(a.weight) + theta * static_cast<double>(a.value) - m);
                    const double dv = static_cast<double>(a.value) - m1;
                    acc += w * dv * dv;
                }
                return acc / den;
            }
        },
        d);
}

DistributionSpec tilt(const DistributionSpec& d, double theta) {
    if (theta == 0.0) return d;
    require_interior(d, theta);
    return std::visit(
        [&](const auto& v) -> DistributionSpec {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Bernoulli>) {
                return Bernoulli(cgf_prime(d, theta));
            } else if constexpr (std::is_same_v<T, Geometric>) {
                return Geometric(v.p * std::exp(theta));
            } else if constexpr (std::is_same_v<T, Poisson>) {
                const double rate2 = v.rate * std::exp(theta);
                if (!(rate2 > 0.0) || !std::isfinite(rate2))
                    throw DomainError("tilt: tilted poisson rate over/underflows");
                return Poisson(rate2);
            } else {
                double m = -std::numeric_limits<double>::infinity();
                for (const auto& a : v.atoms)
                    m = std::max(m, std::log(a.weight) + theta * static_cast<double>(a.value));
                std::vector<FiniteAtom> atoms;
                atoms.reserve(v.atoms.size());
                double sum = 0.0;
                for (const auto& a : v.atoms) {
                    const double w =
                        std::exp(std::log(a.weight) + theta * static_cast<double>(a.value) - m);
                    atoms.push_back({a.value, w});
                    sum += w;
                }
                for (auto& a : atoms) {
                    a.weight /= sum;
                    if (!(a.weight > 0.0))
                        throw DomainError("tilt: reweighted atom underflows to zero");
                }
                return Finite(std::move(atoms));
            }
        },
        d);
}

// ---------------------------------------------------------------------------
// Model-level aggregation
// ---------------------------------------------------------------------------

namespace {

double pairwise(const double* x, size_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return x[0];
    if (n == 2) return x[0] + x[1];
    const size_t h = n / 2;
    return pairwise(x, h) + pairwise(x + h, n - h);
}

template <typename F>
double component_sum(const SumModel& m, F&& per_unit) {
    std::vector<double> parts;
    parts.reserve(m.components().size());
    for (const auto& c : m.components())
        parts.push_back(static_cast<double>(c.count) * per_unit(c.dist));
    return pairwise(parts.data(), parts.size());
}

}  // namespace

double pairwise_sum(const std::vector<double>& xs) { return pairwise(xs.data(), xs.size()); }

MomentSummary summarize(const SumModel& m) {
    MomentSummary s;
    s.mu = component_sum(m, [](const DistributionSpec& d) { return mean(d); });
    s.sigma_sq = component_sum(m, [](const DistributionSpec& d) { return variance(d); });
    s.eta = component_sum(m, [](const DistributionSpec& d) { return abs_third_central_moment(d); });
    if (s.sigma_sq > 0.0) s.tau = s.eta / std::pow(s.sigma_sq, 1.5);
    return s;
}

double cgf(const SumModel& m, double theta) {
    return component_sum(m, [&](const DistributionSpec& d) { return cgf(d, theta); });
}

double cgf_prime(const SumModel& m, double theta) {
    return component_sum(m, [&](const DistributionSpec& d) { return cgf_prime(d, theta); });
}

double cgf_double_prime(const SumModel& m, double theta) {
    return component_sum(m, [&](const DistributionSpec& d) { return cgf_double_prime(d, theta); });
}

SumModel tilt(const SumModel& m, double theta) {
    std::vector<Component> comps;
    comps.reserve(m.components().size());
    for (const auto& c : m.components()) comps.push_back({tilt(c.dist, theta), c.count});
    return SumModel(std::move(comps));
}

}  // namespace pointprob
