#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pointprob/oracle.hpp"
#include "reference.hpp"

using namespace pointprob;

namespace {

SumModel random_mixed_model(std::mt19937_64& rng, int max_blocks = 6, long long max_count = 12) {
    std::uniform_int_distribution<int> nblocks(1, max_blocks);
    std::uniform_int_distribution<int> fam(0, 2);
    std::uniform_int_distribution<long long> cnt(1, max_count);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Component> comps;
    const int nb = nblocks(rng);
    for (int i = 0; i < nb; ++i) {
        switch (fam(rng)) {
            case 0: comps.push_back({Bernoulli(0.05 + 0.9 * u(rng)), cnt(rng)}); break;
            case 1: comps.push_back({Geometric(0.1 + 0.5 * u(rng)), cnt(rng)}); break;
            default: comps.push_back({Poisson(0.2 + 2.5 * u(rng)), cnt(rng)}); break;
        }
    }
    return SumModel(std::move(comps));
}

}  // namespace

TEST_CASE("truncate windows") {
    const Pmf b = truncate(Bernoulli(0.3), 1e-9);
    CHECK(b.offset == 0);
    REQUIRE(b.masses.size() == 2);
    CHECK(b.masses[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(b.masses[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(b.tail_defect == 0.0);

    const Pmf b0 = truncate(Bernoulli(0.0), 1e-9);
    CHECK(b0.offset == 0);
    CHECK(b0.masses == std::vector<double>{1.0});
    const Pmf b1 = truncate(Bernoulli(1.0), 1e-9);
    CHECK(b1.offset == 1);
    CHECK(b1.masses == std::vector<double>{1.0});

    const double eps = std::pow(2.0, -20);
    const Pmf g = truncate(Geometric(0.5), eps);
    CHECK(g.offset == 0);
    CHECK(g.hi() == 20);
    CHECK(g.tail_defect > 0.0);
    CHECK(g.tail_defect <= eps);
    for (long long k = 0; k <= g.hi(); ++k)
        CHECK(g.at(k) ==
              doctest::Approx(static_cast<double>(ref::geometric_pmf(0.5L, k))).epsilon(1e-13));
    double total = g.tail_defect;
    for (double m : g.masses) total += m;
    CHECK(std::fabs(total - 1.0) <= 1e-12);

    const Pmf w = truncate(Poisson(3.0), 1e-10);
    CHECK(w.offset == 0);
    CHECK(w.tail_defect >= 0.0);
    CHECK(w.tail_defect <= 1e-10);
    for (long long k = 0; k <= w.hi(); ++k)
        CHECK(w.at(k) ==
              doctest::Approx(static_cast<double>(ref::poisson_pmf(3.0L, k))).epsilon(1e-12));
    total = w.tail_defect;
    for (double m : w.masses) total += m;
    CHECK(std::fabs(total - 1.0) <= 1e-12);

    const Pmf f = truncate(Finite({{-2, 0.5}, {5, 0.5}}), 1e-9);
    CHECK(f.offset == -2);
    CHECK(f.hi() == 5);
    REQUIRE(f.masses.size() == 8);
    CHECK(f.masses[0] == 0.5);
    CHECK(f.masses[3] == 0.0);
    CHECK(f.masses[7] == 0.5);
    CHECK(f.tail_defect == 0.0);
    CHECK(f.at(-3) == 0.0);
    CHECK(f.at(6) == 0.0);

    CHECK_THROWS_AS(truncate(Bernoulli(0.5), 0.0), ValidationError);
    CHECK_THROWS_AS(truncate(Bernoulli(0.5), -1e-9), ValidationError);
    CHECK_THROWS_AS(truncate(Bernoulli(0.5), 1e-5), ValidationError);
}

TEST_CASE("exact pmf reproduces closed forms") {
    // Binomial.
    const SumModel binom({{Bernoulli(0.5), 100}});
    const Pmf pb = exact_pmf(binom, 1e-12);
    CHECK(pb.offset == 0);
    CHECK(pb.hi() == 100);
    CHECK(pb.tail_defect <= 1e-12);
    for (long long k = 0; k <= 100; k += 10) {
        const double want = static_cast<double>(ref::binomial_pmf(100, 0.5L, k));
        CHECK(pb.at(k) == doctest::Approx(want).epsilon(1e-12));
    }

    // Poisson additivity: five Poisson(1) sum to Poisson(5).  The tiny eps
    // pushes the component windows far past every compared entry, so the
    // deep-tail entries are exact up to rounding.
    const Pmf pp = exact_pmf(SumModel({{Poisson(1.0), 5}}), 1e-30);
    for (long long k = pp.lo(); k <= pp.hi(); ++k) {
        const double want = static_cast<double>(ref::poisson_pmf(5.0L, k));
        if (want > 1e-12) CHECK(pp.at(k) == doctest::Approx(want).epsilon(1e-10));
    }

    // Negative binomial: three Geometric(0.5).
    const Pmf pg = exact_pmf(SumModel({{Geometric(0.5), 3}}), 1e-30);
    for (long long t = pg.lo(); t <= pg.hi(); ++t) {
        const double want = static_cast<double>(ref::neg_binomial_pmf(3, 0.5L, t));
        if (want > 1e-12) CHECK(pg.at(t) == doctest::Approx(want).epsilon(1e-10));
    }

    // Constant model.
    const Pmf pc = exact_pmf(SumModel({{Finite({{3, 1.0}}), 4}}), 1e-9);
    CHECK(pc.lo() == 12);
    CHECK(pc.hi() == 12);
    CHECK(pc.at(12) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pc.tail_defect == 0.0);
}

TEST_CASE("exact pmf bookkeeping") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 10; ++i) {
        const SumModel m = random_mixed_model(rng);
        const Pmf p = exact_pmf(m, 1e-10);
        CHECK(p.tail_defect >= 0.0);
        CHECK(p.tail_defect <= 1e-10 * (1 + 1e-9));
        double total = p.tail_defect;
        for (double mass : p.masses) {
            CHECK(mass >= 0.0);
            total += mass;
        }
        CHECK(std::fabs(total - 1.0) <= 1e-12);

        // Component order must not matter beyond harmless rounding.
        std::vector<Component> rev(m.components().rbegin(), m.components().rend());
        const Pmf q = exact_pmf(SumModel(std::move(rev)), 1e-10);
        CHECK(q.lo() == p.lo());
        CHECK(q.hi() == p.hi());
        for (long long n = p.lo(); n <= p.hi(); ++n)
            CHECK(std::fabs(p.at(n) - q.at(n)) < 1e-13);
    }

    CHECK_THROWS_AS(exact_pmf(SumModel({{Poisson(50.0), 1000}}), 1e-9, 1000), ResourceLimit);
    CHECK_THROWS_AS(exact_pmf(SumModel({{Bernoulli(0.5), 1}}), 2e-6), ValidationError);
}

TEST_CASE("inversion integral") {
    const SumModel one({{Bernoulli(0.0), 1}});
    CHECK(std::fabs(inversion_prob(one, 0) - 1.0) <= 1e-12);
    CHECK(std::fabs(inversion_prob(one, 1)) <= 1e-12);
    CHECK(std::fabs(inversion_prob(one, -5)) <= 1e-10);

    const SumModel binom({{Bernoulli(0.5), 100}});
    for (long long n : {30, 40, 50, 60, 70}) {
        const double want = static_cast<double>(ref::binomial_pmf(100, 0.5L, n));
        CHECK(std::fabs(inversion_prob(binom, n) - want) <= 1e-10);
    }

    const InversionDetail det = inversion_prob_detail(binom, 50, 0);
    CHECK(det.quad_points >= 256);
    CHECK((det.quad_points & (det.quad_points - 1)) == 0);  // power of two
    CHECK(det.imag_residual < 1e-10);
    CHECK(det.prob == inversion_prob(binom, 50));

    CHECK_THROWS_AS(inversion_prob(binom, 50, 32), ValidationError);
    CHECK(std::fabs(inversion_prob(binom, 50, 1024) -
                    static_cast<double>(ref::binomial_pmf(100, 0.5L, 50))) <= 1e-10);

    // Inversion agrees with convolution across whole windows.
    std::mt19937_64 rng(11);
    for (int i = 0; i < 5; ++i) {
        const SumModel m = random_mixed_model(rng, 4, 8);
        const Pmf p = exact_pmf(m, 1e-12);
        for (long long n = p.lo(); n <= p.hi(); ++n)
            CHECK(std::fabs(p.at(n) - inversion_prob(m, n)) <= 1e-9);
    }
}

TEST_CASE("monte carlo estimate") {
    const SumModel constant({{Finite({{3, 1.0}}), 4}});
    const McEstimate hit = mc_estimate(constant, 12, 1000, 42);
    CHECK(hit.estimate == 1.0);
    CHECK(hit.std_error == 0.0);
    CHECK(mc_estimate(constant, 11, 1000, 42).estimate == 0.0);

    const SumModel binom({{Bernoulli(0.5), 100}});
    const McEstimate a = mc_estimate(binom, 50, 200000, 7);
    const McEstimate b = mc_estimate(binom, 50, 200000, 7);
    CHECK(a.estimate == b.estimate);  // reproducible for a fixed seed
    CHECK(a.std_error == b.std_error);
    const double want = static_cast<double>(ref::binomial_pmf(100, 0.5L, 50));
    CHECK(std::fabs(a.estimate - want) <= 4.0 * a.std_error);
    CHECK(a.std_error > 0.0);
    CHECK(a.std_error < 1e-3);

    // Out-of-range points can never be hit.
    CHECK(mc_estimate(binom, 101, 1000, 3).estimate == 0.0);
    CHECK(mc_estimate(binom, -1, 1000, 3).estimate == 0.0);

    CHECK_THROWS_AS(mc_estimate(binom, 50, 0, 1), ValidationError);
}
