#include <doctest.h>

#include <cmath>

#include "peelmap/eden.hpp"
#include "peelmap/oracle.hpp"
#include "peelmap/stats.hpp"

using namespace peelmap;
using doctest::Approx;

TEST_CASE("first clock increment has mean 1/2")
{
    const Sampler s(Model::special(1.75));
    std::vector<double> dt;
    for (int i = 0; i < 40000; ++i) {
        Rng rng(31, i);
        EdenState st;
        dt.push_back(eden_step(st, s, rng, {VolumeMode::None, 64}));
        CHECK(st.i == 1);
        CHECK(st.tau == dt.back());
    }
    const MeanSe m = mean_se(dt);
    CHECK(std::abs(m.mean - 0.5) < 4 * m.se);
}

TEST_CASE("tau_n against the oracle")
{
    const Model m = Model::special(1.75);
    const Sampler s(m);
    const DfppEstimate e = estimate_dfpp(s, 37, 20000, 16, 1);
    const double expected = dfpp_tail(m, 0).value - dfpp_tail(m, 16).value;
    CHECK(std::abs(e.mc_mean - expected) < 4 * e.mc_se);
    CHECK(e.tau.size() == 20000);
    CHECK(e.estimate == Approx(e.mc_mean + e.tail));
}

TEST_CASE("time grid")
{
    const auto g = eden_time_grid(1.0, 4.0);
    REQUIRE(g.size() == 9);
    CHECK(g.front() == 1.0);
    CHECK(g[4] == Approx(2.0));
    CHECK(g.back() == Approx(4.0));
    CHECK_THROWS_AS(eden_time_grid(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("phase restrictions")
{
    const Sampler dense(Model::special(1.75)), dilute(Model::special(2.25));
    CHECK_THROWS_AS(estimate_dfpp(dilute, 1, 10, 10, 1), std::domain_error);
    CHECK_THROWS_AS(run_eden_dilute(dense, 1, 10, 1.0, 2.0, 1000, {}, 1), std::domain_error);
}

TEST_CASE("dilute Eden runs record the grid")
{
    const Sampler s(Model::special(2.25));
    const auto runs = run_eden_dilute(s, 41, 4, 1.0, 4.0, 1 << 20, {VolumeMode::Shortcut, 64}, 1);
    for (const auto& run : runs) {
        REQUIRE(run.status == RunStatus::Completed);
        CHECK(run.records.size() == 9);
        for (std::size_t i = 1; i < run.records.size(); ++i) CHECK(run.records[i].n >= run.records[i - 1].n);
    }
}

TEST_CASE("standardized increments are Exp(1)")
{
    const Sampler s(Model::special(2.25));
    const auto xs = standardized_increments(s, 43, 50, 200, 1);
    CHECK(xs.size() == 10000);
    CHECK(ks_test(xs, [](double x) { return x <= 0 ? 0.0 : -std::expm1(-x); }).pvalue > 1e-3);
}
