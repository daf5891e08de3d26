#include <doctest.h>

#include <cmath>

#include "peelmap/peel.hpp"
#include "peelmap/stats.hpp"

using namespace peelmap;
using doctest::Approx;

TEST_CASE("events move the state as described")
{
    PeelState s;
    apply_event(s, PeelEvent::new_face(1), 0);
    CHECK(s.P == 1);
    CHECK(s.i == 1);
    apply_event(s, PeelEvent::new_face(4), 0);
    CHECK(s.P == 4);
    apply_event(s, PeelEvent::glue(false, 0), 1);
    CHECK(s.P == 3);
    CHECK(s.V == 1);
    apply_event(s, PeelEvent::glue(true, 1), 5);
    CHECK(s.P == 1);
    CHECK(s.V == 6);
    CHECK_FALSE(s.escaped);
}

TEST_CASE("saturation freezes the state")
{
    CHECK(saturating_add(kMaxHalfPerimeter - 1, 5) == kMaxHalfPerimeter);
    PeelState s;
    s.P = kMaxHalfPerimeter - 2;
    apply_event(s, PeelEvent::new_face(10), 0);
    CHECK(s.escaped);
}

TEST_CASE("exact mean volume")
{
    const Model m = Model::special(2.25);
    CHECK(exact_mean_volume(m, 0) == Approx(1.0));
    CHECK(exact_mean_volume(m, 1) == Approx(2.75).epsilon(1e-12));
    const double bq = m.derived().b_q;
    CHECK(exact_mean_volume(m, 100000) / (bq * std::pow(1e5, 1.75)) == Approx(1.0).epsilon(0.01));
}

TEST_CASE("Boltzmann volumes")
{
    const Sampler s(Model::special(2.25));
    Rng rng(23, 0);
    CHECK(boltzmann_volume(s, rng, 0) == 1);
    std::vector<double> v;
    for (int i = 0; i < 100000; ++i) v.push_back(static_cast<double>(boltzmann_volume(s, rng, 1)));
    for (double x : v) CHECK(x >= 2);
    // the law has a heavy tail: loose relative tolerance rather than a z-score
    CHECK(mean_se(v).mean == Approx(2.75).epsilon(0.05));
}

TEST_CASE("runs are reproducible and respect the checkpoints")
{
    const Sampler s(Model::special(1.75));
    const VolumeOptions opt{VolumeMode::Shortcut, 64};
    const auto r1 = run_peel_replica(s, 99, 4, 256, opt);
    const auto r2 = run_peel_replica(s, 99, 4, 256, opt);
    REQUIRE(r1.checkpoints.size() == dyadic_checkpoints(256).size());
    for (std::size_t i = 0; i < r1.checkpoints.size(); ++i) {
        CHECK(r1.checkpoints[i].n == dyadic_checkpoints(256)[i]);
        CHECK(r1.checkpoints[i].P == r2.checkpoints[i].P);
        CHECK(r1.checkpoints[i].V == r2.checkpoints[i].V);
        CHECK(r1.checkpoints[i].P >= 1);
    }
    CHECK(dyadic_checkpoints(5) == std::vector<std::int64_t>{0, 1, 2, 4, 5});
}

TEST_CASE("volume modes")
{
    const Sampler s(Model::special(2.25));
    Rng rng(29, 0);
    CHECK(bubble_volume(s, rng, 3, {VolumeMode::None, 64}) == 0);
    CHECK(limit_law_volume(s, rng, 1000) >= 1);
    CHECK_THROWS_AS(boltzmann_volume(s, rng, -1), std::invalid_argument);
}
