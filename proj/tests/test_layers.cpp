#include <doctest.h>

#include "peelmap/layers.hpp"

using namespace peelmap;
using doctest::Approx;

TEST_CASE("layer kernel is a probability law")
{
    for (double a : {1.75, 2.25}) {
        const Model m = Model::special(a);
        for (auto [p, l] : {std::pair<std::int64_t, std::int64_t>{5, 3}, {8, 16}, {2, 4}, {1, 1}, {1, 2}})
            CHECK(layer_kernel_mass(m, p, l) == Approx(1.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(layer_kernel_mass(Model::special(2.25), 2, 5), std::invalid_argument);
}

TEST_CASE("layer transitions")
{
    LayerState s;  // P = 1, D = 2, H = 0
    apply_layer_event(s, PeelEvent::new_face(2), 0);
    CHECK(s.P == 2);
    CHECK(s.D == 1);
    CHECK(s.H == 0);
    apply_layer_event(s, PeelEvent::new_face(1), 0);
    CHECK(s.D == 4);  // the last edge at height H starts a new layer
    CHECK(s.H == 1);

    LayerState g{0, 5, 6, 3, 0, false};
    apply_layer_event(g, PeelEvent::glue(false, 1), 2);  // swallows 2 edges at height H
    CHECK(g.P == 3);
    CHECK(g.D == 2);
    CHECK(g.H == 3);
    apply_layer_event(g, PeelEvent::glue(false, 0), 1);  // swallows the remaining height-H edge
    CHECK(g.P == 2);
    CHECK(g.D == 4);
    CHECK(g.H == 4);
}

TEST_CASE("layer runs")
{
    const Sampler s(Model::special(2.25));
    const VolumeOptions opt{VolumeMode::Shortcut, 64};
    const LayerRun run = run_layers_replica(s, 3, 0, 16, std::int64_t{1} << 20, opt);
    REQUIRE(run.status == RunStatus::Completed);
    REQUIRE(run.records.size() == 17);
    for (std::size_t r = 0; r < run.records.size(); ++r) {
        CHECK(run.records[r].r == static_cast<std::int64_t>(r));
        if (r > 0) CHECK(run.records[r].theta > run.records[r - 1].theta);
    }
    Rng rng(3, 1);
    LayerState st;
    for (int i = 0; i < 5000; ++i) {
        layer_step(st, s, rng, opt);
        CHECK(st.D >= 1);
        CHECK(st.D <= 2 * st.P);
    }
}

TEST_CASE("height growth follows the inverse perimeter sum")
{
    const Sampler s(Model::special(2.25));
    const auto rows = height_growth_check(s, 5, 64, 2000, 1);
    REQUIRE_FALSE(rows.empty());
    for (const auto& row : rows) CHECK(row.mean_H >= 0);
    CHECK_THROWS_AS(height_growth_check(Sampler(Model::special(1.75)), 5, 64, 10, 1), std::domain_error);
}
