#include "peelmap/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "peelmap/parallel.hpp"

namespace peelmap {

void apply_layer_event(LayerState& s, const PeelEvent& ev, std::int64_t volume)
{
    PeelState ps{s.i, s.P, s.V, s.escaped};
    apply_event(ps, ev, volume);
    s.i = ps.i;
    s.V = ps.V;
    s.escaped = ps.escaped;
    const std::int64_t p = s.P;
    s.P = ps.P;
    if (s.escaped) return;
    if (s.D == 1) {
        // the last edge at height H is peeled: every outcome starts the next layer
        s.D = 2 * s.P;
        ++s.H;
        return;
    }
    if (!ev.is_glue()) {
        --s.D;
        return;
    }
    const std::int64_t k = ev.size + 1;
    if (ev.kind == PeelEvent::Kind::GlueRight) {
        if (2 * k < s.D) {
            s.D -= 2 * k;
        } else {
            s.D = 2 * s.P;
            ++s.H;
        }
    } else {
        if (2 * k < 2 * p - s.D + 1) --s.D;
        else s.D = 2 * s.P;
    }
}

PeelEvent layer_step(LayerState& state, const Sampler& sampler, Rng& rng, const VolumeOptions& options)
{
    const PeelEvent ev = sampler.peel_step_infinite(rng, state.P);
    const std::int64_t vol = ev.is_glue() ? bubble_volume(sampler, rng, ev.size, options) : 0;
    apply_layer_event(state, ev, vol);
    return ev;
}

double layer_kernel_mass(const Model& model, std::int64_t p, std::int64_t l)
{
    if (p < 1 || l < 1 || l > 2 * p) throw std::invalid_argument("layer_kernel_mass: need 1 <= l <= 2p");
    const double hp = h_up(p);
    // p^{(p)}_{-k+1}: glue swallowing k half-edges on one given side
    auto glue = [&](std::int64_t k) { return 0.5 * model.nu(-k) * h_up(p - k) / hp; };
    const double new_face = up_positive_mass(model, p);
    double mass = new_face;
    if (l == 1) {
        for (std::int64_t k = 1; k <= p - 1; ++k) mass += 2.0 * glue(k);
        return mass;
    }
    const double ld = static_cast<double>(l);
    for (std::int64_t k = 1; k <= p - 1; ++k) {
        const double kd = static_cast<double>(k);
        const double pd = static_cast<double>(p);
        if (kd < ld / 2.0) mass += glue(k);                                  // (p-k, l-2k, h)
        if (ld / 2.0 <= kd && k <= p - 1) mass += glue(k);                    // (p-k, 2(p-k), h+1)
        if (kd < pd - (ld - 1.0) / 2.0) mass += glue(k);                      // (p-k, l-1, h)
        if (pd - (ld - 1.0) / 2.0 <= kd && k <= p - 1) mass += glue(k);       // (p-k, 2(p-k), h)
    }
    return mass;
}

const char* to_string(RunStatus status)
{
    switch (status) {
    case RunStatus::Completed:
        return "completed";
    case RunStatus::BudgetExhausted:
        return "budget_exhausted";
    case RunStatus::Escaped:
        return "escaped";
    }
    return "unknown";
}

LayerRun run_layers_replica(const Sampler& sampler, std::uint64_t seed, std::int64_t replica, std::int64_t r_max,
                            std::int64_t step_budget, const VolumeOptions& options)
{
    if (r_max < 1) throw std::invalid_argument("run_layers: r_max must be >= 1");
    Rng rng(seed, static_cast<std::uint64_t>(replica));
    LayerState st;
    LayerRun run;
    run.records.push_back({0, 0, st.P, st.V});
    while (st.H < r_max) {
        if (st.i >= step_budget) {
            run.status = RunStatus::BudgetExhausted;
            break;
        }
        const std::int64_t h = st.H;
        layer_step(st, sampler, rng, options);
        if (st.escaped) {
            run.status = RunStatus::Escaped;
            break;
        }
        if (st.H != h) run.records.push_back({st.H, st.i, st.P, st.V});
    }
    run.steps = st.i;
    return run;
}

std::vector<LayerRun> run_layers(const Sampler& sampler, std::uint64_t seed, std::int64_t r_max, std::int64_t step_budget,
                                 std::int64_t replicas, const VolumeOptions& options, unsigned threads)
{
    if (replicas < 1) throw std::invalid_argument("run_layers: replicas must be >= 1");
    std::vector<LayerRun> out(static_cast<std::size_t>(replicas));
    parallel_for(replicas, threads,
                 [&](std::int64_t r) { out[r] = run_layers_replica(sampler, seed, r, r_max, step_budget, options); });
    return out;
}

std::vector<HeightGrowthRow> height_growth_check(const Sampler& sampler, std::uint64_t seed, std::int64_t n_max,
                                                 std::int64_t replicas, unsigned threads)
{
    const Model& m = sampler.model();
    if (m.phase() != Phase::Dilute) throw std::domain_error("height_growth_check: only meaningful in the dilute phase");
    if (n_max < 1 || replicas < 2) throw std::invalid_argument("height_growth_check: need n_max >= 1 and replicas >= 2");
    const std::vector<std::int64_t> grid = dyadic_checkpoints(n_max);
    std::vector<std::vector<std::int64_t>> heights(static_cast<std::size_t>(replicas));
    const VolumeOptions none{VolumeMode::None};
    parallel_for(replicas, threads, [&](std::int64_t r) {
        Rng rng(seed, static_cast<std::uint64_t>(r));
        LayerState st;
        auto& h = heights[r];
        for (std::int64_t n : grid) {
            while (st.i < n && !st.escaped) layer_step(st, sampler, rng, none);
            h.push_back(st.H);
        }
    });
    std::vector<HeightGrowthRow> rows;
    const double expo = (m.a() - 2.0) / (m.a() - 1.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0, sq = 0;
        for (const auto& h : heights) {
            sum += static_cast<double>(h[g]);
            sq += static_cast<double>(h[g]) * static_cast<double>(h[g]);
        }
        const double R = static_cast<double>(replicas);
        HeightGrowthRow row;
        row.n = grid[g];
        row.mean_H = sum / R;
        row.se_H = std::sqrt(std::max(0.0, sq / R - row.mean_H * row.mean_H) / (R - 1.0));
        row.reference = std::pow(static_cast<double>(grid[g]), expo);
        row.ratio = row.mean_H / row.reference;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace peelmap
