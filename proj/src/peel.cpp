#include "peelmap/peel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "peelmap/parallel.hpp"

namespace peelmap {

double exact_mean_volume(const Model& model, std::int64_t l)
{
    if (l < 0) throw std::invalid_argument("exact_mean_volume: l must be >= 0");
    // kappa^{-l} h_down(l) / W^(l) with W^(l) = nu(-1-l) kappa^{-1-l} / 2
    return std::exp(std::log(2.0 * model.kappa()) + log_h_down(static_cast<double>(l)) -
                    model.log_nu_negative(static_cast<double>(l) + 1.0));
}

std::int64_t saturating_add(std::int64_t a, std::int64_t b)
{
    if (b > kMaxHalfPerimeter - a) return kMaxHalfPerimeter;
    return a + b;
}

std::int64_t boltzmann_volume(const Sampler& sampler, Rng& rng, std::int64_t l, const VolumeOptions& options)
{
    if (l < 0) throw std::invalid_argument("boltzmann_volume: l must be >= 0");
    const bool shortcut = options.mode == VolumeMode::Shortcut;
    std::int64_t volume = 0;
    std::vector<std::int64_t> pending{l};
    while (!pending.empty()) {
        std::int64_t h = pending.back();
        pending.pop_back();
        for (;;) {
            if (h == 0) {
                volume = saturating_add(volume, 1);
                break;
            }
            if (shortcut && h > options.shortcut_threshold) {
                volume = saturating_add(volume, limit_law_volume(sampler, rng, h));
                break;
            }
            const DiskStep st = sampler.disk_step(rng, h);
            if (!st.split) {
                if (st.grow >= kMaxHalfPerimeter - h)
                    throw std::overflow_error("boltzmann_volume: hole perimeter left the int64 range");
                h += st.grow;
                continue;
            }
            // keep the larger hole pending and follow the smaller one
            const std::int64_t small = std::min(st.left, st.right);
            pending.push_back(std::max(st.left, st.right));
            if (pending.size() > options.max_pending)
                throw std::length_error("boltzmann_volume: more than " + std::to_string(options.max_pending) +
                                        " pending holes");
            h = small;
        }
    }
    return volume;
}

std::int64_t limit_law_volume(const Sampler& sampler, Rng& rng, std::int64_t l)
{
    const Model& m = sampler.model();
    const double xi = sample_positive_stable_inverse_biased(rng, 1.0 / (m.a() - 0.5), std::exp(std::lgamma(m.a() + 0.5)));
    const double v = exact_mean_volume(m, l) * xi;
    if (!(v < static_cast<double>(kMaxHalfPerimeter))) return kMaxHalfPerimeter;
    return std::max<std::int64_t>(1, std::llround(v));
}

std::int64_t bubble_volume(const Sampler& sampler, Rng& rng, std::int64_t l, const VolumeOptions& options)
{
    switch (options.mode) {
    case VolumeMode::None:
        return 0;
    case VolumeMode::Shortcut:
        if (l > options.shortcut_threshold) return limit_law_volume(sampler, rng, l);
        return boltzmann_volume(sampler, rng, l, options);
    case VolumeMode::Exact:
        break;
    }
    return boltzmann_volume(sampler, rng, l, options);
}

void apply_event(PeelState& state, const PeelEvent& event, std::int64_t volume)
{
    ++state.i;
    if (event.is_glue()) {
        state.P -= event.size + 1;
        if (state.P < 1) throw std::logic_error("peeling reached a nonpositive half-perimeter");
        state.V = saturating_add(state.V, volume);
        if (state.V == kMaxHalfPerimeter) state.escaped = true;
    } else {
        state.P = saturating_add(state.P, event.size - 1);
        if (state.P == kMaxHalfPerimeter) state.escaped = true;
    }
}

PeelEvent peel_step(PeelState& state, const Sampler& sampler, Rng& rng, const VolumeOptions& options)
{
    const PeelEvent ev = sampler.peel_step_infinite(rng, state.P);
    const std::int64_t vol = ev.is_glue() ? bubble_volume(sampler, rng, ev.size, options) : 0;
    apply_event(state, ev, vol);
    return ev;
}

std::vector<std::int64_t> dyadic_checkpoints(std::int64_t steps)
{
    std::vector<std::int64_t> out{0};
    for (std::int64_t n = 1; n < steps; n *= 2) out.push_back(n);
    if (steps > 0) out.push_back(steps);
    return out;
}

PeelRun run_peel_replica(const Sampler& sampler, std::uint64_t seed, std::int64_t replica, std::int64_t steps,
                         const VolumeOptions& options)
{
    Rng rng(seed, static_cast<std::uint64_t>(replica));
    PeelState st;
    PeelRun run;
    for (std::int64_t target : dyadic_checkpoints(steps)) {
        while (st.i < target && !st.escaped) peel_step(st, sampler, rng, options);
        run.checkpoints.push_back({target, st.P, st.V});
    }
    run.escaped = st.escaped;
    return run;
}

std::vector<PeelRun> run_peel(const Sampler& sampler, std::uint64_t seed, std::int64_t steps, std::int64_t replicas,
                              const VolumeOptions& options, unsigned threads)
{
    if (steps < 1 || replicas < 1) throw std::invalid_argument("run_peel: steps and replicas must be >= 1");
    std::vector<PeelRun> out(static_cast<std::size_t>(replicas));
    parallel_for(replicas, threads, [&](std::int64_t r) { out[r] = run_peel_replica(sampler, seed, r, steps, options); });
    return out;
}

}  // namespace peelmap
