#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "peelmap/model.hpp"
#include "peelmap/sampler.hpp"

namespace peelmap {

enum class VolumeMode {
    None,      // volumes are not tracked, V stays 0
    Exact,     // every swallowed bubble is filled by an exact Boltzmann disk sample
    Shortcut,  // bubbles above a threshold draw their volume from the limit law
};

struct VolumeOptions {
    VolumeMode mode = VolumeMode::Exact;
    std::int64_t shortcut_threshold = 64;
    // exact samples abort with an exception when more holes than this are pending
    std::size_t max_pending = std::size_t{1} << 24;
};

struct PeelState {
    std::int64_t i = 0;
    std::int64_t P = 1;
    std::int64_t V = 0;
    bool escaped = false;  // P or V left the exactly representable range; the state is frozen
};

// E|B^(l)| = kappa^{-l} h_down(l) / W^(l)
double exact_mean_volume(const Model& model, std::int64_t l);

// Vertex count of a q-Boltzmann disk of half-perimeter l (l = 0 is the vertex map).
// Peels the disk edge by edge with the unpointed kernel and counts the vertex maps left at the end.
std::int64_t boltzmann_volume(const Sampler& sampler, Rng& rng, std::int64_t l, const VolumeOptions& options = {});

// max(1, round(E|B^(l)| xi)) with xi the 1/x-biased stable variable of mean 1
std::int64_t limit_law_volume(const Sampler& sampler, Rng& rng, std::int64_t l);

// volume of a swallowed bubble under the given options (0 when volumes are not tracked)
std::int64_t bubble_volume(const Sampler& sampler, Rng& rng, std::int64_t l, const VolumeOptions& options);

// Adds a and b, saturating at kMaxHalfPerimeter.
std::int64_t saturating_add(std::int64_t a, std::int64_t b);

// Applies a drawn event to (P, V); marks the state escaped on saturation.
void apply_event(PeelState& state, const PeelEvent& event, std::int64_t volume);

// One step of the peeling of the infinite map. Returns the event that was applied.
PeelEvent peel_step(PeelState& state, const Sampler& sampler, Rng& rng, const VolumeOptions& options);

struct PeelCheckpoint {
    std::int64_t n = 0;
    std::int64_t P = 1;
    std::int64_t V = 0;
};

// After an escape the frozen (saturated) state is repeated at the remaining checkpoints.
struct PeelRun {
    std::vector<PeelCheckpoint> checkpoints;
    bool escaped = false;
};

// 0, 1, 2, 4, ... up to and including `steps`
std::vector<std::int64_t> dyadic_checkpoints(std::int64_t steps);

PeelRun run_peel_replica(const Sampler& sampler, std::uint64_t seed, std::int64_t replica, std::int64_t steps,
                         const VolumeOptions& options);

std::vector<PeelRun> run_peel(const Sampler& sampler, std::uint64_t seed, std::int64_t steps, std::int64_t replicas,
                              const VolumeOptions& options, unsigned threads = 0);

}  // namespace peelmap
