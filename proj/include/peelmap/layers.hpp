#pragma once

#include <cstdint>
#include <vector>

#include "peelmap/peel.hpp"

namespace peelmap {

// State of the peeling by layers: D edges of the hole sit at height H, the other 2P - D at H + 1.
struct LayerState {
    std::int64_t i = 0;
    std::int64_t P = 1;
    std::int64_t D = 2;
    std::int64_t H = 0;
    std::int64_t V = 0;
    bool escaped = false;
};

struct LayerRecord {
    std::int64_t r = 0;
    std::int64_t theta = 0;  // step at which height r is reached
    std::int64_t P = 1;
    std::int64_t V = 0;
};

// Routes a peeling event through the layer kernel. The event is drawn at half-perimeter P;
// a GlueRight swallows edges at height H, a GlueLeft edges at height H + 1.
void apply_layer_event(LayerState& state, const PeelEvent& event, std::int64_t volume);

PeelEvent layer_step(LayerState& state, const Sampler& sampler, Rng& rng, const VolumeOptions& options);

// Total mass of the layer kernel out of (p, l), summed line by line from the exact peeling masses.
double layer_kernel_mass(const Model& model, std::int64_t p, std::int64_t l);

enum class RunStatus { Completed, BudgetExhausted, Escaped };

const char* to_string(RunStatus status);

struct LayerRun {
    std::vector<LayerRecord> records;  // r = 0, 1, ..., reached radius
    std::int64_t steps = 0;
    RunStatus status = RunStatus::Completed;
};

LayerRun run_layers_replica(const Sampler& sampler, std::uint64_t seed, std::int64_t replica, std::int64_t r_max,
                            std::int64_t step_budget, const VolumeOptions& options);

std::vector<LayerRun> run_layers(const Sampler& sampler, std::uint64_t seed, std::int64_t r_max, std::int64_t step_budget,
                                 std::int64_t replicas, const VolumeOptions& options, unsigned threads = 0);

struct HeightGrowthRow {
    std::int64_t n = 0;
    double mean_H = 0;
    double se_H = 0;
    double reference = 0;  // n^{(a-2)/(a-1)}
    double ratio = 0;      // mean_H / reference
};

// Mean height after n steps at dyadic n <= n_max. Dilute phase only.
std::vector<HeightGrowthRow> height_growth_check(const Sampler& sampler, std::uint64_t seed, std::int64_t n_max,
                                                 std::int64_t replicas, unsigned threads = 0);

}  // namespace peelmap
