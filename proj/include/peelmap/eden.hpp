#pragma once

#include <cstdint>
#include <vector>

#include "peelmap/layers.hpp"
#include "peelmap/peel.hpp"

namespace peelmap {

// Uniform peeling with exponential clocks: the hole of perimeter 2P waits an Exp(2P) time.
struct EdenState {
    std::int64_t i = 0;
    std::int64_t P = 1;
    std::int64_t V = 0;
    double tau = 0;  // time of the last jump
    bool escaped = false;
};

// Advances the clock by an Exp(2P) variate, then performs one peeling step.
// Returns the clock increment.
double eden_step(EdenState& state, const Sampler& sampler, Rng& rng, const VolumeOptions& options);

// 2 P_i (tau_{i+1} - tau_i) over `steps` steps of each replica, pooled replica by replica
std::vector<double> standardized_increments(const Sampler& sampler, std::uint64_t seed, std::int64_t replicas,
                                            std::int64_t steps, unsigned threads = 0);

struct DfppEstimate {
    std::int64_t replicas = 0;
    std::int64_t n_trunc = 0;
    double mc_mean = 0;     // mean of tau_{n_trunc}
    double mc_se = 0;
    double tail = 0;        // sum_{i >= n_trunc} E[1/(2 P_i)]
    double tail_error = 0;  // numerical error of the tail
    double estimate = 0;    // mc_mean + tail
    double error_bound = 0; // mc_se + tail_error
    std::vector<double> tau;  // tau_{n_trunc} per replica
};

// E[d_fpp(f_r, infinity)] from tau_{n_trunc} plus the exact expected remainder. Dense phase only.
DfppEstimate estimate_dfpp(const Sampler& sampler, std::uint64_t seed, std::int64_t replicas, std::int64_t n_trunc,
                           unsigned threads = 0);

struct EdenRecord {
    double t = 0;
    std::int64_t P = 1;
    std::int64_t V = 0;
    std::int64_t n = 0;  // jumps up to time t
};

struct EdenRun {
    std::vector<EdenRecord> records;
    RunStatus status = RunStatus::Completed;
};

// quarter-octave grid 2^{j/4} from t_min up to t_max
std::vector<double> eden_time_grid(double t_min, double t_max);

// Records the state at each grid time until t_max or the step budget. Dilute phase only.
EdenRun run_eden_dilute_replica(const Sampler& sampler, std::uint64_t seed, std::int64_t replica,
                                const std::vector<double>& grid, std::int64_t step_budget, const VolumeOptions& options);

std::vector<EdenRun> run_eden_dilute(const Sampler& sampler, std::uint64_t seed, std::int64_t replicas, double t_min,
                                     double t_max, std::int64_t step_budget, const VolumeOptions& options,
                                     unsigned threads = 0);

}  // namespace peelmap
