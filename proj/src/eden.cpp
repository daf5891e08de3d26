#include "peelmap/eden.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "peelmap/oracle.hpp"
#include "peelmap/parallel.hpp"
#include "peelmap/special.hpp"

namespace peelmap {

double eden_step(EdenState& state, const Sampler& sampler, Rng& rng, const VolumeOptions& options)
{
    const double dt = sample_exponential(rng, 2.0 * static_cast<double>(state.P));
    state.tau += dt;
    PeelState ps{state.i, state.P, state.V, state.escaped};
    peel_step(ps, sampler, rng, options);
    state.i = ps.i;
    state.P = ps.P;
    state.V = ps.V;
    state.escaped = ps.escaped;
    return dt;
}

std::vector<double> standardized_increments(const Sampler& sampler, std::uint64_t seed, std::int64_t replicas,
                                            std::int64_t steps, unsigned threads)
{
    std::vector<std::vector<double>> per(static_cast<std::size_t>(replicas));
    const VolumeOptions none{VolumeMode::None};
    parallel_for(replicas, threads, [&](std::int64_t r) {
        Rng rng(seed, static_cast<std::uint64_t>(r));
        EdenState st;
        for (std::int64_t i = 0; i < steps && !st.escaped; ++i) {
            const double rate = 2.0 * static_cast<double>(st.P);
            per[r].push_back(rate * eden_step(st, sampler, rng, none));
        }
    });
    std::vector<double> out;
    for (const auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
}

DfppEstimate estimate_dfpp(const Sampler& sampler, std::uint64_t seed, std::int64_t replicas, std::int64_t n_trunc,
                           unsigned threads)
{
    const Model& m = sampler.model();
    if (m.phase() != Phase::Dense) throw std::domain_error("estimate_dfpp: the distance to infinity is infinite when a > 2");
    if (replicas < 2 || n_trunc < 1) throw std::invalid_argument("estimate_dfpp: need replicas >= 2 and n_trunc >= 1");
    std::vector<double> tau(static_cast<std::size_t>(replicas));
    const VolumeOptions none{VolumeMode::None};
    parallel_for(replicas, threads, [&](std::int64_t r) {
        Rng rng(seed, static_cast<std::uint64_t>(r));
        EdenState st;
        while (st.i < n_trunc && !st.escaped) eden_step(st, sampler, rng, none);
        tau[r] = st.tau;
    });
    DfppEstimate e;
    e.replicas = replicas;
    e.n_trunc = n_trunc;
    double sum = 0, sq = 0;
    for (double t : tau) {
        sum += t;
        sq += t * t;
    }
    const double R = static_cast<double>(replicas);
    e.mc_mean = sum / R;
    e.mc_se = std::sqrt(std::max(0.0, sq / R - e.mc_mean * e.mc_mean) / (R - 1.0));
    const OracleValue tail = dfpp_tail(m, n_trunc);
    if (!tail.converged) throw NumericalError("estimate_dfpp: tail quadrature did not converge");
    e.tail = tail.value;
    e.tail_error = tail.error + std::abs(tail.imag);
    e.estimate = e.mc_mean + e.tail;
    e.error_bound = e.mc_se + e.tail_error;
    e.tau = std::move(tau);
    return e;
}

std::vector<double> eden_time_grid(double t_min, double t_max)
{
    if (!(t_min > 0.0) || !(t_max >= t_min)) throw std::invalid_argument("eden_time_grid: need 0 < t_min <= t_max");
    std::vector<double> grid;
    const int j0 = static_cast<int>(std::ceil(4.0 * std::log2(t_min) - 1e-9));
    const int j1 = static_cast<int>(std::floor(4.0 * std::log2(t_max) + 1e-9));
    for (int j = j0; j <= j1; ++j) grid.push_back(std::exp2(0.25 * j));
    return grid;
}

EdenRun run_eden_dilute_replica(const Sampler& sampler, std::uint64_t seed, std::int64_t replica,
                                const std::vector<double>& grid, std::int64_t step_budget, const VolumeOptions& options)
{
    Rng rng(seed, static_cast<std::uint64_t>(replica));
    EdenState st;
    EdenRun run;
    // the clock of the next jump is drawn before its step is taken
    double next = sample_exponential(rng, 2.0);
    for (double t : grid) {
        while (next <= t) {
            if (st.i >= step_budget) {
                run.status = RunStatus::BudgetExhausted;
                return run;
            }
            PeelState ps{st.i, st.P, st.V, false};
            peel_step(ps, sampler, rng, options);
            st.i = ps.i;
            st.P = ps.P;
            st.V = ps.V;
            st.tau = next;
            if (ps.escaped) {
                run.status = RunStatus::Escaped;
                return run;
            }
            next = st.tau + sample_exponential(rng, 2.0 * static_cast<double>(st.P));
        }
        run.records.push_back({t, st.P, st.V, st.i});
    }
    return run;
}

std::vector<EdenRun> run_eden_dilute(const Sampler& sampler, std::uint64_t seed, std::int64_t replicas, double t_min,
                                     double t_max, std::int64_t step_budget, const VolumeOptions& options,
                                     unsigned threads)
{
    if (sampler.model().phase() != Phase::Dilute)
        throw std::domain_error("run_eden_dilute: the Eden ball reaches infinity in finite time when a < 2");
    if (replicas < 1) throw std::invalid_argument("run_eden_dilute: replicas must be >= 1");
    const std::vector<double> grid = eden_time_grid(t_min, t_max);
    std::vector<EdenRun> out(static_cast<std::size_t>(replicas));
    parallel_for(replicas, threads, [&](std::int64_t r) {
        out[r] = run_eden_dilute_replica(sampler, seed, r, grid, step_budget, options);
    });
    return out;
}

}  // namespace peelmap
