#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "peelmap/model.hpp"

namespace peelmap {

// Half-perimeters and jumps are exact up to this bound; larger values saturate to it.
inline constexpr std::int64_t kMaxHalfPerimeter = std::int64_t{1} << 62;

// Per-replica generator. Streams are keyed by (master seed, replica index).
class Rng {
public:
    using result_type = std::uint64_t;

    Rng(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    // uniform on (0, 1) with 53 random bits
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
    // uniform on (0, 1) resolving values down to 2^-64, for tail inversion
    double uniform_fine();
    bool bit() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Law on m >= 1 with masses scale * Gamma(m + alpha) / Gamma(m + beta), beta - alpha > 1.
// Tails telescope: sum_{j >= m} = scale * Gamma(m + alpha) / ((beta - alpha - 1) Gamma(m + beta - 1)).
class GammaRatioLaw {
public:
    GammaRatioLaw(double log_scale, double alpha, double beta, std::int64_t table_size = 1 << 16);

    double pmf(std::int64_t m) const;
    double tail(std::int64_t m) const;  // sum over j >= m
    double tail_real(double x) const;

    // exact draw; values beyond kMaxHalfPerimeter are returned as kMaxHalfPerimeter
    std::int64_t sample(Rng& rng) const { return invert(rng.uniform_fine() * tail_[1]); }
    // exact draw restricted to [lo, hi]
    std::int64_t sample(Rng& rng, std::int64_t lo, std::int64_t hi) const
    {
        return sample_between(rng, tail(lo), tail(hi + 1), lo, hi);
    }
    // same with the two tails supplied by the caller
    std::int64_t sample_between(Rng& rng, double t_lo, double t_hi, std::int64_t lo, std::int64_t hi) const;

    // the m with tail(m + 1) < r <= tail(m), for r in (0, tail(1)]
    std::int64_t invert(double r) const;

private:
    std::int64_t invert_beyond_table(double r) const;

    double log_scale_, alpha_, beta_, decay_, shift_;
    std::int64_t table_size_;
    std::vector<double> pmf_;   // index m, 1..table_size
    std::vector<double> tail_;  // index m, 1..table_size + 1
    std::vector<std::int32_t> guide_;  // guide_[b]: the m drawn at r = tail(1) (1 - b / buckets)
};

struct PeelEvent {
    enum class Kind { NewFace, GlueLeft, GlueRight };
    Kind kind = Kind::NewFace;
    std::int64_t size = 1;  // k for NewFace (face degree 2k), j for glue (bubble perimeter 2j)

    static PeelEvent new_face(std::int64_t k) { return {Kind::NewFace, k}; }
    static PeelEvent glue(bool left, std::int64_t j) { return {left ? Kind::GlueLeft : Kind::GlueRight, j}; }
    bool is_glue() const { return kind != Kind::NewFace; }
    // change of the half-perimeter caused by the event
    std::int64_t perimeter_change() const { return is_glue() ? -(size + 1) : size - 1; }
};

struct FiniteStep {
    PeelEvent event;
    bool absorbed = false;  // the disk exploration closed (perimeter reached 0)
};

// One step of the peeling of an unpointed Boltzmann disk of half-perimeter l.
struct DiskStep {
    bool split = false;
    std::int64_t grow = 0;          // new face: hole becomes l + grow
    std::int64_t left = 0, right = 0;  // split: two holes with left + right = l - 1
};

// Exact samplers for nu and for the peeling kernels of one model. Caches are filled at
// construction and read-only afterwards, so one instance can serve concurrent replicas.
class Sampler {
public:
    explicit Sampler(const Model& model);

    const Model& model() const { return model_; }

    std::int64_t sample_nu(Rng& rng) const;

    // kernel of the peeling of the infinite map at half-perimeter l >= 1
    PeelEvent peel_step_infinite(Rng& rng, std::int64_t l) const;
    // h_down-transformed walk: peeling of a pointed disk at half-perimeter l >= 1
    FiniteStep peel_step_finite(Rng& rng, std::int64_t l) const;
    // peeling of an unpointed Boltzmann disk at half-perimeter l >= 1
    DiskStep disk_step(Rng& rng, std::int64_t l) const;

    double nu(std::int64_t k) const;
    double h_up(std::int64_t l) const;
    double h_down(std::int64_t l) const;

    // exact kernel masses, for tables and tests
    double infinite_new_face_prob(std::int64_t l, std::int64_t k) const;
    double infinite_glue_prob(std::int64_t l, std::int64_t j) const;  // one side

    const GammaRatioLaw& positive_law() const { return pos_; }
    const GammaRatioLaw& negative_law() const { return neg_; }

private:
    Model model_;
    GammaRatioLaw pos_;  // nu(m), m >= 1
    GammaRatioLaw neg_;  // nu(-m), m >= 1
    GammaRatioLaw env_;  // c Gamma(m + 3/2 - a) / Gamma(m + 1): dominates sqrt(m) nu(m)
    std::vector<double> h_down_;
};

double sample_exponential(Rng& rng, double rate);

// Positive stable variate with Laplace transform exp(-(scale * lambda)^index), index in (0, 1).
double sample_positive_stable(Rng& rng, double index, double scale);

// The same law reweighted by 1/x and renormalized.
double sample_positive_stable_inverse_biased(Rng& rng, double index, double scale);

}  // namespace peelmap
