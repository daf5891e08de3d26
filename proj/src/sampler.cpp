#include "peelmap/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "peelmap/special.hpp"

namespace peelmap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::int64_t kHarmonicTable = std::int64_t{1} << 20;
constexpr double kMaxAsDouble = 4.611686018427387904e18;  // 2^62
constexpr std::int64_t kGuideBuckets = 1 << 14;
constexpr std::int64_t kNegTruncate = std::int64_t{1} << 16;

}  // namespace

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)))
{
}

double Rng::uniform_fine()
{
    const double u = (static_cast<double>(engine_()) + 0.5) * 0x1.0p-64;
    return std::min(u, 1.0 - 0x1.0p-53);
}

// ---------------------------------------------------------------------------

GammaRatioLaw::GammaRatioLaw(double log_scale, double alpha, double beta, std::int64_t table_size)
    : log_scale_(log_scale), alpha_(alpha), beta_(beta), decay_(beta - alpha - 1.0),
      shift_(0.5 * (alpha + beta - 2.0)), table_size_(table_size)
{
    if (!(decay_ > 0.0) || !(alpha > -1.0)) throw std::invalid_argument("GammaRatioLaw: need beta - alpha > 1 and alpha > -1");
    pmf_.assign(static_cast<std::size_t>(table_size_) + 1, 0.0);
    tail_.assign(static_cast<std::size_t>(table_size_) + 2, 0.0);
    for (std::int64_t m = 1; m <= table_size_; ++m)
        pmf_[m] = std::exp(log_scale_ + log_gamma_ratio_shift(static_cast<double>(m), alpha_, beta_));
    for (std::int64_t m = 1; m <= table_size_ + 1; ++m) tail_[m] = tail_real(static_cast<double>(m));
    guide_.resize(kGuideBuckets + 1);
    for (std::int64_t b = 0; b <= kGuideBuckets; ++b) {
        const double r = tail_[1] * (1.0 - static_cast<double>(b) / kGuideBuckets);
        // largest m in the table with tail(m) >= r
        auto it = std::upper_bound(tail_.begin() + 1, tail_.end(), r, std::greater<double>());
        guide_[b] = static_cast<std::int32_t>(std::max<std::ptrdiff_t>(1, it - tail_.begin() - 1));
    }
}

double GammaRatioLaw::pmf(std::int64_t m) const
{
    if (m < 1) return 0.0;
    if (m <= table_size_) return pmf_[m];
    return std::exp(log_scale_ + log_gamma_ratio_shift(static_cast<double>(m), alpha_, beta_));
}

double GammaRatioLaw::tail_real(double x) const
{
    return std::exp(log_scale_ - std::log(decay_) + log_gamma_ratio_shift(x, alpha_, beta_ - 1.0));
}

double GammaRatioLaw::tail(std::int64_t m) const
{
    if (m <= 1) return tail_[1];
    if (m <= table_size_ + 1) return tail_[m];
    if (m >= kMaxHalfPerimeter) return 0.0;
    return tail_real(static_cast<double>(m));
}

std::int64_t GammaRatioLaw::invert(double r) const
{
    if (r >= tail_[1]) return 1;
    if (r <= tail_[table_size_ + 1]) return invert_beyond_table(r);
    const auto b = static_cast<std::int64_t>((1.0 - r / tail_[1]) * kGuideBuckets);
    std::int64_t lo = guide_[std::clamp<std::int64_t>(b, 0, kGuideBuckets)];
    std::int64_t hi = b + 1 <= kGuideBuckets ? std::min<std::int64_t>(guide_[b + 1] + 1, table_size_) : table_size_;
    lo = std::max<std::int64_t>(1, lo - 1);
    // largest m in [lo, hi] with tail(m) >= r
    while (lo < hi) {
        const std::int64_t mid = (lo + hi + 1) / 2;
        if (tail_[mid] >= r) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

std::int64_t GammaRatioLaw::invert_beyond_table(double r) const
{
    // tail(x) ~ scale (x + shift)^{-decay} / decay up to O(x^-2); refine on the log scale
    const double log_r = std::log(r);
    double y = std::exp((log_scale_ - std::log(decay_) - log_r) / decay_);
    double x = y - shift_;
    for (int it = 0; it < 8 && x < kMaxAsDouble; ++it) {
        const double gap = std::log(tail_real(std::max(x, 1.0))) - log_r;
        const double nx = (x + shift_) * std::exp(gap / decay_) - shift_;
        const bool done = std::abs(nx - x) < std::max(0.25, 1e-14 * x);
        x = nx;
        if (done) break;
    }
    if (!(x < kMaxAsDouble)) return kMaxHalfPerimeter;
    // past 2^50 neighbouring integers have tails equal to double precision
    if (x > 0x1.0p50) return static_cast<std::int64_t>(x);
    std::int64_t m = std::max(table_size_ + 1, static_cast<std::int64_t>(x));
    while (m > table_size_ + 1 && tail(m) < r) --m;
    while (tail(m + 1) >= r) {
        if (++m >= kMaxHalfPerimeter) return kMaxHalfPerimeter;
    }
    return m;
}

std::int64_t GammaRatioLaw::sample_between(Rng& rng, double t_lo, double t_hi, std::int64_t lo, std::int64_t hi) const
{
    const double r = t_hi + rng.uniform_fine() * (t_lo - t_hi);
    return std::clamp(invert(r), lo, hi);
}

// ---------------------------------------------------------------------------

Sampler::Sampler(const Model& model)
    : model_(model),
      pos_(std::log(model.c()), 1.5 - model.a(), 1.5),
      neg_(std::log(model.c()) - std::log(std::cos(kPi * model.a())), -0.5, model.a() - 0.5),
      env_(std::log(model.c()), 1.5 - model.a(), 1.0)
{
    h_down_.resize(static_cast<std::size_t>(kHarmonicTable) + 1);
    for (std::int64_t l = 0; l <= kHarmonicTable; ++l) h_down_[l] = peelmap::h_down(l);
}

double Sampler::nu(std::int64_t k) const
{
    if (k > 0) return pos_.pmf(k);
    if (k < 0) return neg_.pmf(-k);
    return 0.0;
}

double Sampler::h_down(std::int64_t l) const
{
    if (l < 0) return 0.0;
    if (l <= kHarmonicTable) return h_down_[l];
    return std::exp(log_h_down(static_cast<double>(l)));
}

double Sampler::h_up(std::int64_t l) const { return l <= 0 ? 0.0 : 2.0 * static_cast<double>(l) * h_down(l); }

std::int64_t Sampler::sample_nu(Rng& rng) const
{
    const double up = pos_.tail(1);
    const double down = neg_.tail(1);
    if (rng.uniform() * (up + down) < down) return -neg_.sample(rng);
    return pos_.sample(rng);
}

double Sampler::infinite_new_face_prob(std::int64_t l, std::int64_t k) const
{
    if (l < 1 || k < 2) return 0.0;
    return nu(k - 1) * h_up(l + k - 1) / h_up(l);
}

double Sampler::infinite_glue_prob(std::int64_t l, std::int64_t j) const
{
    if (l < 1 || j < 0 || j > l - 2) return 0.0;
    return 0.5 * nu(-j - 1) * h_up(l - j - 1) / h_up(l);
}

namespace {

// h_up(n) <= 2 sqrt(n / pi) for the real extension, used by the envelopes
double h_up_real(const Sampler& s, double n)
{
    if (n <= static_cast<double>(kHarmonicTable)) return s.h_up(static_cast<std::int64_t>(n));
    return 2.0 * n * std::exp(log_h_down(n));
}

}  // namespace

PeelEvent Sampler::peel_step_infinite(Rng& rng, std::int64_t l) const
{
    if (l < 1) throw std::invalid_argument("peel_step_infinite: l must be >= 1");
    const double hl = h_up(l);
    const double ld = static_cast<double>(l);
    // target on positive jumps m: nu(m) h_up(l+m) / h_up(l) <= fac (sqrt(l) nu(m) + g(m))
    const double fac = 2.0 / (std::sqrt(kPi) * hl);
    const double mass_a = fac * std::sqrt(ld) * pos_.tail(1);
    const double mass_g = fac * env_.tail(1);
    // negative jumps -m, 1 <= m <= l-1: target nu(-m) h_up(l-m) / h_up(l) <= nu(-m)
    // for large l the untruncated law is proposed and m >= l rejected, which avoids a tail evaluation
    const bool truncate = l <= kNegTruncate;
    const double neg_top = truncate ? neg_.tail(l) : 0.0;
    const double mass_b = l >= 2 ? neg_.tail(1) - neg_top : 0.0;
    const double total = mass_a + mass_g + mass_b;
    for (;;) {
        const double u = rng.uniform() * total;
        if (u < mass_a + mass_g) {
            const std::int64_t m = u < mass_a ? pos_.sample(rng) : env_.sample(rng);
            if (m >= kMaxHalfPerimeter - l) return PeelEvent::new_face(kMaxHalfPerimeter);
            const double md = static_cast<double>(m);
            const double num = pos_.pmf(m) * h_up_real(*this, ld + md) / hl;
            const double env = fac * (std::sqrt(ld) * pos_.pmf(m) + env_.pmf(m));
            assert(num <= env * (1 + 1e-12));
            if (rng.uniform() * env < num) return PeelEvent::new_face(m + 1);
        } else {
            const std::int64_t m = truncate ? neg_.sample_between(rng, neg_.tail(1), neg_top, 1, l - 1) : neg_.sample(rng);
            if (m < l && rng.uniform() * hl < h_up(l - m)) return PeelEvent::glue(rng.bit(), m - 1);
        }
    }
}

FiniteStep Sampler::peel_step_finite(Rng& rng, std::int64_t l) const
{
    if (l < 1) throw std::invalid_argument("peel_step_finite: l must be >= 1");
    const double hl = h_down(l);
    const std::int64_t half = l / 2;
    // P: k >= 1 from nu, accepted with h_down(l+k)/h_down(l) <= 1
    const double mass_p = pos_.tail(1);
    // N1: m in [1, half], ratio h_down(l-m)/h_down(l) <= b1
    const double b1 = h_down(l - half) / hl;
    const double mass_n1 = half >= 1 ? b1 * (neg_.tail(1) - neg_.tail(half + 1)) : 0.0;
    // N2: n = l - m in [0, top], proposal proportional to h_down(n), whose partial sums are h_up(n+1)
    const std::int64_t top = l - half - 1;
    const double nu_edge = neg_.pmf(half + 1);
    const double mass_n2 = nu_edge * h_up(top + 1) / hl;
    const double total = mass_p + mass_n1 + mass_n2;
    auto step = [&](std::int64_t m) {
        FiniteStep out;
        out.event = PeelEvent::glue(rng.bit(), m - 1);
        out.absorbed = (m == l);
        return out;
    };
    for (;;) {
        const double u = rng.uniform() * total;
        if (u < mass_p) {
            const std::int64_t k = pos_.sample(rng);
            if (k >= kMaxHalfPerimeter - l) return {PeelEvent::new_face(kMaxHalfPerimeter), false};
            if (rng.uniform() * hl < h_down(l + k)) return {PeelEvent::new_face(k + 1), false};
        } else if (u < mass_p + mass_n1) {
            const std::int64_t m = neg_.sample(rng, 1, half);
            if (rng.uniform() * b1 * hl < h_down(l - m)) return step(m);
        } else {
            const double v = rng.uniform() * h_up(top + 1);
            // smallest n with h_up(n + 1) > v; h_up(n) ~ 2 sqrt(n / pi)
            std::int64_t n = std::clamp(static_cast<std::int64_t>(0.25 * kPi * v * v), std::int64_t{0}, top);
            while (n > 0 && h_up(n) > v) --n;
            while (n < top && h_up(n + 1) <= v) ++n;
            const std::int64_t m = l - n;
            if (rng.uniform() * nu_edge < neg_.pmf(m)) return step(m);
        }
    }
}

DiskStep Sampler::disk_step(Rng& rng, std::int64_t l) const
{
    if (l < 1) throw std::invalid_argument("disk_step: l must be >= 1");
    // new face m >= 1: nu(m) nu(-l-m-1) / nu(-l-1) <= nu(m)
    // split (l1, l2), l1 + l2 = l - 1: nu(-1-l1) nu(-1-l2) / (2 nu(-1-l)); with s = min, L = max this is
    // nu(-1-s)/2 * [nu(-1-L)/nu(-1-l)], the bracket bounded per range of s
    const double base = neg_.pmf(l + 1);
    const std::int64_t s1 = (l - 1) / 4;
    const std::int64_t s2 = (l - 1) / 2;
    const double b1 = neg_.pmf(l - s1) / base;
    const double b2 = neg_.pmf(l - s2) / base;
    const double mass_f = pos_.tail(1);
    const double mass_1 = b1 * (neg_.tail(1) - neg_.tail(s1 + 2));
    const double mass_2 = s2 > s1 ? b2 * (neg_.tail(s1 + 2) - neg_.tail(s2 + 2)) : 0.0;
    const double total = mass_f + mass_1 + mass_2;
    for (;;) {
        const double u = rng.uniform() * total;
        if (u < mass_f) {
            const std::int64_t m = pos_.sample(rng);
            if (m >= kMaxHalfPerimeter - l) return {false, kMaxHalfPerimeter, 0, 0};
            if (rng.uniform() * base < neg_.pmf(l + m + 1)) return {false, m, 0, 0};
        } else {
            const bool first = u < mass_f + mass_1;
            const std::int64_t s = first ? neg_.sample(rng, 1, s1 + 1) - 1 : neg_.sample(rng, s1 + 2, s2 + 1) - 1;
            const std::int64_t big = l - 1 - s;
            double accept = neg_.pmf(big + 1) / base / (first ? b1 : b2);
            if (s == big) accept *= 0.5;
            if (rng.uniform() < accept) {
                if (s != big && rng.bit()) return {true, 0, big, s};
                return {true, 0, s, big};
            }
        }
    }
}

// ---------------------------------------------------------------------------

double sample_exponential(Rng& rng, double rate)
{
    if (!(rate > 0.0)) throw std::invalid_argument("sample_exponential: rate must be positive");
    return -std::log(rng.uniform()) / rate;
}

namespace {

// Kanter's function; increasing on (0, pi)
double kanter(double alpha, double u)
{
    return std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) * std::sin((1.0 - alpha) * u) /
           std::pow(std::sin(u), 1.0 / (1.0 - alpha));
}

void check_index(double index)
{
    if (!(index > 0.0 && index < 1.0)) throw std::invalid_argument("positive stable index must lie in (0, 1)");
}

}  // namespace

double sample_positive_stable(Rng& rng, double index, double scale)
{
    check_index(index);
    const double u = kPi * rng.uniform();
    const double e = -std::log(rng.uniform());
    return scale * std::pow(kanter(index, u) / e, (1.0 - index) / index);
}

double sample_positive_stable_inverse_biased(Rng& rng, double index, double scale)
{
    check_index(index);
    // X = (A(U)/E)^beta; reweighting by 1/X = E^beta A(U)^-beta makes E ~ Gamma(1 + beta) and
    // gives U the density A(u)^-beta, which is decreasing, so a uniform proposal is accepted
    // with probability (A(0+)/A(u))^beta.
    const double beta = (1.0 - index) / index;
    const double a0 = std::pow(index, index / (1.0 - index)) * (1.0 - index);
    double u;
    do {
        u = kPi * rng.uniform();
    } while (rng.uniform() > std::pow(a0 / kanter(index, u), beta));
    std::gamma_distribution<double> gamma(1.0 + beta, 1.0);
    const double e = gamma(rng);
    return scale * std::pow(kanter(index, u) / e, beta);
}

}  // namespace peelmap
