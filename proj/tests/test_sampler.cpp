#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "peelmap/sampler.hpp"
#include "peelmap/stats.hpp"

using namespace peelmap;
using doctest::Approx;

namespace {

// chi-square of observed counts against expected probabilities, plus a pooled remainder cell.
// Cells of probability zero must be empty and do not count as degrees of freedom.
double chi2_pvalue(const std::vector<double>& counts, const std::vector<double>& probs, double n)
{
    double stat = 0, rest_obs = n, rest_p = 1, dof = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (probs[i] == 0) {
            if (counts[i] != 0) return 0;
            continue;
        }
        ++dof;
        const double e = n * probs[i];
        stat += (counts[i] - e) * (counts[i] - e) / e;
        rest_obs -= counts[i];
        rest_p -= probs[i];
    }
    const double e = n * rest_p;
    stat += (rest_obs - e) * (rest_obs - e) / e;
    return chi_square_pvalue(stat, dof);
}

}  // namespace

TEST_CASE("Rng streams are reproducible and distinct")
{
    Rng a(7, 3), b(7, 3), c(7, 4);
    bool differs = false;
    for (int i = 0; i < 16; ++i) {
        const auto x = a(), y = b(), z = c();
        CHECK(x == y);
        differs |= (x != z);
    }
    CHECK(differs);
    Rng u(1, 0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform(), y = u.uniform_fine();
        CHECK((x > 0 && x < 1));
        CHECK((y > 0 && y < 1));
    }
}

TEST_CASE("GammaRatioLaw tails telescope")
{
    const GammaRatioLaw law(std::log(0.3), 0.25, 2.0, 256);
    double s = 0;
    for (std::int64_t m = 1; m < 400; ++m) s += law.pmf(m);
    CHECK(s == Approx(law.tail(1) - law.tail(400)).epsilon(1e-12));
    CHECK(law.tail(1000) == Approx(0.3 * std::exp(std::lgamma(1000.25) - std::lgamma(1001.0)) / 0.75).epsilon(1e-10));
    for (std::int64_t m : {1, 7, 255, 256, 257, 100000}) {
        CHECK(law.invert(law.tail(m)) == m);
        CHECK(law.invert(0.5 * (law.tail(m) + law.tail(m + 1))) == m);
    }
    Rng rng(5, 0);
    for (int i = 0; i < 1000; ++i) {
        const auto m = law.sample(rng, 10, 20);
        CHECK((m >= 10 && m <= 20));
    }
}

TEST_CASE("sample_nu follows nu")
{
    for (double a : {1.75, 2.25}) {
        const Sampler s(Model::special(a));
        Rng rng(11, 0);
        const int n = 200000;
        std::map<std::int64_t, double> hist;
        for (int i = 0; i < n; ++i) hist[s.sample_nu(rng)] += 1;
        CHECK(hist.count(0) == 0);
        std::vector<double> counts, probs;
        for (std::int64_t k = -6; k <= 6; ++k) {
            if (k == 0) continue;
            counts.push_back(hist[k]);
            probs.push_back(s.model().nu(k));
        }
        CHECK(chi2_pvalue(counts, probs, n) > 1e-4);
    }
}

TEST_CASE("infinite peeling kernel matches its masses")
{
    const Sampler s(Model::special(2.25));
    const std::int64_t l = 3;
    double total = 0;
    for (std::int64_t k = 1; k < 2000000; ++k) total += s.infinite_new_face_prob(l, k);
    for (std::int64_t j = 0; j <= l - 1; ++j) total += 2 * s.infinite_glue_prob(l, j);
    CHECK(total == Approx(1.0).epsilon(1e-3));  // positive-side tail beyond the sum is O(K^{1-a}/...)

    Rng rng(13, 0);
    const int n = 200000;
    std::map<std::pair<int, std::int64_t>, double> hist;
    for (int i = 0; i < n; ++i) {
        const PeelEvent ev = s.peel_step_infinite(rng, l);
        CHECK(ev.perimeter_change() + l >= 1);
        hist[{static_cast<int>(ev.kind), ev.size}] += 1;
    }
    std::vector<double> counts, probs;
    for (std::int64_t k = 1; k <= 6; ++k) {
        counts.push_back(hist[{static_cast<int>(PeelEvent::Kind::NewFace), k}]);
        probs.push_back(s.infinite_new_face_prob(l, k));
    }
    for (std::int64_t j = 0; j <= l - 1; ++j)
        for (auto kind : {PeelEvent::Kind::GlueLeft, PeelEvent::Kind::GlueRight}) {
            counts.push_back(hist[{static_cast<int>(kind), j}]);
            probs.push_back(s.infinite_glue_prob(l, j));
        }
    CHECK(chi2_pvalue(counts, probs, n) > 1e-4);
}

TEST_CASE("finite kernel is absorbed only from the boundary")
{
    const Sampler s(Model::special(2.25));
    Rng rng(17, 0);
    for (int i = 0; i < 10000; ++i) {
        const FiniteStep st = s.peel_step_finite(rng, 2);
        if (st.absorbed) CHECK(st.event.is_glue());
    }
    for (int i = 0; i < 10000; ++i) {
        const DiskStep d = s.disk_step(rng, 4);
        if (d.split) CHECK(d.left + d.right == 3);
        else CHECK(d.grow >= 0);
    }
}

TEST_CASE("positive stable laws")
{
    Rng rng(19, 0);
    const double index = 0.6, lambda = 0.7;
    const int n = 100000;
    double lt = 0;
    for (int i = 0; i < n; ++i) lt += std::exp(-lambda * sample_positive_stable(rng, index, 1.0));
    CHECK(lt / n == Approx(std::exp(-std::pow(lambda, index))).epsilon(0.01));

    double mean = 0;
    for (int i = 0; i < n; ++i) mean += sample_exponential(rng, 4.0);
    CHECK(mean / n == Approx(0.25).epsilon(0.02));
    CHECK_THROWS_AS(sample_exponential(rng, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sample_positive_stable(rng, 1.0, 1.0), std::invalid_argument);
}
