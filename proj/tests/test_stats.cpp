#include <doctest.h>

#include <cmath>
#include <random>

#include "peelmap/stats.hpp"

using namespace peelmap;
using doctest::Approx;

TEST_CASE("slopes of exact laws")
{
    std::vector<std::pair<double, double>> pw, ex;
    for (int i = 1; i <= 16; ++i) {
        pw.emplace_back(i, std::pow(i, 7.0));
        ex.emplace_back(i, std::exp(0.3 * i));
    }
    const LineFit f = fit_slope(pw, 1, 16, Transform::LogLog);
    CHECK(std::abs(f.slope - 7.0) < 1e-12);
    CHECK(f.points == 16);
    CHECK(std::abs(fit_slope(ex, 1, 16, Transform::SemiLog).slope - 0.3) < 1e-12);
    CHECK_THROWS_AS(fit_slope(pw, 1, 7, Transform::LogLog), std::invalid_argument);
}

TEST_CASE("noisy slopes summarized across replicas")
{
    std::mt19937_64 gen(3);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<std::vector<std::pair<double, double>>> reps(50);
    for (auto& r : reps)
        for (int i = 1; i <= 64; ++i) r.emplace_back(i, std::pow(i, 4.0) * std::exp(noise(gen)));
    const SlopeSummary s = fit_slopes(reps, 4, 64, Transform::LogLog);
    CHECK(s.fitted == 50);
    CHECK(s.slopes.median == Approx(4.0).epsilon(0.01));
    CHECK(s.slopes.q1 <= s.slopes.median);
}

TEST_CASE("summaries")
{
    const MeanSe m = mean_se({1, 2, 3, 4});
    CHECK(m.mean == 2.5);
    CHECK(m.se == Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    const Quartiles q = quartiles({4, 1, 3, 2, 5});
    CHECK(q.median == 3);
    CHECK(q.q1 == 2);
    CHECK(q.q3 == 4);
    CHECK_THROWS(median({}));
}

TEST_CASE("test statistics")
{
    for (double x : {0.5, 2.0, 9.0}) CHECK(chi_square_pvalue(x, 2) == Approx(std::exp(-x / 2)).epsilon(1e-12));
    CHECK(kolmogorov_survival(1.3581) == Approx(0.05).epsilon(1e-3));
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> xs(5000);
    for (double& x : xs) x = u(gen);
    CHECK(ks_test(xs, [](double x) { return x; }).pvalue > 1e-3);
    for (double& x : xs) x = x * x;
    CHECK(ks_test(xs, [](double x) { return x; }).pvalue < 1e-6);
}
