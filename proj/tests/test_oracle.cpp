#include <doctest.h>

#include <cmath>
#include <numbers>

#include "peelmap/oracle.hpp"

using namespace peelmap;
using doctest::Approx;

// Reference values computed independently by direct convolution of nu in extended precision.
TEST_CASE("return probabilities")
{
    CHECK(return_prob_quadrature(Model::special(2.25), 2).value == Approx(0.054634163475358).epsilon(1e-10));
    CHECK(return_prob_quadrature(Model::special(1.6), 2).value == Approx(0.018727724033265).epsilon(1e-10));
    for (double a : {1.6, 2.25}) {
        const Model m = Model::special(a);
        CHECK(return_prob_quadrature(m, 1).value == Approx(m.nu(-1)).epsilon(1e-10));
        for (int k : {2, 3, 5, 8}) {
            const auto q = return_prob_quadrature(m, k);
            const auto c = return_prob_convolution(m, k);
            CHECK(q.converged);
            CHECK(std::abs(q.imag) < 1e-12);
            CHECK(q.value == Approx(c.value).epsilon(1e-6));
        }
    }
}

TEST_CASE("inverse perimeter")
{
    struct Row { double a; std::int64_t n; double value; };
    const Row rows[] = {
        {1.6, 4, 0.024557010741},   {1.75, 4, 0.074470280083},  {2.25, 4, 0.244792209229},  {2.4, 4, 0.288133634089},
        {1.6, 16, 0.002832090389},  {1.75, 16, 0.013670499331}, {2.25, 16, 0.093189301085}, {2.4, 16, 0.122703524265},
        {1.75, 64, 0.002257819531}, {2.25, 64, 0.032298881015},
    };
    for (const Row& r : rows) {
        const auto v = exp_inv_P(Model::special(r.a), r.n);
        CHECK(v.converged);
        CHECK(v.value == Approx(r.value).epsilon(1e-9));
    }
    for (double a : {1.6, 1.75, 2.25, 2.4}) {
        const Model m = Model::special(a);
        CHECK(exp_inv_P(m, 0).value == Approx(1.0).epsilon(1e-9));
        CHECK(exp_inv_P(m, 1).value == Approx((2 * a - 3) / (2 * a - 1)).epsilon(1e-9));
    }
}

TEST_CASE("dfpp closed form")
{
    CHECK(e_dfpp_closed(Model::special(1.75)).closed == Approx(4.0 / std::numbers::pi).epsilon(1e-12));
    CHECK(e_dfpp_closed(Model::special(1.6)).closed == Approx(0.689501010178).epsilon(1e-10));
    double prev = 0;
    for (double a : {1.9, 1.95, 1.99}) {
        const auto r = e_dfpp_closed(Model::special(a));
        CHECK(std::abs(r.difference) < 1e-6);
        CHECK(r.closed > prev);
        prev = r.closed;
    }
    const Model m = Model::special(1.75);
    CHECK(dfpp_tail(m, 0).value == Approx(4.0 / std::numbers::pi).epsilon(1e-6));
    CHECK(dfpp_tail(m, 100).value < dfpp_tail(m, 10).value);
    CHECK_THROWS_AS(e_dfpp_closed(Model::special(2.25)), std::domain_error);
    CHECK_THROWS_AS(dfpp_tail(Model::special(2.25), 1), std::domain_error);
}

TEST_CASE("Tutte enumeration")
{
    const Model m = Model::special(2.25);
    const TutteTable t = tutte_enumerate(m, 2, 8);
    CHECK(t.w[1][0] == 0.0);
    CHECK(t.w[1][1] == 0.0);
    CHECK(t.w[1][2] == Approx(1.0));
    CHECK(t.w[1][3] == Approx(1.0 / 7.0));
    CHECK(t.total[1] == Approx(m.disk_partition(1)).epsilon(1e-12));
    for (int l = 0; l <= 2; ++l) CHECK(t.remainder[l] >= 0);
    double s = 0;
    for (int n = 0; n <= 8; ++n) s += t.law(1, n);
    CHECK(s < 1.0);
    CHECK_THROWS_AS(tutte_enumerate(m, 9, 8), std::invalid_argument);
}
