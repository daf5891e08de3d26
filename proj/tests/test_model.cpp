#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "peelmap/model.hpp"

using namespace peelmap;
using doctest::Approx;

TEST_CASE("constants of the a = 2.25 model")
{
    const Model m = Model::special(2.25);
    CHECK(m.kappa() == Approx(1.0 / 7.0).epsilon(1e-15));
    CHECK(m.nu(-1) == Approx(2.0 / 7.0).epsilon(1e-12));
    const DerivedConstants d = m.derived();
    REQUIRE(d.dim_a);
    REQUIRE(d.a_q);
    CHECK(*d.dim_a == Approx(7.0).epsilon(1e-14));
    CHECK(*d.a_q == Approx(2.0).epsilon(1e-12));
    CHECK(d.b_q == Approx(1.0 / std::tgamma(2.75)).epsilon(1e-14));
    CHECK(d.perimeter_exponent == Approx(0.8));
    CHECK(d.volume_exponent == Approx(1.4));
    CHECK_FALSE(d.e_dfpp);
}

TEST_CASE("dense constants")
{
    const Model m = Model::special(1.75);
    const DerivedConstants d = m.derived();
    REQUIRE(d.e_dfpp);
    CHECK(*d.e_dfpp == Approx(4.0 / std::numbers::pi).epsilon(1e-12));
    CHECK_FALSE(d.dim_a);
    CHECK(m.phase() == Phase::Dense);
}

TEST_CASE("out-of-range exponents are rejected")
{
    CHECK_THROWS_AS(Model::special(1.5), std::invalid_argument);
    CHECK_THROWS_AS(Model::special(2.0), std::invalid_argument);
    CHECK_THROWS_AS(Model::special(2.5), std::invalid_argument);
}

TEST_CASE("nu on the positive side is the rescaled weight sequence")
{
    for (double a : {1.6, 2.25}) {
        const Model m = Model::special(a);
        CHECK(m.weight(1) == 0.0);
        CHECK(m.nu(0) == 0.0);
        for (int k = 1; k <= 40; ++k)
            CHECK(m.nu(k) == Approx(m.weight(k + 1) * std::pow(m.kappa(), -k)).epsilon(1e-12));
    }
}

TEST_CASE("nu is a probability law with the stated closed forms")
{
    for (double a : {1.6, 1.75, 2.25, 2.4}) {
        const Model m = Model::special(a);
        CHECK(std::abs(m.nu_tail(1) + m.nu_tail_negative(1) - 1.0) < 1e-10);
        const double c = m.c();
        for (int k : {1, 2, 7, 100}) {
            CHECK(m.nu(k) == Approx(c * std::tgamma(k + 1.5 - a) / std::tgamma(k + 1.5)).epsilon(1e-12));
            CHECK(m.nu(-k) == Approx(c / std::cos(std::numbers::pi * a) * std::tgamma(k - 0.5) / std::tgamma(k + a - 0.5))
                                  .epsilon(1e-12));
        }
        // anchored recurrence against the direct evaluation
        for (std::int64_t k : {3, 65537, 1000003})
            CHECK(m.nu_recurrence(k) == Approx(m.nu(k)).epsilon(1e-10));
        double s = 0;
        for (int k = 5; k < 5000; ++k) s += m.nu(k);
        CHECK(s == Approx(m.nu_tail(5) - m.nu_tail(5000)).epsilon(1e-10));
    }
}

TEST_CASE("harmonic functions")
{
    CHECK(h_up(1) == Approx(1.0));
    CHECK(h_down(0) == Approx(1.0).epsilon(1e-15));
    CHECK(h_down(1) == Approx(0.5));
    CHECK(h_down(2) == Approx(0.375));
    CHECK(h_up(3) == Approx(6 * 20.0 / 64.0));
    // the lgamma difference loses about |lgamma(l)| * 1e-16 in absolute terms
    for (double l : {3.0, 1500.0, 1e6})
        CHECK(log_h_down(l) == Approx(std::lgamma(l + 0.5) - std::lgamma(l + 1.0) - 0.5 * std::log(std::numbers::pi))
                                   .epsilon(1e-9));
    CHECK(std::exp(log_h_down(40.0)) == Approx(h_down(40)).epsilon(1e-13));
    for (double a : {1.6, 1.75, 2.25, 2.4}) {
        const Model m = Model::special(a);
        CHECK(check_criticality(m, 64).max_residual < 1e-8);
        CHECK(check_down_harmonic(m, 64).max_residual < 1e-8);
    }
}

TEST_CASE("h_up harmonicity fails off criticality")
{
    const Model m = Model::special(2.25);
    CHECK(check_criticality(m, 16, 1.05).max_residual > 1e-4);
    CHECK(check_criticality(m, 16, 0.95).max_residual > 1e-4);
}

TEST_CASE("disk partition function")
{
    const Model m = Model::special(2.25);
    CHECK(m.disk_partition(0) == Approx(1.0));
    CHECK(m.disk_partition(1) == Approx(14.0 / 11.0).epsilon(1e-12));
    for (int l : {1, 5, 30})
        CHECK(m.disk_partition(l) == Approx(m.nu(-1 - l) * std::pow(m.kappa(), -1 - l) / 2).epsilon(1e-12));
    CHECK(std::exp(m.log_disk_partition(9)) == Approx(m.disk_partition(9)).epsilon(1e-12));
}

TEST_CASE("characteristic function against the Fourier sum of nu")
{
    for (double a : {1.75, 2.25}) {
        const Model m = Model::special(a);
        const double theta = 1.0;
        std::complex<double> s = 0;
        const int K = 2000000;
        for (int k = K; k >= 1; --k) s += m.nu(k) * std::polar(1.0, k * theta) + m.nu(-k) * std::polar(1.0, -k * theta);
        // truncation error is O(K^{1-a}) with oscillation, well below the tolerance
        CHECK(std::abs(m.char_fn(theta) - s) < 2e-4);
        CHECK(std::abs(1.0 - m.char_fn(theta) - m.one_minus_char_fn(theta)) < 1e-14);
        CHECK(std::abs(m.one_minus_char_fn(2 * std::numbers::pi - 0.3) - m.one_minus_char_fn_reflected(0.3)) < 1e-12);
    }
}
