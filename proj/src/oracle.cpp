#include "peelmap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "peelmap/special.hpp"

namespace peelmap {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kTol = 1e-13;

// log(1 - z) without cancellation for small z
cplx log_one_minus(cplx z)
{
    const double x = z.real(), y = z.imag();
    return {0.5 * std::log1p(-2.0 * x + x * x + y * y), std::atan2(-y, 1.0 - x)};
}

// theta below which phi^n is negligible against its value at 0 is of order width(n)
double concentration_width(const Model& model, double n)
{
    const cplx z = model.one_minus_char_fn(1.0);
    const double rate = std::max(z.real(), 1e-3 * std::abs(z)) / std::pow(2.0 * std::sin(0.5), model.a() - 1.0);
    return std::min(0.5 * kPi, std::pow(40.0 / (std::max(n, 1.0) * rate), 1.0 / (model.a() - 1.0)));
}

struct Contour {
    cplx integral{};
    double error = 0;
    bool converged = true;

    void add(const Quadrature<cplx>& q)
    {
        integral += q.value;
        error += q.error;
        converged = converged && q.converged;
    }
};

// (1/2 pi) int_0^{2 pi} g(theta, 1 - phi(theta)) d theta; both halves are integrated independently
// so that the imaginary part of the result checks the branch conventions. Each half is split at
// `cut`, measured from the nearer end point 0 or 2 pi.
template <class G>
OracleValue contour_integral(const Model& model, G&& g, double cut, double singular_gamma = 0.0,
                             double singular_end = 0.0)
{
    Contour c;
    for (int half = 0; half < 2; ++half) {
        auto f = [&](double t) {
            return half == 0 ? g(t, model.one_minus_char_fn(t)) : g(2.0 * kPi - t, model.one_minus_char_fn_reflected(t));
        };
        double lo = 0.0;
        if (singular_gamma > 0.0) {
            c.add(integrate_power_singular<cplx>(f, singular_end, singular_gamma, kTol, kTol));
            lo = singular_end;
        }
        if (cut > lo && cut < kPi) {
            c.add(tanh_sinh<cplx>(f, lo, cut, kTol, kTol));
            lo = cut;
        }
        c.add(tanh_sinh<cplx>(f, lo, kPi, kTol, kTol));
    }
    OracleValue out;
    const cplx v = c.integral / (2.0 * kPi);
    out.value = v.real();
    out.imag = v.imag();
    out.error = c.error / (2.0 * kPi);
    out.converged = c.converged;
    return out;
}

// sum_{k>n} z^k / k = -log(1-z) - sum_{k<=n} z^k / k, given 1 - z
cplx series_tail(cplx omz, std::int64_t n)
{
    const cplx z = 1.0 - omz;
    cplx partial{}, power{1.0, 0.0};
    for (std::int64_t j = 1; j <= n; ++j) {
        power *= z;
        partial += power / static_cast<double>(j);
    }
    return -std::log(omz) - partial;
}

// |sum_{k>n} z^k| <= |z|^{n+1} / (1 - |z|) is below 1e-20
bool negligible_tail(cplx omz, std::int64_t n)
{
    const double log_abs_z = log_one_minus(omz).real();
    const double gap = -std::expm1(log_abs_z);
    return gap > 0.0 && (static_cast<double>(n) + 1.0) * log_abs_z - std::log(gap) < -46.0;
}

std::string fmt_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

cplx e_i(double theta) { return std::polar(1.0, theta); }

}  // namespace

OracleValue return_prob_quadrature(const Model& model, std::int64_t k)
{
    if (k < 1) throw std::invalid_argument("return_prob_quadrature: k must be >= 1");
    const double kd = static_cast<double>(k);
    auto g = [&](double theta, cplx omz) {
        const cplx log_phi = log_one_minus(omz);
        return std::exp(kd * log_phi) * e_i(theta);
    };
    return contour_integral(model, g, concentration_width(model, kd));
}

OracleValue return_prob_convolution(const Model& model, int k, std::int64_t window)
{
    if (k < 1) throw std::invalid_argument("return_prob_convolution: k must be >= 1");
    if (window < 8) throw std::invalid_argument("return_prob_convolution: window too small");
    auto run = [&](std::int64_t L) {
        // nu on [-2L, 2L], offset 2L
        std::vector<double> nu(static_cast<std::size_t>(4 * L + 1));
        for (std::int64_t x = -2 * L; x <= 2 * L; ++x) nu[x + 2 * L] = model.nu(x);
        if (k == 1) return nu[-1 + 2 * L];
        // f on [-L, L], offset L
        std::vector<double> f(static_cast<std::size_t>(2 * L + 1)), g(f.size());
        for (std::int64_t y = -L; y <= L; ++y) f[y + L] = nu[y + 2 * L];
        for (int step = 2; step < k; ++step) {
            for (std::int64_t y = -L; y <= L; ++y) {
                long double s = 0;
                for (std::int64_t z = -L; z <= L; ++z) s += f[z + L] * nu[y - z + 2 * L];
                g[y + L] = static_cast<double>(s);
            }
            std::swap(f, g);
        }
        long double s = 0;
        for (std::int64_t z = -L; z <= L; ++z) s += f[z + L] * nu[-1 - z + 2 * L];
        return static_cast<double>(s);
    };
    OracleValue out;
    out.value = run(window);
    out.error = std::abs(out.value - run(window / 2));
    out.converged = true;
    return out;
}

OracleValue exp_inv_P(const Model& model, std::int64_t n)
{
    if (n < 0) throw std::invalid_argument("exp_inv_P: n must be >= 0");
    // 2 sum_{k>n} z^k / k = 2 (-log(1-z) - sum_{k<=n} z^k/k) with z = phi(theta)
    auto g = [&](double theta, cplx omz) {
        if (negligible_tail(omz, n)) return cplx{};
        return 2.0 * series_tail(omz, n) * e_i(theta);
    };
    return contour_integral(model, g, concentration_width(model, static_cast<double>(n)));
}

OracleValue dfpp_tail(const Model& model, std::int64_t n)
{
    if (model.phase() != Phase::Dense) throw std::domain_error("dfpp_tail: the series diverges in the dilute phase");
    if (n < 0) throw std::invalid_argument("dfpp_tail: n must be >= 0");
    const double nd = static_cast<double>(n);
    // sum_{k>n} (1 - n/k) z^k = z^{n+1}/(1-z) - n sum_{k>n} z^k / k
    auto g = [&](double theta, cplx omz) {
        if (negligible_tail(omz, n)) return cplx{};
        const cplx rest = n > 0 ? nd * series_tail(omz, n) : cplx{};
        return (std::exp((nd + 1.0) * log_one_minus(omz)) / omz - rest) * e_i(theta);
    };
    // 1/(1 - phi) ~ theta^{1-a} at the end points
    const double singular_end = std::min(1e-3, 0.1 * std::pow(nd + 1.0, -1.0 / (model.a() - 1.0)));
    return contour_integral(model, g, concentration_width(model, nd), 2.0 - model.a(), singular_end);
}

DfppReference e_dfpp_closed(const Model& model)
{
    if (model.phase() != Phase::Dense) throw std::domain_error("e_dfpp_closed: d_fpp to infinity is infinite when a > 2");
    DfppReference r;
    r.closed = *model.derived().e_dfpp;
    const OracleValue q = dfpp_tail(model, 0);
    r.quadrature = q.value;
    r.difference = std::abs(r.closed - r.quadrature);
    if (!q.converged || r.difference > 1e-6)
        throw NumericalError("e_dfpp_closed: closed form and contour integral disagree by " + fmt_double(r.closed) + " vs " + fmt_double(r.quadrature) + ", difference " + fmt_double(r.difference) + (q.converged ? "" : " (not converged)"));
    return r;
}

TutteTable tutte_enumerate(const Model& model, int l_max, int n_max)
{
    if (l_max < 0 || n_max < 1) throw std::invalid_argument("tutte_enumerate: need l_max >= 0 and n_max >= 1");
    if (l_max > 8 || n_max > 12) throw std::invalid_argument("tutte_enumerate: bounds limited to l_max <= 8, n_max <= 12");
    // a disk of half-perimeter l has at least l+1 vertices, so l < n_max suffices internally
    const int L = std::max(l_max, n_max - 1);
    std::vector<std::vector<double>> w(L + 1, std::vector<double>(n_max + 1, 0.0));
    std::vector<double> q(n_max + 2, 0.0);
    for (int k = 1; k <= n_max + 1; ++k) q[k] = model.weight(k);
    w[0][1] = 1.0;
    for (int n = 2; n <= n_max; ++n) {
        for (int l = std::min(L, n - 1); l >= 1; --l) {
            double s = 0.0;
            for (int k = 2; l + k - 1 <= std::min(L, n - 1); ++k) s += q[k] * w[l + k - 1][n];
            for (int l1 = 0; l1 <= l - 1; ++l1) {
                const int l2 = l - 1 - l1;
                for (int n1 = l1 + 1; n - n1 >= l2 + 1; ++n1) s += w[l1][n1] * w[l2][n - n1];
            }
            w[l][n] = s;
        }
    }
    TutteTable t;
    t.l_max = l_max;
    t.n_max = n_max;
    for (int l = 0; l <= l_max; ++l) {
        t.w.push_back(w[l]);
        double p = 0.0;
        for (double x : w[l]) p += x;
        t.partial.push_back(p);
        t.total.push_back(model.disk_partition(l));
        t.remainder.push_back(t.total.back() - p);
        if (t.remainder.back() < -1e-12 * t.total.back())
            throw NumericalError("tutte_enumerate: truncated weights exceed the closed form at l = " + std::to_string(l));
    }
    return t;
}

}  // namespace peelmap
