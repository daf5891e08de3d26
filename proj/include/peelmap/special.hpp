#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace peelmap {

// Raised when a numerical routine cannot certify its own accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// log(Gamma(x) / Gamma(y)) for x, y > 0, accurate for arguments up to ~1e300.
double log_gamma_ratio(double x, double y);
// log(Gamma(z + alpha) / Gamma(z + beta)); keeps the offset alpha - beta exact for huge z.
double log_gamma_ratio_shift(double z, double alpha, double beta);

template <class Scalar>
struct Quadrature {
    Scalar value{};
    double error = 0.0;
    std::size_t evaluations = 0;
    int level = 0;
    bool converged = false;
};

// Tanh-sinh rule on [lo, hi]. The integrand is never evaluated at the endpoints,
// and abscissae close to `lo` are resolved to full relative precision.
// Levels halve the step until two successive sums agree within the tolerance.
template <class Scalar, class F>
Quadrature<Scalar> tanh_sinh(F&& f, double lo, double hi, double abs_tol,
                             double rel_tol = 1e-14, int max_level = 18)
{
    constexpr double t_max = 4.8;
    const double len = hi - lo;
    Quadrature<Scalar> out;

    auto node_sum = [&](double t) -> Scalar {
        const double s = 0.5 * std::numbers::pi * std::sinh(t);
        // sigma = 1/(1+e^{-2s}), written to keep both sigma and 1-sigma accurate
        double sig, comp;
        if (s < 0) {
            const double e = std::exp(2.0 * s);
            sig = e / (1.0 + e);
            comp = 1.0 / (1.0 + e);
        } else {
            const double e = std::exp(-2.0 * s);
            sig = 1.0 / (1.0 + e);
            comp = e / (1.0 + e);
        }
        const double w = len * std::numbers::pi * std::cosh(t) * sig * comp;
        if (w == 0.0 || sig * len == 0.0 || comp * len == 0.0) return Scalar{};
        const double x = (s < 0) ? lo + len * sig : hi - len * comp;
        ++out.evaluations;
        return w * f(x);
    };

    double h = 1.0;
    Scalar sum = node_sum(0.0);
    for (int k = 1; k * h <= t_max; ++k) sum += node_sum(k * h) + node_sum(-k * h);
    Scalar prev = sum * h;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        for (int k = 1; k * h <= t_max; k += 2) sum += node_sum(k * h) + node_sum(-k * h);
        const Scalar cur = sum * h;
        const double diff = std::abs(cur - prev);
        out.value = cur;
        out.error = diff;
        out.level = level;
        if (level >= 4 && diff <= std::max(abs_tol, rel_tol * std::abs(cur))) {
            out.converged = true;
            return out;
        }
        prev = cur;
    }
    return out;
}

// Integral over [0, hi] of f with an integrable power singularity f(x) ~ x^(gamma-1)
// at 0. The substitution x = hi * v^(1/gamma) flattens the leading behaviour.
template <class Scalar, class F>
Quadrature<Scalar> integrate_power_singular(F&& f, double hi, double gamma, double abs_tol,
                                            double rel_tol = 1e-14, int max_level = 18)
{
    const double inv = 1.0 / gamma;
    const double log_hi = std::log(hi);
    // below this v the abscissa underflows; the flattened integrand is constant there
    const double log_v_min = gamma * (-690.0 - log_hi);
    auto g = [&](double v) -> Scalar {
        const double lv = std::max(std::log(v), log_v_min);
        const double x = std::exp(log_hi + inv * lv);
        const double jac = std::exp(log_hi - std::log(gamma) + (inv - 1.0) * lv);
        return jac * f(x);
    };
    return tanh_sinh<Scalar>(g, 0.0, 1.0, abs_tol, rel_tol, max_level);
}

// Sum_{k >= k0} f(k) for a smooth summand with f(x) ~ A x^(-p), p > 1, given as log f.
// Integral part by quadrature after x = k0 u^(-1/(p-1)); Euler-Maclaurin corrections.
template <class LogF>
double power_tail_sum(LogF&& log_f, double k0, double p)
{
    if (!(p > 1.0) || !(k0 >= 8.0)) throw std::invalid_argument("power_tail_sum: need p > 1 and k0 >= 8");
    const double s = p - 1.0;
    const double log_k0 = std::log(k0);
    const double log_u_min = -s * (650.0 - log_k0);
    auto integrand = [&](double u) {
        const double lu = std::max(std::log(u), log_u_min);
        const double log_x = log_k0 - lu / s;
        return std::exp(log_f(std::exp(log_x)) + log_k0 - std::log(s) - (1.0 / s + 1.0) * lu);
    };
    const auto q = tanh_sinh<double>(integrand, 0.0, 1.0, 0.0, 1e-15, 14);
    if (!q.converged && q.error > 1e-12 * std::abs(q.value))
        throw NumericalError("power_tail_sum: quadrature did not converge");
    const double f0 = std::exp(log_f(k0));
    const double dlog = (log_f(k0 + 0.5) - log_f(k0 - 0.5));
    const double d1 = f0 * dlog;
    const double d3 = -p * (p + 1.0) * (p + 2.0) * f0 / (k0 * k0 * k0);
    return q.value + 0.5 * f0 - d1 / 12.0 + d3 / 720.0;
}

}  // namespace peelmap
