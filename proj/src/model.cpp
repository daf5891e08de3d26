#include "peelmap/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "peelmap/special.hpp"

namespace peelmap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::int64_t kAnchorSpacing = std::int64_t{1} << 16;

}  // namespace

std::string to_string(Phase phase) { return phase == Phase::Dilute ? "dilute" : "dense"; }

Model Model::special(double a)
{
    if (!(a > 1.5 && a < 2.5)) throw std::invalid_argument("exponent a must lie in (3/2, 5/2), got " + std::to_string(a));
    if (a == 2.0) throw std::invalid_argument("a = 2 is the critical case between the phases and is not supported");
    return Model(a);
}

Model::Model(double a) : a_(a)
{
    kappa_ = 1.0 / (4.0 * a - 2.0);
    // c = -sqrt(pi) / (2 Gamma(3/2 - a)) = sqrt(pi) (a - 3/2) / (2 Gamma(5/2 - a))
    log_c_ = 0.5 * std::log(kPi) + std::log(a - 1.5) - std::log(2.0) - std::lgamma(2.5 - a);
    c_ = std::exp(log_c_);
    log_c_neg_ = log_c_ - std::log(std::cos(kPi * a));
    // equals sum_k nu(k) (1 - e^{ik theta}) term by term; the prefactor is sqrt(pi)/2, not pi/2
    phi_scale_ = 0.5 * std::sqrt(kPi) * std::exp(log_gamma_ratio(a - 0.5, a));
}

double Model::weight(std::int64_t k) const
{
    if (k < 1) throw std::invalid_argument("weight: k must be >= 1");
    if (k == 1) return 0.0;
    const double kd = static_cast<double>(k);
    return std::exp(log_c_ + (kd - 1.0) * std::log(kappa_) + log_gamma_ratio_shift(kd, 0.5 - a_, 0.5));
}

double Model::log_nu_positive(double x) const { return log_c_ + log_gamma_ratio_shift(x, 1.5 - a_, 1.5); }

double Model::log_nu_negative(double m) const { return log_c_neg_ + log_gamma_ratio_shift(m, -0.5, a_ - 0.5); }

double Model::log_nu(std::int64_t k) const
{
    if (k == 0) return -std::numeric_limits<double>::infinity();
    return k > 0 ? log_nu_positive(static_cast<double>(k)) : log_nu_negative(-static_cast<double>(k));
}

double Model::nu(std::int64_t k) const { return k == 0 ? 0.0 : std::exp(log_nu(k)); }

double Model::nu_recurrence(std::int64_t k) const
{
    if (k == 0) return 0.0;
    const std::int64_t sign = k > 0 ? 1 : -1;
    const std::int64_t m = k * sign;
    std::int64_t anchor = ((m + kAnchorSpacing / 2) / kAnchorSpacing) * kAnchorSpacing;
    if (anchor == 0) anchor = 1;
    long double v = nu(sign * anchor);
    // nu(k+1)/nu(k) = (3/2-a+k)/(3/2+k) on each side of the origin
    for (std::int64_t j = anchor; j < m; ++j) {
        const long double kk = static_cast<long double>(sign * j);
        v *= sign > 0 ? (1.5L - a_ + kk) / (1.5L + kk) : (0.5L + kk) / (0.5L - a_ + kk);
    }
    for (std::int64_t j = anchor; j > m; --j) {
        const long double kk = static_cast<long double>(sign * j);
        v *= sign > 0 ? (0.5L + kk) / (0.5L - a_ + kk) : (1.5L - a_ + kk) / (1.5L + kk);
    }
    return static_cast<double>(v);
}

double Model::nu_tail(double k) const
{
    if (k < 1) throw std::invalid_argument("nu_tail: k must be >= 1");
    return std::exp(log_c_ - std::log(a_ - 1.0) + log_gamma_ratio_shift(k, 1.5 - a_, 0.5));
}

double Model::nu_tail_negative(double k) const
{
    if (k < 1) throw std::invalid_argument("nu_tail_negative: k must be >= 1");
    return std::exp(log_c_neg_ - std::log(a_ - 1.0) + log_gamma_ratio_shift(k, -0.5, a_ - 1.5));
}

double Model::log_disk_partition(std::int64_t l) const
{
    if (l < 0) throw std::invalid_argument("disk_partition: l must be >= 0");
    const double ld = static_cast<double>(l);
    return log_nu_negative(ld + 1.0) - (ld + 1.0) * std::log(kappa_) - std::log(2.0);
}

double Model::disk_partition(std::int64_t l) const { return std::exp(log_disk_partition(l)); }

std::complex<double> Model::one_minus_char_fn(double theta) const
{
    // 1 - e^{i theta} = 2 sin(theta/2) e^{i(theta/2 - pi/2)} on (0, 2 pi), so the product of
    // principal powers collapses to a single modulus and phase.
    const double s = 2.0 * std::sin(0.5 * theta);
    if (s <= 0.0) return {0.0, 0.0};
    const double modulus = phi_scale_ * std::pow(s, a_ - 1.0);
    const double arg = (a_ - 2.0) * (0.5 * theta - 0.5 * kPi);
    return std::polar(modulus, arg);
}

std::complex<double> Model::one_minus_char_fn_reflected(double t) const
{
    // theta = 2 pi - t: 2 sin(theta/2) = 2 sin(t/2) and theta/2 - pi/2 = pi/2 - t/2
    const double s = 2.0 * std::sin(0.5 * t);
    if (s <= 0.0) return {0.0, 0.0};
    return std::polar(phi_scale_ * std::pow(s, a_ - 1.0), (a_ - 2.0) * (0.5 * kPi - 0.5 * t));
}

std::complex<double> Model::char_fn(double theta) const { return 1.0 - one_minus_char_fn(theta); }

DerivedConstants Model::derived() const
{
    DerivedConstants d;
    d.p_q = std::pow(c_, 1.0 / (a_ - 1.0));
    d.b_q = std::exp(-std::lgamma(a_ + 0.5));
    d.b_q_faces = (1.0 / (4.0 * kappa_) - 1.0) * d.b_q;
    d.v_q = d.b_q * std::pow(d.p_q, a_ - 0.5);
    d.perimeter_exponent = 1.0 / (a_ - 1.0);
    d.volume_exponent = (a_ - 0.5) / (a_ - 1.0);
    if (phase() == Phase::Dilute) {
        d.dim_a = (a_ - 0.5) / (a_ - 2.0);
        d.a_q = 1.0 + 1.0 / (4.0 * (a_ - 2.0));
        d.h_q = *d.a_q / (2.0 * d.p_q);
    } else {
        d.e_dfpp = std::cos(kPi * a_) / std::sin(kPi * a_) / kPi * (a_ - 1.0) / ((a_ - 2.5) * (a_ - 1.5));
    }
    return d;
}

double log_h_down(double l)
{
    if (l >= 1024.0) {
        // log Gamma(l+1/2) - log Gamma(l+1) + (1/2) log l, error below 1e-23 here
        const double r = 1.0 / l;
        const double r2 = r * r;
        return -0.5 * std::log(kPi * l) + r * (-1.0 / 8.0 + r2 * (1.0 / 192.0 - r2 / 640.0));
    }
    return log_gamma_ratio_shift(l, 0.5, 1.0) - 0.5 * std::log(kPi);
}

double h_down(std::int64_t l) { return l < 0 ? 0.0 : std::exp(log_h_down(static_cast<double>(l))); }

double h_up(std::int64_t l) { return l <= 0 ? 0.0 : 2.0 * static_cast<double>(l) * h_down(l); }

namespace {

constexpr std::int64_t kWindow = 4096;

// sum_{k >= 1} f(k) with f known in log form for real arguments and decaying like k^{-p}
template <class LogF>
double positive_series(LogF&& log_f, double p)
{
    double s = 0.0;
    for (std::int64_t k = kWindow - 1; k >= 1; --k) s += std::exp(log_f(static_cast<double>(k)));
    return s + power_tail_sum(log_f, static_cast<double>(kWindow), p);
}

}  // namespace

double up_positive_mass(const Model& model, std::int64_t l)
{
    if (l < 1) throw std::invalid_argument("up_positive_mass: l must be >= 1");
    const double ld = static_cast<double>(l);
    auto log_term = [&](double k) { return model.log_nu_positive(k) + log_h_down(ld + k) + std::log((ld + k) / ld); };
    return positive_series(log_term, model.a() - 0.5) * std::exp(-log_h_down(ld));
}

CriticalityReport check_criticality(const Model& model, int l_max, double positive_scale)
{
    if (l_max < 1) throw std::invalid_argument("check_criticality: l_max must be >= 1");
    const double a = model.a();
    const double z = positive_scale * model.nu_tail(1) + model.nu_tail_negative(1);
    CriticalityReport rep;
    for (int l = 1; l <= l_max; ++l) {
        const double ld = l;
        // h_up(l+k) for real k: 2 (l+k) Gamma(l+k+1/2) / (sqrt(pi) Gamma(l+k+1))
        auto log_term = [&](double k) {
            return model.log_nu_positive(k) + std::log(2.0 * (ld + k)) + log_h_down(ld + k);
        };
        double pos = positive_series(log_term, a - 0.5);
        double neg = 0.0;
        for (int k = -1; k > -l; --k) neg += model.nu(k) * h_up(l + k);
        const double lhs = (positive_scale * pos + neg) / z;
        const double r = std::abs(lhs - h_up(l)) / h_up(l);
        rep.residuals.push_back(r);
        rep.max_residual = std::max(rep.max_residual, r);
    }
    return rep;
}

CriticalityReport check_down_harmonic(const Model& model, int l_max)
{
    if (l_max < 1) throw std::invalid_argument("check_down_harmonic: l_max must be >= 1");
    CriticalityReport rep;
    for (int l = 1; l <= l_max; ++l) {
        const double ld = l;
        auto log_term = [&](double k) { return model.log_nu_positive(k) + log_h_down(ld + k); };
        double s = positive_series(log_term, model.a() + 0.5);
        for (int k = -1; k >= -l; --k) s += model.nu(k) * h_down(l + k);
        const double r = std::abs(s - h_down(l)) / h_down(l);
        rep.residuals.push_back(r);
        rep.max_residual = std::max(rep.max_residual, r);
    }
    return rep;
}

}  // namespace peelmap
