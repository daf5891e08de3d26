#include "peelmap/stats.hpp"

#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

namespace peelmap {

MeanSe mean_se(const std::vector<double>& xs)
{
    MeanSe r;
    r.n = static_cast<std::int64_t>(xs.size());
    if (xs.empty()) return r;
    double sum = 0;
    for (double x : xs) sum += x;
    r.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return r;
    double ss = 0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    return r;
}

namespace {

double quantile_sorted(const std::vector<double>& s, double q)
{
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= s.size()) return s.back();
    return s[i] + frac * (s[i + 1] - s[i]);
}

}  // namespace

Quartiles quartiles(std::vector<double> xs)
{
    if (xs.empty()) throw std::invalid_argument("quartiles: empty input");
    std::sort(xs.begin(), xs.end());
    return {quantile_sorted(xs, 0.25), quantile_sorted(xs, 0.5), quantile_sorted(xs, 0.75)};
}

double median(std::vector<double> xs) { return quartiles(std::move(xs)).median; }

LineFit ols(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("ols: need at least 3 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("ols: x values are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.points = static_cast<std::int64_t>(x.size());
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - f.intercept - f.slope * x[i];
        rss += e * e;
    }
    f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
    return f;
}

LineFit fit_slope(const std::vector<std::pair<double, double>>& points, double x_lo, double x_hi, Transform transform)
{
    std::vector<double> xs, ys;
    for (const auto& [x, y] : points) {
        if (x < x_lo || x > x_hi) continue;
        if (!(y > 0.0) || (transform == Transform::LogLog && !(x > 0.0)))
            throw std::invalid_argument("fit_slope: logarithm of a nonpositive value");
        xs.push_back(transform == Transform::LogLog ? std::log(x) : x);
        ys.push_back(std::log(y));
    }
    if (xs.size() < 8) throw std::invalid_argument("fit_slope: fewer than 8 points in the window");
    return ols(xs, ys);
}

SlopeSummary fit_slopes(const std::vector<std::vector<std::pair<double, double>>>& replicas, double x_lo, double x_hi,
                        Transform transform)
{
    SlopeSummary s;
    std::vector<double> slopes;
    for (const auto& pts : replicas) {
        std::int64_t inside = 0;
        for (const auto& p : pts) inside += (p.first >= x_lo && p.first <= x_hi);
        if (inside < 8) {
            ++s.skipped;
            continue;
        }
        slopes.push_back(fit_slope(pts, x_lo, x_hi, transform).slope);
    }
    s.fitted = static_cast<std::int64_t>(slopes.size());
    if (!slopes.empty()) s.slopes = quartiles(slopes);
    return s;
}

double chi_square_pvalue(double statistic, double dof)
{
    if (!(dof > 0.0)) throw std::invalid_argument("chi_square_pvalue: dof must be positive");
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

double kolmogorov_survival(double x)
{
    if (x <= 0.0) return 1.0;
    if (x < 1.0) {
        // theta-function form, accurate for small x
        const double t = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * x * x));
        double s = 0.0;
        for (int k = 1; k <= 9; k += 2) s += std::pow(t, k * k);
        return 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s;
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

}  // namespace peelmap
