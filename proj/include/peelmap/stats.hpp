#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace peelmap {

struct MeanSe {
    double mean = 0;
    double se = 0;
    std::int64_t n = 0;
};

MeanSe mean_se(const std::vector<double>& xs);

struct Quartiles {
    double q1 = 0;
    double median = 0;
    double q3 = 0;
    double iqr() const { return q3 - q1; }
};

// Linear interpolation between order statistics. Throws on empty input.
Quartiles quartiles(std::vector<double> xs);
double median(std::vector<double> xs);

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double slope_se = 0;
    std::int64_t points = 0;
};

// Ordinary least squares of y on x; needs at least 3 points and two distinct x.
LineFit ols(const std::vector<double>& x, const std::vector<double>& y);

enum class Transform {
    LogLog,   // log y against log x
    SemiLog,  // log y against x
};

// OLS on the transformed points whose x lies in [x_lo, x_hi]; at least 8 points are required.
LineFit fit_slope(const std::vector<std::pair<double, double>>& points, double x_lo, double x_hi, Transform transform);

struct SlopeSummary {
    Quartiles slopes;
    std::int64_t fitted = 0;   // replicas with enough points in the window
    std::int64_t skipped = 0;
};

// fit_slope per replica, summarized by median and interquartile range
SlopeSummary fit_slopes(const std::vector<std::vector<std::pair<double, double>>>& replicas, double x_lo, double x_hi,
                        Transform transform);

// upper tail of the chi-square law with `dof` degrees of freedom
double chi_square_pvalue(double statistic, double dof);

struct KsResult {
    double statistic = 0;  // sup |F_n - F|
    double pvalue = 0;
};

// one-sample Kolmogorov-Smirnov test against a continuous cdf
template <class Cdf>
KsResult ks_test(std::vector<double> xs, Cdf&& cdf);

// P(K > x) for the Kolmogorov distribution
double kolmogorov_survival(double x);

}  // namespace peelmap

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace peelmap {

template <class Cdf>
KsResult ks_test(std::vector<double> xs, Cdf&& cdf)
{
    if (xs.empty()) throw std::invalid_argument("ks_test: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    const double sn = std::sqrt(n);
    // Stephens' finite-sample correction
    return {d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)};
}

}  // namespace peelmap
