#include "peelmap/special.hpp"

namespace peelmap {

namespace {

constexpr double kShift = 16.0;

// Stirling series of log Gamma(z) - [(z-1/2) log z - z + log(2 pi)/2], z >= 16.
double stirling_tail(double z)
{
    const double r = 1.0 / z;
    const double r2 = r * r;
    return r * (1.0 / 12.0 +
                r2 * (-1.0 / 360.0 +
                      r2 * (1.0 / 1260.0 +
                            r2 * (-1.0 / 1680.0 +
                                  r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0 + r2 * (1.0 / 156.0)))))));
}

// Log of the rising product x (x+1) ... up to the first factor >= kShift; counts the factors.
double shift_up(double& x, int& count)
{
    double prod = 1.0;
    double acc = 0.0;
    while (x < kShift) {
        prod *= x;
        x += 1.0;
        ++count;
        if (prod > 1e280 || prod < 1e-280) {
            acc += std::log(prod);
            prod = 1.0;
        }
    }
    return acc + std::log(prod);
}

}  // namespace

double log_gamma_ratio_shift(double z, double alpha, double beta)
{
    double x = z + alpha;
    double y = z + beta;
    if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("log_gamma_ratio: arguments must be positive");
    if (alpha == beta) return 0.0;
    // Gamma(x) = Gamma(x + n) / (x (x+1) ... (x+n-1))
    int nx = 0, ny = 0;
    const double acc0 = -shift_up(x, nx) + shift_up(y, ny);
    double acc = acc0;
    // the offset is rebuilt from alpha - beta so that it survives when z dwarfs it
    const double d = (alpha - beta) + static_cast<double>(nx - ny);
    acc += (x - 0.5) * std::log1p(d / y) + d * std::log(y) - d;
    acc += stirling_tail(x) - stirling_tail(y);
    return acc;
}

double log_gamma_ratio(double x, double y) { return log_gamma_ratio_shift(0.0, x, y); }

}  // namespace peelmap
