#pragma once

#include <cstdint>
#include <vector>

#include "peelmap/model.hpp"

namespace peelmap {

// A numerically evaluated quantity with its own quality report.
struct OracleValue {
    double value = 0;
    double imag = 0;   // imaginary part left over by a contour integral; should vanish
    double error = 0;  // estimated absolute error
    bool converged = false;
};

// P_1(W_k = 0) = P_0(W_k = -1) = (1/2 pi) int_0^{2 pi} phi(theta)^k e^{i theta} d theta
OracleValue return_prob_quadrature(const Model& model, std::int64_t k);

// The same by k-fold convolution of nu on [-window, window]; the error is the change from
// halving the window.
OracleValue return_prob_convolution(const Model& model, int k, std::int64_t window = 4096);

// E[1/P_n] = 2 sum_{k > n} P_1(W_k = 0) / k, summed in closed form under the integral
OracleValue exp_inv_P(const Model& model, std::int64_t n);

// sum_{i >= n} E[1/(2 P_i)] = sum_{k > n} (1 - n/k) P_1(W_k = 0); dense phase only.
// At n = 0 this is E[N_0] = E[d_fpp(f_r, infinity)].
OracleValue dfpp_tail(const Model& model, std::int64_t n);

struct DfppReference {
    double closed = 0;      // cot(pi a)/pi (a-1)/((a-5/2)(a-3/2))
    double quadrature = 0;  // (1/2 pi) int e^{i theta} / (1 - phi(theta)) d theta
    double difference = 0;
};

// Throws std::domain_error in the dilute phase and NumericalError when the two forms
// disagree by more than 1e-6.
DfppReference e_dfpp_closed(const Model& model);

// Vertex-resolved disk weights W^(l)_n from the one-edge peeling recursion
//   w^(l) = sum_k q_k w^(l+k-1) + sum_{l1+l2=l-1} w^(l1) w^(l2),  w^(0) = g,
// truncated at degree n_max in g.
struct TutteTable {
    int l_max = 0;
    int n_max = 0;
    std::vector<std::vector<double>> w;  // w[l][n], 0 <= l <= l_max, 0 <= n <= n_max
    std::vector<double> partial;         // sum_{n <= n_max} w[l][n]
    std::vector<double> total;           // W^(l) from the closed form
    std::vector<double> remainder;       // total - partial, mass of volumes above n_max

    // P(|B^(l)| = n)
    double law(int l, int n) const { return w[l][n] / total[l]; }
};

TutteTable tutte_enumerate(const Model& model, int l_max, int n_max);

}  // namespace peelmap
