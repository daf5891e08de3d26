#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace peelmap {

enum class Phase { Dilute, Dense };

std::string to_string(Phase phase);

struct DerivedConstants {
    double p_q = 0;        // perimeter scale
    double b_q = 0;        // volume prefactor of a Boltzmann disk (vertices)
    double b_q_faces = 0;  // same prefactor when counting faces
    double v_q = 0;        // volume scale
    double perimeter_exponent = 0;  // 1/(a-1) along the peeling
    double volume_exponent = 0;     // (a-1/2)/(a-1) along the peeling
    std::optional<double> dim_a;    // dilute only
    std::optional<double> a_q;      // dilute only
    std::optional<double> h_q;      // dilute only
    std::optional<double> e_dfpp;   // dense only
};

// One critical weight sequence from the explicit family indexed by a.
class Model {
public:
    // a in (3/2, 5/2) with a != 2.
    static Model special(double a);

    double a() const { return a_; }
    double c() const { return c_; }
    double kappa() const { return kappa_; }
    Phase phase() const { return a_ > 2.0 ? Phase::Dilute : Phase::Dense; }

    // face weight q_k, k >= 1
    double weight(std::int64_t k) const;

    double nu(std::int64_t k) const;
    double log_nu(std::int64_t k) const;  // -inf at k = 0
    // log nu extended to real arguments: x >= 1 on the positive side, -x on the negative side
    double log_nu_positive(double x) const;
    double log_nu_negative(double m) const;
    // nu by the ratio recurrence from the nearest anchor (anchors every 2^16 indices)
    double nu_recurrence(std::int64_t k) const;

    // sum_{j >= k} nu(j) and sum_{j <= -k} nu(j), k >= 1, also for real k >= 1
    double nu_tail(double k) const;
    double nu_tail_negative(double k) const;

    double disk_partition(std::int64_t l) const;
    double log_disk_partition(std::int64_t l) const;

    // phi(theta) and 1 - phi(theta); the latter without cancellation near theta = 0
    std::complex<double> char_fn(double theta) const;
    std::complex<double> one_minus_char_fn(double theta) const;
    // 1 - phi(2 pi - t), accurate for small t
    std::complex<double> one_minus_char_fn_reflected(double t) const;

    DerivedConstants derived() const;

private:
    explicit Model(double a);

    double a_, c_, kappa_;
    double log_c_, log_c_neg_;  // log c and log(c / cos(pi a))
    double phi_scale_;          // (sqrt(pi)/2) Gamma(a-1/2)/Gamma(a)
};

double h_up(std::int64_t l);
double h_down(std::int64_t l);
double log_h_down(double l);  // log of the real extension Gamma(l+1/2)/(sqrt(pi) Gamma(l+1)), l > -1/2

// sum_{k >= 1} nu(k) h_up(l+k) / h_up(l): total new-face mass of the peeling kernel at l
double up_positive_mass(const Model& model, std::int64_t l);

struct CriticalityReport {
    std::vector<double> residuals;  // index l-1 holds the relative residual at l
    double max_residual = 0;
};

// Relative residuals of sum_k h_up(l+k) nu'(k) = h_up(l) for l = 1..l_max, where nu' is nu with
// its positive side scaled by `positive_scale` and renormalized (1 gives nu itself).
CriticalityReport check_criticality(const Model& model, int l_max, double positive_scale = 1.0);

// Same for h_down: relative residuals of sum_{k >= -l} nu(k) h_down(l+k) = h_down(l).
CriticalityReport check_down_harmonic(const Model& model, int l_max);

}  // namespace peelmap
