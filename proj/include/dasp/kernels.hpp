#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dasp/parallel.hpp"

namespace dasp {

enum class KernelKind { hermite, airy, sine };

const char* kernel_kind_name(KernelKind k);

struct KernelTruncation {
    double t_min = 1e-3;          // smallest gap allowed on the t_i < t_j branch
    int airy_positive_order = 24;  // GL nodes per unit panel on z >= 0
    int airy_negative_order = 40;  // GL nodes per unit-scaled panel on z <= 0
    double airy_negative_min = 30.0;
    double airy_negative_scale = 40.0;
    double airy_negative_cap = 2000.0;
    int sine_order = 24;
    int hermite_max_terms = 1000000;
    double window_scale = 1.0;  // multiplies every truncation window (testing hook)
};

struct ExtendedKernelSpec {
    KernelKind kind = KernelKind::airy;
    int n = 0;  // Hermite only
    double t_i = 0.0;
    double t_j = 0.0;
    double tol = 1e-14;
    KernelTruncation trunc;

    static ExtendedKernelSpec hermite(int n, double t_i, double t_j, double tol = 1e-14);
    static ExtendedKernelSpec airy(double t_i, double t_j, double tol = 1e-14);
    static ExtendedKernelSpec sine(double t_i, double t_j, double tol = 1e-14);

    /// Throws DomainError / BranchError on invalid combinations.
    void validate() const;
    bool positive_branch() const { return t_i >= t_j; }
};

/// K_{t_i t_j}(x, y) by its defining sum or integral.
double eval_kernel(const ExtendedKernelSpec& spec, double x, double y);

/// (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y), with a midpoint expansion near x = y.
double airy_equal_time(double x, double y);

/// Dense matrix K(xs[a], ys[b]). Equal-time Airy and Sine use closed forms.
Eigen::MatrixXd kernel_matrix(const ExtendedKernelSpec& spec, const std::vector<double>& xs,
                              const std::vector<double>& ys, Exec exec = Exec::parallel);

/// Number of terms kept on the Hermite t_i < t_j series.
int hermite_negative_terms(int n, double gap, double tol, double window_scale = 1.0);

enum class LimitTarget { airy, sine };

struct LimitComparison {
    double scaled_hermite = 0.0;
    double limit_value = 0.0;
    double abs_error = 0.0;
};

/// Scaled finite-n Hermite kernel against its edge (Airy) or bulk (Sine) limit.
LimitComparison limit_compare(LimitTarget target, int n, double t, double s, double u, double v);

}  // namespace dasp
