#pragma once

#include <cstddef>
#include <vector>

namespace dasp {

struct AiryPair {
    double x = 0.0;
    double ai = 0.0;
    double ai_prime = 0.0;
};

/// Ai and Ai' at a real point. Accurate to ~1e-14 relative on |x| <= 12,
/// absolute 1e-15 beyond; |x| may exceed 200 but accuracy is only
/// characterized up to there.
AiryPair airy_ai_pair(double x);

/// phi_0..phi_{k_max} at x for the orthonormal Hermite functions
/// phi_k(x) = H_k(x) e^{-x^2/2} / sqrt(2^k k! sqrt(pi)).
struct HermiteRow {
    int k_max = 0;
    double x = 0.0;
    std::vector<double> values;

    /// phi_k(x); negative k gives 0.
    double operator[](int k) const {
        return (k < 0 || k > k_max) ? 0.0 : values[static_cast<std::size_t>(k)];
    }
};

HermiteRow hermite_phi_row(int k_max, double x);

/// Fills out[0..k_max] in place; avoids allocation on hot paths.
void hermite_phi_fill(int k_max, double x, double* out);

/// Largest |phi_k| over a grid of step 0.05 spanning the oscillatory
/// region plus three units on each side.
double hermite_max_abs(int k);

/// Cramer's bound: |phi_k(x)| <= 1.086435 * pi^{-1/4} for all k, x.
inline constexpr double kHermiteEnvelope = 1.086435 * 0.7511255444649425;

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

/// m-point Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int m, double a, double b);

/// Cached m-point rule on [-1, 1]; the reference stays valid for the
/// lifetime of the program.
const QuadratureRule& gauss_legendre_unit(int m);

/// Relative error of the edge approximation
/// phi_{n-k}(sqrt(2n+1) + u/(sqrt2 n^{1/6})) ~ 2^{1/4} n^{-1/12} Ai(u + k n^{-1/3}).
double edge_asymptotic_check(int n, int k, double u);

}  // namespace dasp
