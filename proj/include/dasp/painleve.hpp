#pragma once

#include <memory>
#include <vector>

namespace dasp {

/// One row of the Hastings-McLeod solution together with the tail integrals
/// that the Tracy-Widom machinery needs.
struct PainleveRow {
    double alpha = 0.0;
    double q = 0.0;
    double q_prime = 0.0;
    double int_q2 = 0.0;   // \int_alpha^inf q^2
    double log_f2 = 0.0;   // -\int_alpha^inf (x - alpha) q^2 dx
    double int_qp2 = 0.0;  // \int_alpha^inf q'^2
    double int_q4 = 0.0;   // \int_alpha^inf q^4
};

struct HastingsMcLeodTable {
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    double step = 0.0;
    int interpolation_order = 3;  // cubic Hermite in every column
    double sign = 1.0;            // +1 follows Ai, -1 the mirrored solution

    // Stored in increasing alpha.
    std::vector<double> alpha_grid;
    std::vector<double> q;
    std::vector<double> q_prime;
    std::vector<double> int_q2;
    std::vector<double> log_f2;
    std::vector<double> int_qp2;
    std::vector<double> int_q4;

    std::size_t size() const { return alpha_grid.size(); }

    /// Interpolated row; throws DomainError outside [alpha_min, alpha_max].
    PainleveRow at(double alpha) const;

    /// q'' - alpha q - 2q^3 at a grid index, using a fourth-order central
    /// difference of the tabulated q'.
    double ode_residual(std::size_t i) const;
};

struct PainleveOptions {
    double step = 1.0 / 256.0;
    double sign = 1.0;
};

/// Integrates q'' = alpha q + 2 q^3 downward from Ai data at alpha_max.
HastingsMcLeodTable solve_hastings_mcleod(double alpha_min, double alpha_max, double tol,
                                          const PainleveOptions& opt = {});

struct TracyWidomPoint {
    double u = 0.0;
    double F2 = 0.0;
    double F2_prime = 0.0;
    double g = 0.0;         // log F2
    double g_prime = 0.0;   // \int_u^inf q^2
    double g_second = 0.0;  // -q(u)^2
    double g_third = 0.0;   // -2 q q'
    double g1_prime = 0.0;  // \int_u^inf q'^2
    double g2_prime = 0.0;  // \int_u^inf q^4
    double q = 0.0;
    double q_prime = 0.0;
};

class TracyWidomCurve {
public:
    TracyWidomCurve(std::shared_ptr<const HastingsMcLeodTable> table, double u_min, double u_max);

    double u_min() const { return u_min_; }
    double u_max() const { return u_max_; }
    const HastingsMcLeodTable& table() const { return *table_; }

    /// Grid columns restricted to [u_min, u_max].
    std::vector<double> u_grid, F2, g, g_prime, g_second, g1_prime, g2_prime;

    TracyWidomPoint at(double u) const;
    double F2_at(double u) const { return at(u).F2; }

private:
    std::shared_ptr<const HastingsMcLeodTable> table_;
    double u_min_, u_max_;
};

TracyWidomCurve tracy_widom_curve(const HastingsMcLeodTable& table, double u_min, double u_max);

/// Shared default: table on [-8.5, 10], curve on [-8.5, 8]. Built once.
const TracyWidomCurve& default_tracy_widom();

/// Phi(u, v) of the large-gap expansion (asymmetric in u, v).
double phi_function(const TracyWidomCurve& curve, double u, double v);
double phi_function(const TracyWidomCurve& curve, const HastingsMcLeodTable& table, double u, double v);

/// h4(u, v) assembled from g-derivatives; F(u)F(v)(h4 + g'(u)^2 g'(v)^2 / 2)
/// is the symmetric t^{-4} coefficient.
double h4_function(const TracyWidomCurve& curve, double u, double v);

struct TracyWidomMoments {
    double mass = 0.0;  // F2(u_max) - F2(u_min)
    double mean = 0.0;
    double variance = 0.0;
};

/// Moments of the density F2' by Simpson quadrature over the curve grid.
TracyWidomMoments tracy_widom_moments(const TracyWidomCurve& curve);

}  // namespace dasp
