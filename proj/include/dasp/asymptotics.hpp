#pragma once

#include <vector>

#include "dasp/fredholm.hpp"
#include "dasp/painleve.hpp"

namespace dasp {

/// Large-t behaviour of P(A(0) <= u, A(t) <= v) against its expansion
///   F(u)F(v) + F'(u)F'(v)/t^2 + (Phi(u,v) + Phi(v,u))/t^4 + ...
struct ExpansionReport {
    double u = 0.0, v = 0.0;
    std::vector<double> t_values;
    std::vector<double> joint;
    double term0 = 0.0;  // F2(u) F2(v)
    double term2 = 0.0;  // F2'(u) F2'(v)
    double term4 = 0.0;  // Phi(u, v) + Phi(v, u)
    std::vector<double> scaled2;  // t^2 (joint - term0)
    std::vector<double> scaled3;  // t^3 (joint - term0 - term2/t^2)
    std::vector<double> scaled4;  // t^4 (joint - term0 - term2/t^2)
    std::vector<double> direct;   // joint_probability cross-check, empty unless requested
};

/// Joint values come from the factorized ratio times F2(u)F2(v); with
/// `cross_check` the direct two-block determinant is also recorded.
ExpansionReport expansion_report(double u, double v, const std::vector<double>& t_values,
                                 const FredholmConfig& cfg = {}, bool cross_check = false);

struct CovarianceGrid {
    double lo = -4.5;
    double hi = 2.5;
    double step = 0.25;
};

struct CovarianceEstimate {
    double t = 0.0;
    double cov = 0.0;
    double tail_bound = 0.0;  // F2'F2'/t^2 mass outside the grid
};

/// Cov(A(0), A(t)) as the double integral of P(A(0) <= u, A(t) <= v) - F2(u)F2(v).
CovarianceEstimate covariance_estimate(double t, const CovarianceGrid& grid = {}, const FredholmConfig& cfg = {},
                                       Exec exec = Exec::parallel);

/// Value of P(A(0) <= u, A(t) <= v) - F2(u)F2(v) via the ratio route.
double covariance_integrand(double t, double u, double v, const FredholmConfig& cfg = {});

struct CConstant {
    double value = 0.0;
    double coarse = 0.0;       // same rule at twice the step
    double boundary_max = 0.0; // max |Phi| on the edge of the square
};

/// c = 2 * double integral of Phi over [-6, 4]^2 (composite Simpson, step 0.05).
CConstant c_constant(const TracyWidomCurve& curve = default_tracy_widom());

}  // namespace dasp
