#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dasp/fredholm.hpp"
#include "dasp/intervals.hpp"
#include "dasp/painleve.hpp"

namespace dasp {

struct Stencil {
    double h_space = 0.05;
    double h_time = 0.02;
    int order = 2;  // central-difference order: 2 or 4
    bool richardson = false;

    void validate() const;
    Stencil scaled(double f) const { return {h_space * f, h_time * f, order, richardson}; }
};

struct ResidualReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double normalizer = 0.0;
    double rel_residual = 0.0;

    /// normalizer = max |term| over the monomials of both sides.
    static ResidualReport from_terms(double lhs, double rhs, const std::vector<double>& terms);
};

/// Evaluation point: endpoints a (time t1 = 0), endpoints b (time t2 = t), and t.
struct PdePoint {
    std::vector<double> a;
    std::vector<double> b;
    double t = 0.0;
};

using Field = std::function<double(const PdePoint&)>;

/// X = sum alpha_i d/da_i + sum beta_j d/db_j + gamma d/dt + delta with
/// coefficients evaluated at the differentiation point.
struct FirstOrderOperator {
    struct Coefficients {
        std::vector<double> alpha, beta;
        double gamma = 0.0;
        double delta = 0.0;
    };
    std::function<Coefficients(const PdePoint&)> coefficients;
    /// true: difference each coordinate separately instead of one
    /// directional difference along (alpha, beta).
    bool split = false;

    FirstOrderOperator operator+(const FirstOrderOperator& o) const;
    FirstOrderOperator operator-(const FirstOrderOperator& o) const;
    FirstOrderOperator operator*(double s) const;
    FirstOrderOperator plus_constant(double c) const;
};

enum class OperatorKind { A1, B1, A2, B2, Lu, Lv, Eu, Ev };

FirstOrderOperator make_operator(OperatorKind which);

/// The field X f, by central differences of the given order.
Field apply_operator(const FirstOrderOperator& op, Field f, const Stencil& st);
Field apply_operator(OperatorKind which, Field f, const Stencil& st);

/// Mixed partial d^{du}/da_0^{du} d^{dv}/db_0^{dv} d^{dt}/dt^{dt} by tensor stencils.
double mixed_partial(const Field& f, const PdePoint& p, int du, int dv, int dt, const Stencil& st);

enum class DysonVariant { direct, complement };
enum class AiryForm { explicit_form, wronskian, xy };
enum class SineForm { general, single_interval };

struct PdeOptions {
    FredholmConfig fredholm;       // refinement settings for the center point
    double noise_floor = 1e-12;    // absolute error assumed for each G value
};

ResidualReport dyson_residual(int n, double t, const IntervalUnion& E1, const IntervalUnion& E2,
                              const Stencil& st, DysonVariant variant = DysonVariant::direct,
                              const PdeOptions& opt = {});

ResidualReport airy_residual(double t, double u, double v, const Stencil& st, AiryForm form,
                             const PdeOptions& opt = {});

ResidualReport sine_residual(double t, const IntervalUnion& E1, const IntervalUnion& E2, const Stencil& st,
                             SineForm form = SineForm::general, const PdeOptions& opt = {});

/// Reports at h, h/2, ..., h/2^{levels-1}.
std::vector<ResidualReport> residual_ladder(const std::function<ResidualReport(const Stencil&)>& run,
                                            const Stencil& st, int levels);

struct IdentityReport {
    double null_space_max = 0.0;  // max |L r| over polynomial test functions
    double lg_identity_max = 0.0;   // max |L[g'(u)g'(v)] - (g'''(u)g''(v) - g'''(v)g''(u))|
    double source_identity_max = 0.0;  // max |L h4 - source(q)| on the 3x3 grid
    double source_forms_max = 0.0;  // max |g-derivative source - q-form source|
};

/// L = (d/du - d/dv) d^2/(du dv).
double script_l(const std::function<double(double, double)>& f, double u, double v, double h, int order);

/// Right side of the t^{-2} balance written with g-derivatives, and the
/// same quantity written with q, q' and \int q^2 only.
double source_g_form(const TracyWidomCurve& c, double u, double v);
double source_q_form(const TracyWidomCurve& c, double u, double v);

IdentityReport null_space_and_source_checks(const TracyWidomCurve& curve);

}  // namespace dasp
