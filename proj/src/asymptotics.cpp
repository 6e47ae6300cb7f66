#include "dasp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "dasp/errors.hpp"

namespace dasp {
namespace {

// Composite Simpson weights on npts equally spaced points (npts odd).
std::vector<double> simpson_weights(int npts, double h) {
    std::vector<double> w(npts);
    for (int i = 0; i < npts; ++i) w[i] = (i == 0 || i == npts - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (double& x : w) x *= h / 3.0;
    return w;
}

int simpson_points(double lo, double hi, double step) {
    int n = static_cast<int>(std::lround((hi - lo) / step));
    if (n % 2) ++n;
    return n + 1;
}

}  // namespace

double covariance_integrand(double t, double u, double v, const FredholmConfig& cfg) {
    const TracyWidomCurve& c = default_tracy_widom();
    const double ff = c.F2_at(u) * c.F2_at(v);
    const FredholmResult r = two_time_ratio_factorized(t, u, v, cfg);
    return ff * (r.value - 1.0);
}

ExpansionReport expansion_report(double u, double v, const std::vector<double>& t_values,
                                 const FredholmConfig& cfg, bool cross_check) {
    if (!(u >= -3.0 && u <= 2.0 && v >= -3.0 && v <= 2.0))
        throw DomainError("expansion_report: (u, v) must lie in [-3, 2]^2");
    for (double t : t_values)
        if (!(t >= 2.0 && t <= 12.0)) throw DomainError("expansion_report: t values must lie in [2, 12]");
    const TracyWidomCurve& c = default_tracy_widom();
    const TracyWidomPoint a = c.at(u), b = c.at(v);

    ExpansionReport rep;
    rep.u = u;
    rep.v = v;
    rep.t_values = t_values;
    rep.term0 = a.F2 * b.F2;
    rep.term2 = a.F2_prime * b.F2_prime;
    rep.term4 = phi_function(c, u, v) + phi_function(c, v, u);
    for (double t : t_values) {
        const double gap = rep.term0 * (two_time_ratio_factorized(t, u, v, cfg).value - 1.0);
        rep.joint.push_back(rep.term0 + gap);
        const double t2 = t * t;
        rep.scaled2.push_back(t2 * gap);
        rep.scaled3.push_back(t2 * t * (gap - rep.term2 / t2));
        rep.scaled4.push_back(t2 * t2 * (gap - rep.term2 / t2));
        if (cross_check)
            rep.direct.push_back(joint_probability(Process::airy, {}, 0.0, t, IntervalUnion::below(u),
                                                   IntervalUnion::below(v), cfg)
                                     .value);
    }
    return rep;
}

CovarianceEstimate covariance_estimate(double t, const CovarianceGrid& grid, const FredholmConfig& cfg, Exec exec) {
    if (!(t >= 2.0)) throw DomainError("covariance_estimate: t must be >= 2");
    if (!(grid.step > 0.0) || grid.step > 0.25) throw DomainError("covariance_estimate: grid step must lie in (0, 0.25]");
    if (grid.lo > -4.5 || grid.hi < 2.5) throw DomainError("covariance_estimate: grid must cover [-4.5, 2.5]^2");
    const TracyWidomCurve& c = default_tracy_widom();
    if (grid.lo < c.u_min() || grid.hi > c.u_max())
        throw DomainError("covariance_estimate: grid exceeds the Tracy-Widom table range");

    const int m = simpson_points(grid.lo, grid.hi, grid.step);
    const double h = (grid.hi - grid.lo) / (m - 1);
    const std::vector<double> w = simpson_weights(m, h);
    std::vector<double> vals(static_cast<std::size_t>(m) * m);

    std::exception_ptr err;
    const long total = static_cast<long>(vals.size());
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::parallel)
    for (long k = 0; k < total; ++k) {
        try {
            const double u = grid.lo + h * static_cast<double>(k / m);
            const double v = grid.lo + h * static_cast<double>(k % m);
            vals[k] = covariance_integrand(t, u, v, cfg);
        } catch (...) {
#pragma omp critical(dasp_cov_err)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    double cov = 0.0;
    for (int i = 0; i < m; ++i) {
        double row = 0.0;
        for (int j = 0; j < m; ++j) row += w[j] * vals[static_cast<std::size_t>(i) * m + j];
        cov += w[i] * row;
    }
    const double inside = c.F2_at(grid.hi) - c.F2_at(grid.lo);
    CovarianceEstimate out;
    out.t = t;
    out.cov = cov;
    out.tail_bound = (1.0 - inside * inside) / (t * t);
    return out;
}

CConstant c_constant(const TracyWidomCurve& curve) {
    constexpr double lo = -6.0, hi = 4.0;
    if (curve.u_min() > lo || curve.u_max() < hi) throw DomainError("c_constant: curve must span [-6, 4]");
    auto integrate = [&](double step) {
        const int m = simpson_points(lo, hi, step);
        const double h = (hi - lo) / (m - 1);
        const std::vector<double> w = simpson_weights(m, h);
        double s = 0.0;
        for (int i = 0; i < m; ++i) {
            double row = 0.0;
            for (int j = 0; j < m; ++j) row += w[j] * phi_function(curve, lo + h * i, lo + h * j);
            s += w[i] * row;
        }
        return 2.0 * s;
    };
    CConstant out;
    out.value = integrate(0.05);
    out.coarse = integrate(0.1);
    for (int i = 0; i <= 200; ++i) {
        const double x = lo + 0.05 * i;
        for (double e : {lo, hi}) {
            out.boundary_max = std::max(out.boundary_max, std::abs(phi_function(curve, x, e)));
            out.boundary_max = std::max(out.boundary_max, std::abs(phi_function(curve, e, x)));
        }
    }
    return out;
}

}  // namespace dasp
