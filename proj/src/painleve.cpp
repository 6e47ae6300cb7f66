#include "dasp/painleve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "dasp/errors.hpp"
#include "dasp/specialfun.hpp"

namespace dasp {
namespace {

// state: q, q', \int q^2, g, \int q'^2, \int q^4   (all integrals from alpha to inf)
using State = std::array<double, 6>;

constexpr double kAlphaFloor = -8.5;
constexpr double kAlphaCeil = 12.0;
constexpr double kTailLength = 12.0;

void rhs(const State& s, State& d, double alpha) {
    const double q = s[0], p = s[1];
    const double q2 = q * q;
    d[0] = p;
    d[1] = alpha * q + 2.0 * q2 * q;
    d[2] = -q2;
    d[3] = s[2];
    d[4] = -p * p;
    d[5] = -q2 * q2;
}

// Tail integrals beyond alpha_max, where q = Ai up to O(Ai^3).
State boundary_state(double a0, double sign) {
    const AiryPair ap = airy_ai_pair(a0);
    State s{};
    s[0] = sign * ap.ai;
    s[1] = sign * ap.ai_prime;
    s[2] = ap.ai_prime * ap.ai_prime - a0 * ap.ai * ap.ai;  // closed form of \int Ai^2
    double g = 0.0, a1 = 0.0, a2 = 0.0;
    const QuadratureRule& r = gauss_legendre_unit(30);
    for (int panel = 0; panel < static_cast<int>(kTailLength); ++panel) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double x = a0 + panel + 0.5 * (r.nodes[i] + 1.0);
            const double w = 0.5 * r.weights[i];
            const AiryPair p = airy_ai_pair(x);
            const double a_sq = p.ai * p.ai;
            g -= w * (x - a0) * a_sq;
            a1 += w * p.ai_prime * p.ai_prime;
            a2 += w * a_sq * a_sq;
        }
    }
    s[3] = g;
    s[4] = a1;
    s[5] = a2;
    return s;
}

double hermite_cubic(double f0, double d0, double f1, double d1, double h, double s) {
    // s in [0, 1]
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
}

}  // namespace

HastingsMcLeodTable solve_hastings_mcleod(double alpha_min, double alpha_max, double tol,
                                          const PainleveOptions& opt) {
    if (!(alpha_min >= kAlphaFloor))
        throw DomainError("solve_hastings_mcleod: alpha_min below -8.5 is unsupported "
                          "(separatrix instability in double precision)");
    if (!(alpha_max <= kAlphaCeil) || !(alpha_min < alpha_max))
        throw DomainError("solve_hastings_mcleod: need alpha_min < alpha_max <= 12");
    if (!(tol >= 1e-12)) throw DomainError("solve_hastings_mcleod: tol must be >= 1e-12");
    if (!(opt.step > 0.0) || opt.step > 0.1) throw DomainError("solve_hastings_mcleod: bad step");
    if (std::abs(opt.sign) != 1.0) throw DomainError("solve_hastings_mcleod: sign must be +-1");

    // Integration runs toward -inf; record at alpha_max - i*step.
    std::vector<double> times;
    const auto n = static_cast<std::size_t>(std::ceil((alpha_max - alpha_min) / opt.step - 1e-9));
    times.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) times.push_back(alpha_max - static_cast<double>(i) * opt.step);
    times.push_back(alpha_min);

    HastingsMcLeodTable t;
    t.alpha_min = alpha_min;
    t.alpha_max = alpha_max;
    t.step = opt.step;
    t.sign = opt.sign;
    std::vector<State> rows;
    rows.reserve(times.size());

    namespace ode = boost::numeric::odeint;
    // q starts at ~1e-10; relative error control is what keeps the solution
    // on the separatrix, so the absolute tolerance is negligible.
    const double rel = std::min(tol, 1e-13);
    auto stepper = ode::make_dense_output(1e-30, rel, ode::runge_kutta_dopri5<State>());
    State s = boundary_state(alpha_max, opt.sign);
    ode::integrate_times(stepper, rhs, s, times.begin(), times.end(), -opt.step / 8.0,
                         [&rows](const State& st, double) { rows.push_back(st); });

    const std::size_t m = rows.size();
    auto fill = [&](std::vector<double>& col, int k) {
        col.resize(m);
        for (std::size_t i = 0; i < m; ++i) col[i] = rows[m - 1 - i][k];
    };
    t.alpha_grid.resize(m);
    for (std::size_t i = 0; i < m; ++i) t.alpha_grid[i] = times[m - 1 - i];
    fill(t.q, 0);
    fill(t.q_prime, 1);
    fill(t.int_q2, 2);
    fill(t.log_f2, 3);
    fill(t.int_qp2, 4);
    fill(t.int_q4, 5);
    return t;
}

PainleveRow HastingsMcLeodTable::at(double a) const {
    if (!(a >= alpha_min && a <= alpha_max))
        throw DomainError("HastingsMcLeodTable::at: alpha outside table range");
    // uniform spacing measured from alpha_max; only the bottom cell may be short
    const std::size_t last = alpha_grid.size() - 1;
    const double k = std::floor((alpha_max - a) / step);
    const std::size_t from_top = std::min(static_cast<std::size_t>(std::max(0.0, k)), last - 1);
    const std::size_t i = last - from_top - 1;
    const double a0 = alpha_grid[i], a1 = alpha_grid[i + 1];
    const double h = a1 - a0;
    const double s = std::clamp((a - a0) / h, 0.0, 1.0);

    const double q0 = q[i], q1 = q[i + 1];
    const double p0 = q_prime[i], p1 = q_prime[i + 1];
    PainleveRow r;
    r.alpha = a;
    r.q = hermite_cubic(q0, p0, q1, p1, h, s);
    r.q_prime = hermite_cubic(p0, a0 * q0 + 2 * q0 * q0 * q0, p1, a1 * q1 + 2 * q1 * q1 * q1, h, s);
    r.int_q2 = hermite_cubic(int_q2[i], -q0 * q0, int_q2[i + 1], -q1 * q1, h, s);
    r.log_f2 = hermite_cubic(log_f2[i], int_q2[i], log_f2[i + 1], int_q2[i + 1], h, s);
    r.int_qp2 = hermite_cubic(int_qp2[i], -p0 * p0, int_qp2[i + 1], -p1 * p1, h, s);
    r.int_q4 = hermite_cubic(int_q4[i], -q0 * q0 * q0 * q0, int_q4[i + 1], -q1 * q1 * q1 * q1, h, s);
    return r;
}

double HastingsMcLeodTable::ode_residual(std::size_t i) const {
    if (i < 2 || i + 2 >= size()) throw DomainError("ode_residual: needs two neighbours each side");
    const double h = alpha_grid[i + 1] - alpha_grid[i];
    const double qpp = (-q_prime[i + 2] + 8.0 * q_prime[i + 1] - 8.0 * q_prime[i - 1] + q_prime[i - 2]) /
                       (12.0 * h);
    const double a = alpha_grid[i];
    return qpp - a * q[i] - 2.0 * q[i] * q[i] * q[i];
}

TracyWidomCurve::TracyWidomCurve(std::shared_ptr<const HastingsMcLeodTable> table, double u_min,
                                 double u_max)
    : table_(std::move(table)), u_min_(u_min), u_max_(u_max) {
    if (!table_) throw DomainError("tracy_widom_curve: null table");
    if (!(u_min < u_max) || u_min < table_->alpha_min || u_max > table_->alpha_max - 2.0)
        throw DomainError("tracy_widom_curve: need [u_min, u_max] inside [alpha_min, alpha_max - 2]");
    const auto& t = *table_;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double a = t.alpha_grid[i];
        if (a < u_min || a > u_max) continue;
        u_grid.push_back(a);
        F2.push_back(std::exp(t.log_f2[i]));
        g.push_back(t.log_f2[i]);
        g_prime.push_back(t.int_q2[i]);
        g_second.push_back(-t.q[i] * t.q[i]);
        g1_prime.push_back(t.int_qp2[i]);
        g2_prime.push_back(t.int_q4[i]);
    }
}

TracyWidomPoint TracyWidomCurve::at(double u) const {
    if (!(u >= u_min_ && u <= u_max_)) throw DomainError("TracyWidomCurve::at: u outside curve range");
    const PainleveRow r = table_->at(u);
    TracyWidomPoint p;
    p.u = u;
    p.g = r.log_f2;
    p.F2 = std::exp(r.log_f2);
    p.g_prime = r.int_q2;
    p.F2_prime = p.F2 * p.g_prime;
    p.g_second = -r.q * r.q;
    p.g_third = -2.0 * r.q * r.q_prime;
    p.g1_prime = r.int_qp2;
    p.g2_prime = r.int_q4;
    p.q = r.q;
    p.q_prime = r.q_prime;
    return p;
}

TracyWidomCurve tracy_widom_curve(const HastingsMcLeodTable& table, double u_min, double u_max) {
    return TracyWidomCurve(std::make_shared<const HastingsMcLeodTable>(table), u_min, u_max);
}

const TracyWidomCurve& default_tracy_widom() {
    static const TracyWidomCurve curve = [] {
        auto t = std::make_shared<const HastingsMcLeodTable>(solve_hastings_mcleod(-8.5, 10.0, 1e-12));
        return TracyWidomCurve(t, -8.5, 8.0);
    }();
    return curve;
}

double phi_function(const TracyWidomCurve& c, double u, double v) {
    const TracyWidomPoint a = c.at(u), b = c.at(v);
    const double gu = a.g_prime, gv = b.g_prime;
    const double qu2 = a.q * a.q, qv2 = b.q * b.q;
    const double bracket = 0.25 * gu * gu * gv * gv + qu2 * (0.25 * qv2 - 0.5 * gv * gv) +
                           (2.0 * b.g + b.g1_prime - b.g2_prime) * gu;
    return a.F2 * b.F2 * bracket;
}

double phi_function(const TracyWidomCurve& c, const HastingsMcLeodTable&, double u, double v) {
    return phi_function(c, u, v);
}

double h4_function(const TracyWidomCurve& c, double u, double v) {
    const TracyWidomPoint a = c.at(u), b = c.at(v);
    const double su = 2.0 * a.g + a.g1_prime - a.g2_prime;
    const double sv = 2.0 * b.g + b.g1_prime - b.g2_prime;
    return 0.5 * (a.g_second * b.g_prime * b.g_prime + b.g_second * a.g_prime * a.g_prime +
                  a.g_second * b.g_second) +
           a.g_prime * sv + b.g_prime * su;
}

TracyWidomMoments tracy_widom_moments(const TracyWidomCurve& c) {
    const QuadratureRule& r = gauss_legendre_unit(20);
    const double lo = c.u_min(), hi = c.u_max();
    const int panels = static_cast<int>(std::ceil((hi - lo) * 4.0));
    const double w = (hi - lo) / panels;
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (int k = 0; k < panels; ++k) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double u = lo + w * (k + 0.5 * (r.nodes[i] + 1.0));
            const double d = 0.5 * w * r.weights[i] * c.at(u).F2_prime;
            m0 += d;
            m1 += d * u;
            m2 += d * u * u;
        }
    }
    TracyWidomMoments out;
    out.mass = m0;
    out.mean = m1 / m0;
    out.variance = m2 / m0 - out.mean * out.mean;
    return out;
}

}  // namespace dasp
