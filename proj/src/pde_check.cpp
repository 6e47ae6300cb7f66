#include "dasp/pde_check.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <string>
#include <utility>

#include "dasp/errors.hpp"

namespace dasp {
namespace {

constexpr double kPi = std::numbers::pi;

using Tap = std::pair<int, double>;  // (offset in steps, weight)

// Central-difference taps for the k-th derivative at unit step.
const std::vector<Tap>& taps(int k, int order) {
    static const std::vector<Tap> d0 = {{0, 1.0}};
    static const std::vector<Tap> d1_2 = {{-1, -0.5}, {1, 0.5}};
    static const std::vector<Tap> d2_2 = {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    static const std::vector<Tap> d3_2 = {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    static const std::vector<Tap> d1_4 = {{-2, 1.0 / 12}, {-1, -2.0 / 3}, {1, 2.0 / 3}, {2, -1.0 / 12}};
    static const std::vector<Tap> d2_4 = {{-2, -1.0 / 12}, {-1, 4.0 / 3}, {0, -2.5}, {1, 4.0 / 3}, {2, -1.0 / 12}};
    static const std::vector<Tap> d3_4 = {{-3, 0.125}, {-2, -1.0}, {-1, 1.625}, {1, -1.625}, {2, 1.0}, {3, -0.125}};
    switch (k) {
        case 0: return d0;
        case 1: return order == 4 ? d1_4 : d1_2;
        case 2: return order == 4 ? d2_4 : d2_2;
        case 3: return order == 4 ? d3_4 : d3_2;
        default: throw DomainError("finite differences: derivative order above 3");
    }
}

double diff1(const std::function<double(double)>& g, double h, int order) {
    double s = 0.0;
    for (auto [k, w] : taps(1, order)) s += w * g(k * h);
    return s / h;
}

// Memoized G for the two-phase evaluation: a dry run records every stencil
// point, those are evaluated in parallel, then the same arithmetic is
// replayed against the cache.
class StencilCache {
public:
    explicit StencilCache(Field base) : base_(std::move(base)) {}

    Field field() {
        return [this](const PdePoint& p) { return lookup(p); };
    }

    void set_collecting(bool on) { collecting_ = on; }

    void evaluate_pending() {
        std::vector<PdePoint> pts;
        std::vector<Key> keys(pending_.begin(), pending_.end());
        pending_.clear();
        for (const auto& k : keys) pts.push_back(points_.at(k));
        std::vector<double> values(keys.size());
        std::exception_ptr err;
        std::mutex mu;
        const long n = static_cast<long>(keys.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < n; ++i) {
            try {
                values[i] = base_(pts[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        for (long i = 0; i < n; ++i) cache_[keys[i]] = values[i];
    }

private:
    using Key = std::vector<double>;

    static Key pack(const PdePoint& p) {
        Key k(p.a);
        k.push_back(std::nan(""));  // separator; never equal, so compare by bits below
        k.insert(k.end(), p.b.begin(), p.b.end());
        k.push_back(p.t);
        return k;
    }

    struct BitLess {
        bool operator()(const Key& x, const Key& y) const {
            if (x.size() != y.size()) return x.size() < y.size();
            for (std::size_t i = 0; i < x.size(); ++i) {
                const bool nx = std::isnan(x[i]), ny = std::isnan(y[i]);
                if (nx || ny) {
                    if (nx != ny) return nx < ny;
                    continue;
                }
                if (x[i] != y[i]) return x[i] < y[i];
            }
            return false;
        }
    };

    double lookup(const PdePoint& p) {
        const Key key = pack(p);
        const auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        if (collecting_) {
            if (pending_.insert(key).second) points_.emplace(key, p);
            return 0.0;
        }
        const double v = base_(p);
        cache_.emplace(key, v);
        return v;
    }

    Field base_;
    bool collecting_ = false;
    std::map<Key, double, BitLess> cache_;
    std::set<Key, BitLess> pending_;
    std::map<Key, PdePoint, BitLess> points_;
};

// Runs `compute(G, final)` through the dry-run / parallel / replay phases.
template <class Compute>
ResidualReport two_phase(Field base, Compute&& compute) {
    StencilCache cache(std::move(base));
    const Field G = cache.field();
    cache.set_collecting(true);
    compute(G, false);
    cache.evaluate_pending();
    cache.set_collecting(false);
    return compute(G, true);
}

void check_denominator(double d, double h, double noise, bool final, const char* what) {
    if (!final) return;
    const double floor = 4.0 * noise / (h * h);
    if (std::abs(d) < 10.0 * floor)
        throw NumericalError(std::string("degenerate point: denominator ") + what + " is within the FD noise floor");
}

double exp_neg(double t) { return std::exp(-t); }

PdePoint shifted(const PdePoint& p, const FirstOrderOperator::Coefficients& c, double s) {
    PdePoint q = p;
    for (std::size_t i = 0; i < q.a.size() && i < c.alpha.size(); ++i) q.a[i] += s * c.alpha[i];
    for (std::size_t j = 0; j < q.b.size() && j < c.beta.size(); ++j) q.b[j] += s * c.beta[j];
    return q;
}

bool all_zero(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

FirstOrderOperator::Coefficients combine(const FirstOrderOperator::Coefficients& x,
                                         const FirstOrderOperator::Coefficients& y, double sy) {
    FirstOrderOperator::Coefficients r;
    r.alpha.resize(std::max(x.alpha.size(), y.alpha.size()), 0.0);
    r.beta.resize(std::max(x.beta.size(), y.beta.size()), 0.0);
    for (std::size_t i = 0; i < x.alpha.size(); ++i) r.alpha[i] += x.alpha[i];
    for (std::size_t i = 0; i < y.alpha.size(); ++i) r.alpha[i] += sy * y.alpha[i];
    for (std::size_t i = 0; i < x.beta.size(); ++i) r.beta[i] += x.beta[i];
    for (std::size_t i = 0; i < y.beta.size(); ++i) r.beta[i] += sy * y.beta[i];
    r.gamma = x.gamma + sy * y.gamma;
    r.delta = x.delta + sy * y.delta;
    return r;
}

// Builds the coefficient callback for sum_i fa(a_i) d/da_i + sum_j fb(b_j) d/db_j + ...
FirstOrderOperator op_from(std::function<double(double, double)> fa, std::function<double(double, double)> fb,
                           std::function<double(double)> gamma, std::function<double(double)> delta) {
    FirstOrderOperator op;
    op.coefficients = [=](const PdePoint& p) {
        FirstOrderOperator::Coefficients c;
        c.alpha.resize(p.a.size());
        c.beta.resize(p.b.size());
        for (std::size_t i = 0; i < p.a.size(); ++i) c.alpha[i] = fa(p.a[i], p.t);
        for (std::size_t j = 0; j < p.b.size(); ++j) c.beta[j] = fb(p.b[j], p.t);
        c.gamma = gamma(p.t);
        c.delta = delta(p.t);
        return c;
    };
    return op;
}

// Single-coordinate derivative: d/da_i (group 0) or d/db_i (group 1).
FirstOrderOperator coordinate(int group, std::size_t index) {
    FirstOrderOperator op;
    op.coefficients = [=](const PdePoint& p) {
        FirstOrderOperator::Coefficients c;
        c.alpha.assign(p.a.size(), 0.0);
        c.beta.assign(p.b.size(), 0.0);
        (group == 0 ? c.alpha : c.beta).at(index) = 1.0;
        return c;
    };
    return op;
}

// Euler field on one group plus t d/dt, differenced coordinate by coordinate.
FirstOrderOperator euler_split(int group) {
    FirstOrderOperator op;
    op.coefficients = [=](const PdePoint& p) {
        FirstOrderOperator::Coefficients c;
        c.alpha.assign(p.a.size(), 0.0);
        c.beta.assign(p.b.size(), 0.0);
        if (group == 0) c.alpha = p.a;
        else c.beta = p.b;
        c.gamma = p.t;
        return c;
    };
    op.split = true;
    return op;
}

struct TermList {
    std::vector<double> v;
    void add(double x) { v.push_back(x); }
};

// Richardson combination of two reports at h and h/2.
ResidualReport richardson(const ResidualReport& coarse, const ResidualReport& fine, int order,
                          const std::vector<double>& terms) {
    const double k = std::pow(2.0, order);
    const double lhs = (k * fine.lhs - coarse.lhs) / (k - 1.0);
    const double rhs = (k * fine.rhs - coarse.rhs) / (k - 1.0);
    ResidualReport r = ResidualReport::from_terms(lhs, rhs, terms);
    r.normalizer = fine.normalizer;
    r.rel_residual = std::abs(lhs - rhs) / std::max(r.normalizer, 1e-12);
    return r;
}

template <class Run>
ResidualReport with_richardson(const Stencil& st, Run&& run) {
    st.validate();
    Stencil plain = st;
    plain.richardson = false;
    if (!st.richardson) return run(plain);
    const ResidualReport coarse = run(plain);
    const ResidualReport fine = run(plain.scaled(0.5));
    return richardson(coarse, fine, st.order, {fine.normalizer});
}

int center_order(Process proc, const ProcessParams& params, double t, const IntervalUnion& E1,
                 const IntervalUnion& E2, const PdeOptions& opt) {
    FredholmConfig cfg = opt.fredholm;
    cfg.tol = std::min(cfg.tol, 1e-12);
    const FredholmResult r = joint_probability(proc, params, 0.0, t, E1, E2, cfg);
    return std::max(r.order_used, 32);
}

// Shared body of the Sine-type equation given its four operators:
//   Lu[(2 Ev Lu + (Ev - Eu - 1) Lv) G / D] - Lv[(2 Eu Lv + (Eu - Ev - 1) Lu) G / D],
//   D = (Lu + Lv)^2 G + pi^2.
ResidualReport sine_type(const Field& G, const PdePoint& c, const FirstOrderOperator& Lu,
                         const FirstOrderOperator& Lv, const FirstOrderOperator& Eu,
                         const FirstOrderOperator& Ev, const Stencil& st, double noise, bool final) {
    const Field LuG = apply_operator(Lu, G, st);
    const Field LvG = apply_operator(Lv, G, st);
    const Field EvLuG = apply_operator(Ev, LuG, st);
    const Field EuLvG = apply_operator(Eu, LvG, st);
    const Field XvLvG = apply_operator((Ev - Eu).plus_constant(-1.0), LvG, st);
    const Field XuLuG = apply_operator((Eu - Ev).plus_constant(-1.0), LuG, st);
    const FirstOrderOperator S = Lu + Lv;
    const Field SSG = apply_operator(S, apply_operator(S, G, st), st);
    const Field D = [SSG](const PdePoint& p) { return SSG(p) + kPi * kPi; };
    const Field N1 = [EvLuG, XvLvG](const PdePoint& p) { return 2.0 * EvLuG(p) + XvLvG(p); };
    const Field N2 = [EuLvG, XuLuG](const PdePoint& p) { return 2.0 * EuLvG(p) + XuLuG(p); };
    const Field Q1 = [N1, D](const PdePoint& p) { return N1(p) / D(p); };
    const Field Q2 = [N2, D](const PdePoint& p) { return N2(p) / D(p); };

    const double d = D(c);
    check_denominator(d, st.h_space, noise, final, "(Lu + Lv)^2 G + pi^2");
    const double lhs = apply_operator(Lu, Q1, st)(c);
    const double rhs = apply_operator(Lv, Q2, st)(c);
    const double n1 = N1(c), n2 = N2(c);
    const std::vector<double> terms = {apply_operator(Lu, N1, st)(c) / d, n1 * apply_operator(Lu, D, st)(c) / (d * d),
                                       apply_operator(Lv, N2, st)(c) / d, n2 * apply_operator(Lv, D, st)(c) / (d * d)};
    return ResidualReport::from_terms(lhs, rhs, terms);
}

}  // namespace

void Stencil::validate() const {
    if (!(h_space > 0.0 && h_space <= 0.2)) throw DomainError("Stencil: h_space must lie in (0, 0.2]");
    if (!(h_time > 0.0 && h_time <= 0.1)) throw DomainError("Stencil: h_time must lie in (0, 0.1]");
    if (order != 2 && order != 4) throw DomainError("Stencil: order must be 2 or 4");
}

ResidualReport ResidualReport::from_terms(double lhs, double rhs, const std::vector<double>& terms) {
    ResidualReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.normalizer = 0.0;
    for (double t : terms) r.normalizer = std::max(r.normalizer, std::abs(t));
    r.rel_residual = std::abs(lhs - rhs) / std::max(r.normalizer, 1e-12);
    return r;
}

FirstOrderOperator FirstOrderOperator::operator+(const FirstOrderOperator& o) const {
    FirstOrderOperator r;
    auto x = coefficients, y = o.coefficients;
    r.coefficients = [x, y](const PdePoint& p) { return combine(x(p), y(p), 1.0); };
    r.split = split && o.split;
    return r;
}

FirstOrderOperator FirstOrderOperator::operator-(const FirstOrderOperator& o) const {
    FirstOrderOperator r;
    auto x = coefficients, y = o.coefficients;
    r.coefficients = [x, y](const PdePoint& p) { return combine(x(p), y(p), -1.0); };
    r.split = split && o.split;
    return r;
}

FirstOrderOperator FirstOrderOperator::operator*(double s) const {
    FirstOrderOperator r;
    auto x = coefficients;
    r.coefficients = [x, s](const PdePoint& p) {
        FirstOrderOperator::Coefficients zero;
        return combine(zero, x(p), s);
    };
    r.split = split;
    return r;
}

FirstOrderOperator FirstOrderOperator::plus_constant(double k) const {
    FirstOrderOperator r;
    auto x = coefficients;
    r.coefficients = [x, k](const PdePoint& p) {
        auto c = x(p);
        c.delta += k;
        return c;
    };
    r.split = split;
    return r;
}

FirstOrderOperator make_operator(OperatorKind which) {
    auto one = [](double, double) { return 1.0; };
    auto zero = [](double, double) { return 0.0; };
    auto none = [](double) { return 0.0; };
    auto c_of = [](double, double t) { return exp_neg(t); };
    auto coord = [](double x, double) { return x; };
    auto c2_coord = [](double x, double t) { return exp_neg(2.0 * t) * x; };
    auto one_minus_c2 = [](double t) { return -std::expm1(-2.0 * t); };
    auto minus_c2 = [](double t) { return -exp_neg(2.0 * t); };
    auto tt = [](double t) { return t; };
    switch (which) {
        case OperatorKind::A1: return op_from(one, c_of, none, none);
        case OperatorKind::B1: return op_from(c_of, one, none, none);
        case OperatorKind::A2: return op_from(coord, c2_coord, one_minus_c2, minus_c2);
        case OperatorKind::B2: return op_from(c2_coord, coord, one_minus_c2, minus_c2);
        case OperatorKind::Lu: return op_from(one, zero, none, none);
        case OperatorKind::Lv: return op_from(zero, one, none, none);
        case OperatorKind::Eu: return op_from(coord, zero, tt, none);
        case OperatorKind::Ev: return op_from(zero, coord, tt, none);
    }
    throw DomainError("make_operator: unknown operator");
}

Field apply_operator(const FirstOrderOperator& op, Field f, const Stencil& st) {
    st.validate();
    const int order = st.order;
    const double h = st.h_space, ht = st.h_time;
    return [op, f, order, h, ht](const PdePoint& p) {
        const FirstOrderOperator::Coefficients c = op.coefficients(p);
        double out = 0.0;
        if (op.split) {
            for (std::size_t i = 0; i < p.a.size(); ++i) {
                if (c.alpha[i] == 0.0) continue;
                FirstOrderOperator::Coefficients e;
                e.alpha.assign(p.a.size(), 0.0);
                e.alpha[i] = 1.0;
                out += c.alpha[i] * diff1([&](double s) { return f(shifted(p, e, s)); }, h, order);
            }
            for (std::size_t j = 0; j < p.b.size(); ++j) {
                if (c.beta[j] == 0.0) continue;
                FirstOrderOperator::Coefficients e;
                e.beta.assign(p.b.size(), 0.0);
                e.beta[j] = 1.0;
                out += c.beta[j] * diff1([&](double s) { return f(shifted(p, e, s)); }, h, order);
            }
        } else if (!all_zero(c.alpha) || !all_zero(c.beta)) {
            out += diff1([&](double s) { return f(shifted(p, c, s)); }, h, order);
        }
        if (c.gamma != 0.0) {
            out += c.gamma * diff1(
                                 [&](double s) {
                                     PdePoint q = p;
                                     q.t += s;
                                     return f(q);
                                 },
                                 ht, order);
        }
        if (c.delta != 0.0) out += c.delta * f(p);
        return out;
    };
}

Field apply_operator(OperatorKind which, Field f, const Stencil& st) {
    return apply_operator(make_operator(which), std::move(f), st);
}

double mixed_partial(const Field& f, const PdePoint& p, int du, int dv, int dt, const Stencil& st) {
    st.validate();
    if (p.a.empty() || p.b.empty()) throw DomainError("mixed_partial: point needs a_0 and b_0");
    const auto& tu = taps(du, st.order);
    const auto& tv = taps(dv, st.order);
    const auto& tt = taps(dt, st.order);
    const double h = st.h_space, ht = st.h_time;
    double s = 0.0;
    for (auto [i, wi] : tu)
        for (auto [j, wj] : tv)
            for (auto [k, wk] : tt) {
                PdePoint q = p;
                q.a[0] += i * h;
                q.b[0] += j * h;
                q.t += k * ht;
                s += wi * wj * wk * f(q);
            }
    return s / (std::pow(h, du + dv) * std::pow(ht, dt));
}

ResidualReport dyson_residual(int n, double t, const IntervalUnion& E1, const IntervalUnion& E2,
                              const Stencil& st, DysonVariant variant, const PdeOptions& opt) {
    if (n < 1 || n > 8) throw DomainError("dyson_residual: n must lie in [1, 8]");
    if (!(t >= 0.05)) throw DomainError("dyson_residual: t must be >= 0.05");
    if (E1.endpoints().empty() || E2.endpoints().empty())
        throw DomainError("dyson_residual: each set needs finite endpoints");
    const IntervalUnion S1 = variant == DysonVariant::direct ? E1 : E1.complement();
    const IntervalUnion S2 = variant == DysonVariant::direct ? E2 : E2.complement();
    const ProcessParams params{n};
    const int order = center_order(Process::dyson, params, t, S1, S2, opt);

    auto run = [&](const Stencil& s) {
        FredholmConfig cfg = opt.fredholm;
        cfg.fixed_order = order;
        Field base = [=](const PdePoint& p) {
            return std::log(joint_probability(Process::dyson, params, 0.0, p.t, S1.with_endpoints(p.a),
                                              S2.with_endpoints(p.b), cfg)
                                .value);
        };
        const PdePoint c{E1.endpoints(), E2.endpoints(), t};
        return two_phase(base, [&](const Field& G, bool final) {
            const Field A1G = apply_operator(OperatorKind::A1, G, s);
            const Field B1G = apply_operator(OperatorKind::B1, G, s);
            const Field N1 = apply_operator(OperatorKind::B2, A1G, s);
            const Field N2 = apply_operator(OperatorKind::A2, B1G, s);
            const Field B1A1G = apply_operator(OperatorKind::B1, A1G, s);
            const Field A1B1G = apply_operator(OperatorKind::A1, B1G, s);
            const double nn = 2.0 * n;
            const Field D1 = [=](const PdePoint& p) { return B1A1G(p) + nn * exp_neg(p.t); };
            const Field D2 = [=](const PdePoint& p) { return A1B1G(p) + nn * exp_neg(p.t); };
            const Field Q1 = [=](const PdePoint& p) { return N1(p) / D1(p); };
            const Field Q2 = [=](const PdePoint& p) { return N2(p) / D2(p); };
            const double d1 = D1(c), d2 = D2(c);
            check_denominator(d1, s.h_space, opt.noise_floor, final, "B1 A1 G + 2nc");
            check_denominator(d2, s.h_space, opt.noise_floor, final, "A1 B1 G + 2nc");
            const double lhs = apply_operator(OperatorKind::A1, Q1, s)(c);
            const double rhs = apply_operator(OperatorKind::B1, Q2, s)(c);
            const std::vector<double> terms = {
                apply_operator(OperatorKind::A1, N1, s)(c) / d1,
                N1(c) * apply_operator(OperatorKind::A1, D1, s)(c) / (d1 * d1),
                apply_operator(OperatorKind::B1, N2, s)(c) / d2,
                N2(c) * apply_operator(OperatorKind::B1, D2, s)(c) / (d2 * d2)};
            return ResidualReport::from_terms(lhs, rhs, terms);
        });
    };
    return with_richardson(st, run);
}

ResidualReport airy_residual(double t, double u, double v, const Stencil& st, AiryForm form,
                             const PdeOptions& opt) {
    if (!(t >= 0.2)) throw DomainError("airy_residual: t must be >= 0.2");
    if (!(u >= -3.0 && u <= 2.0 && v >= -3.0 && v <= 2.0))
        throw DomainError("airy_residual: (u, v) must lie in [-3, 2]^2");
    const int order = center_order(Process::airy, {}, t, IntervalUnion::below(u), IntervalUnion::below(v), opt);
    FredholmConfig cfg = opt.fredholm;
    cfg.fixed_order = order;
    const Field Gbase = [=](const PdePoint& p) {
        return std::log(joint_probability(Process::airy, {}, 0.0, p.t, IntervalUnion::below(p.a[0]),
                                          IntervalUnion::below(p.b[0]), cfg)
                            .value);
    };

    auto run = [&](const Stencil& s) -> ResidualReport {
        switch (form) {
            case AiryForm::explicit_form: {
                const PdePoint c{{u}, {v}, t};
                return two_phase(Gbase, [&](const Field& G, bool) {
                    auto P = [&](int a, int b, int k) { return mixed_partial(G, c, a, b, k, s); };
                    const double Guu = P(2, 0, 0), Gvv = P(0, 2, 0), Guv = P(1, 1, 0);
                    const double Guuu = P(3, 0, 0), Gvvv = P(0, 3, 0);
                    const double Guuv = P(2, 1, 0), Guvv = P(1, 2, 0);
                    const double Guut = P(2, 0, 1), Gvvt = P(0, 2, 1);
                    const double t2 = t * t;
                    const double lhs = t * (Guut - Gvvt);
                    const double rhs = Guuv * (2 * Gvv + Guv - Guu + u - v - t2) -
                                       Guvv * (2 * Guu + Guv - Gvv - u + v - t2) + Guuu * (Guv + Gvv) -
                                       Gvvv * (Guu + Guv);
                    const std::vector<double> terms = {
                        t * Guut,    t * Gvvt,    2 * Guuv * Gvv, Guuv * Guv,  Guuv * Guu,  Guuv * u,
                        Guuv * v,    Guuv * t2,   2 * Guvv * Guu, Guvv * Guv,  Guvv * Gvv,  Guvv * u,
                        Guvv * v,    Guvv * t2,   Guuu * Guv,     Guuu * Gvv,  Gvvv * Guu,  Gvvv * Guv};
                    return ResidualReport::from_terms(lhs, rhs, terms);
                });
            }
            case AiryForm::xy: {
                // H(t; x, y) = G(t; (x + y)/2, (y - x)/2)
                const Field Hbase = [Gbase](const PdePoint& p) {
                    const double x = p.a[0], y = p.b[0];
                    return Gbase(PdePoint{{0.5 * (x + y)}, {0.5 * (y - x)}, p.t});
                };
                const double x = u - v, y = u + v;
                const PdePoint c{{x}, {y}, t};
                return two_phase(Hbase, [&](const Field& H, bool) {
                    auto P = [&](int a, int b, int k) { return mixed_partial(H, c, a, b, k, s); };
                    const double Htxy = P(1, 1, 1);
                    const double Hxxx = P(3, 0, 0), Hxyy = P(1, 2, 0), Hxxy = P(2, 1, 0), Hyyy = P(0, 3, 0);
                    const double Hxy = P(1, 1, 0), Hyy = P(0, 2, 0);
                    const double t2 = t * t;
                    const double lhs = 2 * t * Htxy;
                    const double rhs = t2 * Hxxx - t2 * Hxyy - x * Hxxy + x * Hyyy + 8 * (Hyy * Hxyy - Hxy * Hyyy);
                    const std::vector<double> terms = {lhs,      t2 * Hxxx,      t2 * Hxyy,      x * Hxxy,
                                                       x * Hyyy, 8 * Hyy * Hxyy, 8 * Hxy * Hyyy};
                    return ResidualReport::from_terms(lhs, rhs, terms);
                });
            }
            case AiryForm::wronskian: {
                const PdePoint c{{u}, {v}, t};
                return two_phase(Gbase, [&](const Field& G, bool) {
                    const auto Lu = make_operator(OperatorKind::Lu), Lv = make_operator(OperatorKind::Lv);
                    const auto Eu = make_operator(OperatorKind::Eu), Ev = make_operator(OperatorKind::Ev);
                    const auto X = Lu + Lv, Y = Lu - Lv;
                    const Field LuEvG = apply_operator(Lu, apply_operator(Ev, G, s), s);
                    const Field LvEuG = apply_operator(Lv, apply_operator(Eu, G, s), s);
                    const Field LuLvG = apply_operator(Lu, apply_operator(Lv, G, s), s);
                    const Field f = apply_operator(X, apply_operator(Y, G, s), s);  // (Lu^2 - Lv^2) G
                    const Field g = apply_operator(X, apply_operator(X, G, s), s);  // (Lu + Lv)^2 G
                    const double a1 = apply_operator(X, LuEvG, s)(c);
                    const double a2 = apply_operator(X, LvEuG, s)(c);
                    const double a3 = t * t * apply_operator(Lu, LuLvG, s)(c);
                    const double a4 = t * t * apply_operator(Lv, LuLvG, s)(c);
                    const double fx = apply_operator(X, f, s)(c), gx = apply_operator(X, g, s)(c);
                    const double fc = f(c), gc = g(c);
                    const double lhs = a1 - a2 + a3 - a4;
                    const double rhs = 0.5 * (gc * fx - fc * gx);
                    return ResidualReport::from_terms(lhs, rhs, {a1, a2, a3, a4, 0.5 * gc * fx, 0.5 * fc * gx});
                });
            }
        }
        throw DomainError("airy_residual: unknown form");
    };
    return with_richardson(st, run);
}

ResidualReport sine_residual(double t, const IntervalUnion& E1, const IntervalUnion& E2, const Stencil& st,
                             SineForm form, const PdeOptions& opt) {
    if (!(t >= 0.2)) throw DomainError("sine_residual: t must be >= 0.2");
    if (!E1.is_compact() || !E2.is_compact() || E1.is_empty() || E2.is_empty())
        throw DomainError("sine_residual: E1, E2 must be nonempty and compact");
    const int order = center_order(Process::sine, {}, t, E1, E2, opt);
    FredholmConfig cfg = opt.fredholm;
    cfg.fixed_order = order;
    const Field Gbase = [=](const PdePoint& p) {
        return std::log(joint_probability(Process::sine, {}, 0.0, p.t, E1.with_endpoints(p.a),
                                          E2.with_endpoints(p.b), cfg)
                            .value);
    };

    auto run = [&](const Stencil& s) -> ResidualReport {
        if (form == SineForm::general) {
            const PdePoint c{E1.endpoints(), E2.endpoints(), t};
            return two_phase(Gbase, [&](const Field& G, bool final) {
                return sine_type(G, c, make_operator(OperatorKind::Lu), make_operator(OperatorKind::Lv),
                                 make_operator(OperatorKind::Eu), make_operator(OperatorKind::Ev), s,
                                 opt.noise_floor, final);
            });
        }
        // single intervals [x1 + x2, x1 - x2], [y1 + y2, y1 - y2]
        if (E1.endpoints().size() != 2 || E2.endpoints().size() != 2)
            throw DomainError("sine_residual: the single-interval form needs one interval per time");
        const Field Hbase = [Gbase](const PdePoint& p) {
            return Gbase(PdePoint{{p.a[0] + p.a[1], p.a[0] - p.a[1]}, {p.b[0] + p.b[1], p.b[0] - p.b[1]}, p.t});
        };
        const auto& e1 = E1.endpoints();
        const auto& e2 = E2.endpoints();
        const PdePoint c{{0.5 * (e1[0] + e1[1]), 0.5 * (e1[0] - e1[1])}, {0.5 * (e2[0] + e2[1]), 0.5 * (e2[0] - e2[1])}, t};
        return two_phase(Hbase, [&](const Field& H, bool final) {
            return sine_type(H, c, coordinate(0, 0), coordinate(1, 0), euler_split(0), euler_split(1), s,
                             opt.noise_floor, final);
        });
    };
    return with_richardson(st, run);
}

std::vector<ResidualReport> residual_ladder(const std::function<ResidualReport(const Stencil&)>& run,
                                            const Stencil& st, int levels) {
    if (levels < 1) throw DomainError("residual_ladder: levels must be >= 1");
    std::vector<ResidualReport> out;
    Stencil s = st;
    for (int i = 0; i < levels; ++i) {
        out.push_back(run(s));
        s = s.scaled(0.5);
    }
    return out;
}

double script_l(const std::function<double(double, double)>& f, double u, double v, double h, int order) {
    auto mixed = [&](int du, int dv) {
        double s = 0.0;
        for (auto [i, wi] : taps(du, order))
            for (auto [j, wj] : taps(dv, order)) s += wi * wj * f(u + i * h, v + j * h);
        return s / std::pow(h, du + dv);
    };
    return mixed(2, 1) - mixed(1, 2);
}

double source_g_form(const TracyWidomCurve& c, double u, double v) {
    const TracyWidomPoint a = c.at(u), b = c.at(v);
    auto g4 = [](const TracyWidomPoint& p) {
        const double qpp = p.u * p.q + 2.0 * p.q * p.q * p.q;
        return -2.0 * p.q_prime * p.q_prime - 2.0 * p.q * qpp;
    };
    const double u1 = a.g_prime, u2 = a.g_second, u3 = a.g_third, u4 = g4(a);
    const double v1 = b.g_prime, v2 = b.g_second, v3 = b.g_third, v4 = g4(b);
    return 2.0 * (u3 * v2 * v2 - v3 * u2 * u2) + u3 * v3 * (u1 - v1) +
           0.5 * (u4 * 2.0 * v1 * v2 - v4 * 2.0 * u1 * u2) + (u3 * v2 + v3 * u2) * (u - v) +
           2.0 * (u3 * v1 - v3 * u1);
}

double source_q_form(const TracyWidomCurve& c, double u, double v) {
    const TracyWidomPoint a = c.at(u), b = c.at(v);
    auto half = [](const TracyWidomPoint& x, const TracyWidomPoint& y) {
        const double qx = x.q, px = x.q_prime, qxx = x.u * x.q + 2.0 * qx * qx * qx;
        const double qy = y.q, py = y.q_prime, qyy = y.u * y.q + 2.0 * qy * qy * qy;
        return 2.0 * (2.0 * qx * px * (qy * py + 1.0) - qx * qxx * qy * qy - px * px * qy * qy) * y.g_prime +
               2.0 * qx * (qx * py * qyy + px * qy * qyy - 2.0 * qx * qy * qy * qy * py);
    };
    // The printed expression carries the opposite overall sign to the
    // g-derivative form; L h4 equals its negative.
    return -(half(a, b) - half(b, a));
}

IdentityReport null_space_and_source_checks(const TracyWidomCurve& curve) {
    if (curve.u_min() > -3.0 || curve.u_max() < 2.0)
        throw DomainError("null_space_and_source_checks: curve must span [-3, 2]");
    IdentityReport rep;
    const std::vector<std::function<double(double, double)>> polys = {
        [](double u, double v) { return u * u + v * v * v + (u + v) * (u + v); },
        [](double u, double v) { return u * u * u - 2.0 * v + 0.5 * std::pow(u + v, 3); },
        [](double u, double v) { return 3.0 * std::pow(u, 3) + std::pow(v, 2) - std::pow(u + v, 3) + 1.0; },
    };
    const double grid[3] = {-2.0, -1.0, 0.5};
    for (const auto& r : polys)
        for (double u : grid)
            for (double v : grid) rep.null_space_max = std::max(rep.null_space_max, std::abs(script_l(r, u, v, 0.1, 4)));

    const auto gg = [&](double u, double v) { return curve.at(u).g_prime * curve.at(v).g_prime; };
    const auto h4 = [&](double u, double v) { return h4_function(curve, u, v); };
    const double pts[3] = {-2.0, -1.0, 0.0};
    for (double u : pts)
        for (double v : pts) {
            const TracyWidomPoint a = curve.at(u), b = curve.at(v);
            const double exact = a.g_third * b.g_second - b.g_third * a.g_second;
            rep.lg_identity_max = std::max(rep.lg_identity_max, std::abs(script_l(gg, u, v, 0.02, 4) - exact));
            const double src = source_q_form(curve, u, v);
            rep.source_identity_max = std::max(rep.source_identity_max, std::abs(script_l(h4, u, v, 0.02, 4) - src));
            rep.source_forms_max = std::max(rep.source_forms_max, std::abs(source_g_form(curve, u, v) - src));
        }
    return rep;
}

}  // namespace dasp
