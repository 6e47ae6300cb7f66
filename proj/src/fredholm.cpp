#include "dasp/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dasp/errors.hpp"
#include "dasp/specialfun.hpp"

namespace dasp {
namespace {

double hermite_diagonal(int n, double x, std::vector<double>& buf) {
    buf.resize(static_cast<std::size_t>(n));
    hermite_phi_fill(n - 1, x, buf.data());
    double s = 0.0;
    for (double v : buf) s += v * v;
    return s;
}

// Walks from `start` in direction `dir` until the equal-time diagonal drops
// below the cutoff.
double hermite_scan(int n, double start, double dir, const DiscretizeOptions& opt) {
    std::vector<double> buf;
    double x = start;
    for (int k = 0; k <= opt.hermite_scan_limit; ++k) {
        if (hermite_diagonal(n, x, buf) < opt.hermite_cutoff) return x;
        x += dir * opt.hermite_scan_step;
    }
    throw AccuracyError("discretize: Hermite tail scan exceeded its step bound",
                        hermite_diagonal(n, x, buf));
}

void add_piece(DiscretizedDomain& d, double lo, double hi, int order, bool lo_t, bool hi_t) {
    if (!(lo < hi)) return;
    const QuadratureRule r = gauss_legendre(order, lo, hi);
    d.nodes.insert(d.nodes.end(), r.nodes.begin(), r.nodes.end());
    d.weights.insert(d.weights.end(), r.weights.begin(), r.weights.end());
    d.pieces.push_back({lo, hi, order, lo_t, hi_t});
}

Eigen::MatrixXd weighted(const ExtendedKernelSpec& s, const DiscretizedDomain& a,
                         const DiscretizedDomain& b, Exec exec) {
    Eigen::MatrixXd K = kernel_matrix(s, a.nodes, b.nodes, exec);
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
        const double wj = std::sqrt(b.weights[j]);
        for (Eigen::Index i = 0; i < K.rows(); ++i) K(i, j) *= std::sqrt(a.weights[i]) * wj;
    }
    return K;
}

double det_identity_minus(const Eigen::MatrixXd& M) {
    if (M.rows() == 0) return 1.0;
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(M.rows(), M.cols()) - M;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double d = lu.determinant();
    if (!std::isfinite(d)) throw NumericalError("fredholm: non-finite determinant");
    return d;
}

void check_config(const FredholmConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw DomainError("fredholm: tol must be positive");
    if (cfg.fixed_order == 0 && (cfg.initial_order < 4 || cfg.max_order < cfg.initial_order))
        throw DomainError("fredholm: need 4 <= initial_order <= max_order");
    if (cfg.fixed_order != 0 && cfg.fixed_order < 4) throw DomainError("fredholm: order must be >= 4");
}

void check_times(const std::optional<IntervalUnion>& E2, double t1, double t2) {
    if (!std::isfinite(t1) || !std::isfinite(t2)) throw DomainError("fredholm: non-finite time");
    if (E2 && !(t1 < t2))
        throw DomainError("fredholm: two-time calls need t1 < t2 (equal times use the one-time path)");
}

// Runs `eval(order)` with doubling until two successive values agree.
template <class F>
FredholmResult refine(const FredholmConfig& cfg, F&& eval, double accept) {
    if (cfg.fixed_order > 0) return {eval(cfg.fixed_order), cfg.fixed_order, 0.0};
    int m = cfg.initial_order;
    double prev = eval(m);
    double cur = prev;
    while (2 * m <= cfg.max_order) {
        m *= 2;
        cur = eval(m);
        const double diff = std::abs(cur - prev);
        if (diff < accept) return {cur, m, diff};
        if (2 * m <= cfg.max_order) prev = cur;
    }
    throw AccuracyError("fredholm: refinement did not converge (last two values " + std::to_string(prev) +
                            ", " + std::to_string(cur) + ")",
                        std::abs(cur - prev));
}

}  // namespace

const char* process_name(Process p) {
    switch (p) {
        case Process::dyson: return "dyson";
        case Process::airy: return "airy";
        case Process::sine: return "sine";
    }
    return "?";
}

IntervalUnion restriction_set(Process process, const IntervalUnion& E) {
    if (process == Process::sine) {
        if (!E.is_compact()) throw DomainError("restriction_set: Sine events need compact E");
        return E;
    }
    return E.complement();
}

double DiscretizedDomain::total_length() const {
    double s = 0.0;
    for (const auto& p : pieces) s += p.hi - p.lo;
    return s;
}

DiscretizedDomain discretize(const ExtendedKernelSpec& spec, const IntervalUnion& R, int order,
                             const DiscretizeOptions& opt) {
    if (order < 4) throw DomainError("discretize: order must be >= 4");
    DiscretizedDomain d;
    for (auto [lo, hi] : R.pieces()) {
        bool lo_t = false, hi_t = false;
        if (std::isinf(lo)) {
            if (spec.kind != KernelKind::hermite)
                throw DomainError("discretize: restriction set unbounded below is not supported for this kernel");
            lo = hermite_scan(spec.n, std::isinf(hi) ? 0.0 : std::min(hi, 0.0), -1.0, opt);
            lo_t = true;
        }
        if (std::isinf(hi)) {
            if (spec.kind == KernelKind::sine) throw DomainError("discretize: Sine domains must be compact");
            if (spec.kind == KernelKind::airy) {
                hi = lo + opt.airy_tail;
            } else {
                hi = hermite_scan(spec.n, std::max(lo, 0.0), 1.0, opt);
            }
            hi_t = true;
        }
        add_piece(d, lo, hi, order, lo_t, hi_t);
    }
    return d;
}

Eigen::MatrixXd BlockOperator::assembled() const {
    const Eigen::Index a = size1(), b = size2();
    Eigen::MatrixXd M(a + b, a + b);
    if (a) M.topLeftCorner(a, a) = m11;
    if (b) M.bottomRightCorner(b, b) = m22;
    if (a && b) {
        M.topRightCorner(a, b) = m12;
        M.bottomLeftCorner(b, a) = m21;
    }
    return M;
}

BlockOperator assemble_block_operator(const ExtendedKernelSpec& s11, const ExtendedKernelSpec& s12,
                                      const ExtendedKernelSpec& s21, const ExtendedKernelSpec& s22,
                                      const DiscretizedDomain& d1, const DiscretizedDomain& d2, Exec exec) {
    BlockOperator B;
    B.m11 = weighted(s11, d1, d1, exec);
    B.m22 = weighted(s22, d2, d2, exec);
    if (!d1.empty() && !d2.empty()) {
        B.m12 = weighted(s12, d1, d2, exec);
        B.m21 = weighted(s21, d2, d1, exec);
    } else {
        B.m12.resize(static_cast<Eigen::Index>(d1.size()), static_cast<Eigen::Index>(d2.size()));
        B.m21.resize(static_cast<Eigen::Index>(d2.size()), static_cast<Eigen::Index>(d1.size()));
    }
    return B;
}

double block_fredholm_det(const ExtendedKernelSpec& s11, const ExtendedKernelSpec& s12,
                          const ExtendedKernelSpec& s21, const ExtendedKernelSpec& s22,
                          const DiscretizedDomain& d1, const DiscretizedDomain& d2, Exec exec) {
    if (d1.empty() && d2.empty()) return 1.0;
    return det_identity_minus(assemble_block_operator(s11, s12, s21, s22, d1, d2, exec).assembled());
}

std::array<ExtendedKernelSpec, 4> process_specs(Process process, const ProcessParams& params, double t1,
                                                double t2, double kernel_tol) {
    auto make = [&](double a, double b) {
        switch (process) {
            case Process::dyson: return ExtendedKernelSpec::hermite(params.n, a, b, kernel_tol);
            case Process::airy: return ExtendedKernelSpec::airy(a, b, kernel_tol);
            case Process::sine: return ExtendedKernelSpec::sine(a, b, kernel_tol);
        }
        throw DomainError("unknown process");
    };
    return {make(t1, t1), make(t1, t2), make(t2, t1), make(t2, t2)};
}

FredholmResult joint_probability(Process process, const ProcessParams& params, double t1, double t2,
                                 const IntervalUnion& E1, const std::optional<IntervalUnion>& E2,
                                 const FredholmConfig& cfg) {
    check_config(cfg);
    check_times(E2, t1, t2);
    if (process == Process::dyson && params.n < 1) throw DomainError("joint_probability: Dyson needs n >= 1");
    const IntervalUnion R1 = restriction_set(process, E1);
    const IntervalUnion R2 = E2 ? restriction_set(process, *E2) : IntervalUnion::empty();
    const auto specs = process_specs(process, params, t1, E2 ? t2 : t1, cfg.kernel_tol);
    if (R1.is_empty() && R2.is_empty()) return {1.0, 0, 0.0};

    auto eval = [&](int order) {
        const DiscretizedDomain d1 = discretize(specs[0], R1, order, cfg.discretize);
        const DiscretizedDomain d2 = discretize(specs[3], R2, order, cfg.discretize);
        return block_fredholm_det(specs[0], specs[1], specs[2], specs[3], d1, d2, cfg.exec);
    };
    FredholmResult r = refine(cfg, eval, cfg.tol);
    constexpr double eps = 1e-8;
    if (r.value < -eps || r.value > 1.0 + eps)
        throw AccuracyError("joint_probability: determinant " + std::to_string(r.value) + " outside [0, 1]",
                            r.value < 0 ? -r.value : r.value - 1.0);
    r.value = std::clamp(r.value, 0.0, 1.0);
    return r;
}

FredholmResult resolvent_logderiv(Process process, const ProcessParams& params, double t1, double t2,
                                  const IntervalUnion& E1, const std::optional<IntervalUnion>& E2,
                                  int endpoint_index, const FredholmConfig& cfg) {
    check_config(cfg);
    check_times(E2, t1, t2);
    const std::size_t n1 = E1.endpoints().size();
    const std::size_t n2 = E2 ? E2->endpoints().size() : 0;
    if (endpoint_index < 1 || static_cast<std::size_t>(endpoint_index) > n1 + n2)
        throw DomainError("resolvent_logderiv: endpoint_index out of range");
    const int block = static_cast<std::size_t>(endpoint_index) <= n1 ? 0 : 1;
    const double p = block == 0 ? E1.endpoints()[endpoint_index - 1] : E2->endpoints()[endpoint_index - 1 - n1];

    const IntervalUnion R1 = restriction_set(process, E1);
    const IntervalUnion R2 = E2 ? restriction_set(process, *E2) : IntervalUnion::empty();
    const IntervalUnion& Rb = block == 0 ? R1 : R2;
    double sign = 0.0;
    for (auto [lo, hi] : Rb.pieces()) {
        if (lo == p) sign = 1.0;
        if (hi == p) sign = -1.0;
    }
    if (sign == 0.0) throw DomainError("resolvent_logderiv: endpoint is not a boundary of the domain");
    const auto specs = process_specs(process, params, t1, E2 ? t2 : t1, cfg.kernel_tol);
    auto spec = [&](int a, int b) -> const ExtendedKernelSpec& { return specs[2 * a + b]; };

    auto eval = [&](int order) {
        const DiscretizedDomain d[2] = {discretize(specs[0], R1, order, cfg.discretize),
                                        discretize(specs[3], R2, order, cfg.discretize)};
        const BlockOperator B = assemble_block_operator(specs[0], specs[1], specs[2], specs[3], d[0], d[1], cfg.exec);
        const Eigen::MatrixXd M = B.assembled();
        const Eigen::Index N = M.rows();
        Eigen::VectorXd row(N), col(N);
        Eigen::Index off = 0;
        for (int beta = 0; beta < 2; ++beta) {
            const Eigen::Index m = static_cast<Eigen::Index>(d[beta].size());
            if (m == 0) continue;
            const Eigen::MatrixXd r = kernel_matrix(spec(block, beta), {p}, d[beta].nodes, cfg.exec);
            const Eigen::MatrixXd c = kernel_matrix(spec(beta, block), d[beta].nodes, {p}, cfg.exec);
            for (Eigen::Index i = 0; i < m; ++i) {
                const double sw = std::sqrt(d[beta].weights[i]);
                row(off + i) = r(0, i) * sw;
                col(off + i) = c(i, 0) * sw;
            }
            off += m;
        }
        const double kpp = kernel_matrix(spec(block, block), {p}, {p}, cfg.exec)(0, 0);
        if (N == 0) return sign * kpp;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(N, N) - M);
        if (!std::isfinite(lu.determinant()) || std::abs(lu.determinant()) < 1e-300)
            throw NumericalError("resolvent_logderiv: I - K is numerically singular");
        const Eigen::VectorXd y = lu.solve(col);
        return sign * (kpp + row.dot(y));
    };
    return refine(cfg, eval, 10.0 * cfg.tol);
}

FredholmResult two_time_ratio_factorized(double t, double u, double v, const FredholmConfig& cfg) {
    check_config(cfg);
    if (!(t >= 1.0)) throw DomainError("two_time_ratio_factorized: intended for t >= 1");
    const auto s00 = ExtendedKernelSpec::airy(0.0, 0.0, cfg.kernel_tol);
    const auto s0t = ExtendedKernelSpec::airy(0.0, t, cfg.kernel_tol);
    const auto st0 = ExtendedKernelSpec::airy(t, 0.0, cfg.kernel_tol);
    auto eval = [&](int order) {
        const DiscretizedDomain d1 = discretize(s00, IntervalUnion::above(u), order, cfg.discretize);
        const DiscretizedDomain d2 = discretize(s00, IntervalUnion::above(v), order, cfg.discretize);
        const Eigen::MatrixXd M11 = weighted(s00, d1, d1, cfg.exec);
        const Eigen::MatrixXd M22 = weighted(s00, d2, d2, cfg.exec);
        const Eigen::MatrixXd M12 = weighted(s0t, d1, d2, cfg.exec);
        const Eigen::MatrixXd M21 = weighted(st0, d2, d1, cfg.exec);
        const auto I1 = Eigen::MatrixXd::Identity(M11.rows(), M11.cols());
        const auto I2 = Eigen::MatrixXd::Identity(M22.rows(), M22.cols());
        Eigen::PartialPivLU<Eigen::MatrixXd> lu1(I1 - M11), lu2(I2 - M22);
        if (std::abs(lu1.determinant()) < 1e-300 || std::abs(lu2.determinant()) < 1e-300)
            throw NumericalError("two_time_ratio_factorized: one-time resolvent is singular");
        const Eigen::MatrixXd A = lu1.solve(M12);
        const Eigen::MatrixXd B = lu2.solve(M21);
        return det_identity_minus(A * B);
    };
    return refine(cfg, eval, cfg.tol);
}

double airy_offdiagonal_norm(double t, double u, double v, int order, const FredholmConfig& cfg) {
    const auto s00 = ExtendedKernelSpec::airy(0.0, 0.0, cfg.kernel_tol);
    const DiscretizedDomain d1 = discretize(s00, IntervalUnion::above(u), order, cfg.discretize);
    const DiscretizedDomain d2 = discretize(s00, IntervalUnion::above(v), order, cfg.discretize);
    const Eigen::MatrixXd M21 = weighted(ExtendedKernelSpec::airy(t, 0.0, cfg.kernel_tol), d2, d1, cfg.exec);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M21);
    return svd.singularValues()(0);
}

}  // namespace dasp
