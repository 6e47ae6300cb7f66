#include "dasp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dasp/errors.hpp"
#include "dasp/specialfun.hpp"

namespace dasp {
namespace {

constexpr double kPi = std::numbers::pi;

// Every branch is a weighted sum of products f_q(x) f_q(y):
//   Hermite  f = phi_k
//   Airy     f = Ai(. + z_q)
//   Sine     f = cos(z_q .), sin(z_q .)  (both carrying the same weight)
// so a kernel matrix is F_x diag(w) F_y^T.
struct Separable {
    KernelKind kind;
    std::vector<double> z;  // Airy/Sine quadrature nodes
    std::vector<double> w;  // weight per feature (Hermite) or per node (Airy/Sine)
    int k_lo = 0;           // Hermite: first feature index
    int features() const {
        if (kind == KernelKind::sine) return 2 * static_cast<int>(z.size());
        return static_cast<int>(w.size());
    }
};

void append_panels(std::vector<double>& z, std::vector<double>& w, double a, double b, double width,
                   int order) {
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width - 1e-12)));
    const double len = (b - a) / panels;
    const QuadratureRule& r = gauss_legendre_unit(order);
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * len;
        for (std::size_t i = 0; i < r.size(); ++i) {
            z.push_back(lo + 0.5 * len * (r.nodes[i] + 1.0));
            w.push_back(0.5 * len * r.weights[i]);
        }
    }
}

// Positive-side window for Airy: smallest integer Z with Ai(m + Z)^2 e^{-Z tau} < tol.
double airy_positive_window(double m, double tau, double tol) {
    for (int z = 1; z <= 400; ++z) {
        if (m + z <= 0.0) continue;
        const double a = airy_ai_pair(m + z).ai;
        if (a * a * std::exp(-z * tau) < tol) return z;
    }
    throw AccuracyError("airy kernel: positive-side window exceeded 400", tol);
}

Separable airy_positive(double tau, double m, const ExtendedKernelSpec& s) {
    Separable out{KernelKind::airy, {}, {}, 0};
    const double zmax = airy_positive_window(m, tau, s.tol) * s.trunc.window_scale;
    std::vector<double> w;
    append_panels(out.z, w, 0.0, zmax, 1.0, s.trunc.airy_positive_order);
    out.w.resize(w.size());
    for (std::size_t q = 0; q < w.size(); ++q) out.w[q] = w[q] * std::exp(-out.z[q] * tau);
    return out;
}

Separable airy_negative(double gap, double m_abs, const ExtendedKernelSpec& s) {
    const auto& tr = s.trunc;
    double zmax = std::min(tr.airy_negative_cap, std::max(tr.airy_negative_min, tr.airy_negative_scale / gap));
    zmax *= tr.window_scale;
    // |Ai(x+z)Ai(y+z)| <= 1/(pi sqrt|x+z|) deep on the oscillatory side
    const double amp = 1.0 / (kPi * std::sqrt(std::max(zmax - m_abs, 1.0)));
    const double tail = amp * std::exp(-zmax * gap) / gap;
    if (tail > s.tol) {
        throw AccuracyError("airy kernel: negative-side truncation bound " + std::to_string(tail) +
                                " exceeds tol (gap too small)",
                            tail);
    }
    Separable out{KernelKind::airy, {}, {}, 0};
    std::vector<double> w;
    // panels shrink with the local oscillation frequency sqrt|z|
    double b = 0.0;
    while (b > -zmax) {
        const double width = std::min(1.0, 8.0 / std::sqrt(std::abs(b) + m_abs + 1.0));
        const double a = std::max(-zmax, b - width);
        append_panels(out.z, w, a, b, width, tr.airy_negative_order);
        b = a;
    }
    out.w.resize(w.size());
    for (std::size_t q = 0; q < w.size(); ++q) out.w[q] = -w[q] * std::exp(out.z[q] * gap);
    return out;
}

Separable sine_positive(double tau, double dmax, const ExtendedKernelSpec& s) {
    Separable out{KernelKind::sine, {}, {}, 0};
    std::vector<double> w;
    const double width = std::min(kPi / 4.0, 2.0 / std::max(dmax, 1e-3));
    append_panels(out.z, w, 0.0, kPi, width, s.trunc.sine_order);
    out.w.resize(w.size());
    for (std::size_t q = 0; q < w.size(); ++q)
        out.w[q] = w[q] * std::exp(0.5 * out.z[q] * out.z[q] * tau) / kPi;
    return out;
}

Separable sine_negative(double gap, double dmax, const ExtendedKernelSpec& s) {
    Separable out{KernelKind::sine, {}, {}, 0};
    const double len = std::sqrt(2.0 * std::log(1.0 / s.tol) / gap) * s.trunc.window_scale;
    std::vector<double> w;
    const double width = std::min(0.5, 2.0 / std::max(dmax, 1e-3));
    append_panels(out.z, w, kPi, kPi + len, width, s.trunc.sine_order);
    out.w.resize(w.size());
    for (std::size_t q = 0; q < w.size(); ++q)
        out.w[q] = -w[q] * std::exp(-0.5 * out.z[q] * out.z[q] * gap) / kPi;
    return out;
}

Separable hermite_form(const ExtendedKernelSpec& s) {
    Separable out{KernelKind::hermite, {}, {}, 0};
    if (s.positive_branch()) {
        const double tau = s.t_i - s.t_j;
        out.k_lo = 0;
        out.w.resize(s.n);
        for (int j = 0; j < s.n; ++j) out.w[j] = std::exp(-(s.n - j) * tau);
    } else {
        const double gap = s.t_j - s.t_i;
        const int M = hermite_negative_terms(s.n, gap, s.tol, s.trunc.window_scale);
        if (M > s.trunc.hermite_max_terms) {
            throw AccuracyError("hermite kernel: series needs more than hermite_max_terms",
                                kHermiteEnvelope * kHermiteEnvelope *
                                    std::exp(-(s.trunc.hermite_max_terms + 1.0) * gap) /
                                    (1.0 - std::exp(-gap)));
        }
        out.k_lo = s.n;
        out.w.resize(static_cast<std::size_t>(M) + 1);
        for (int m = 0; m <= M; ++m) out.w[m] = -std::exp(-m * gap);
    }
    return out;
}

Separable build_form(const ExtendedKernelSpec& s, double lo, double hi) {
    const double dmax = hi - lo;
    const double mabs = std::max(std::abs(lo), std::abs(hi));
    switch (s.kind) {
        case KernelKind::hermite:
            return hermite_form(s);
        case KernelKind::airy:
            return s.positive_branch() ? airy_positive(s.t_i - s.t_j, lo, s)
                                       : airy_negative(s.t_j - s.t_i, mabs, s);
        case KernelKind::sine:
            return s.positive_branch() ? sine_positive(s.t_i - s.t_j, dmax, s)
                                       : sine_negative(s.t_j - s.t_i, dmax, s);
    }
    throw DomainError("unknown kernel kind");
}

// Feature vector of one point, written to out[0..features).
void features(const Separable& f, double x, double* out, std::vector<double>& scratch) {
    switch (f.kind) {
        case KernelKind::hermite: {
            const int kmax = f.k_lo + static_cast<int>(f.w.size()) - 1;
            scratch.resize(static_cast<std::size_t>(kmax) + 1);
            hermite_phi_fill(kmax, x, scratch.data());
            std::copy(scratch.begin() + f.k_lo, scratch.begin() + kmax + 1, out);
            return;
        }
        case KernelKind::airy:
            for (std::size_t q = 0; q < f.z.size(); ++q) out[q] = airy_ai_pair(x + f.z[q]).ai;
            return;
        case KernelKind::sine: {
            const std::size_t nz = f.z.size();
            for (std::size_t q = 0; q < nz; ++q) {
                out[q] = std::cos(f.z[q] * x);
                out[nz + q] = std::sin(f.z[q] * x);
            }
            return;
        }
    }
}

double weight_of(const Separable& f, int feature) {
    if (f.kind == KernelKind::sine) return f.w[feature % f.z.size()];
    return f.w[feature];
}

// Row-major feature matrix for a point list.
std::vector<double> feature_matrix(const Separable& f, const std::vector<double>& xs, Exec exec) {
    const int nf = f.features();
    std::vector<double> F(xs.size() * static_cast<std::size_t>(nf));
    const long n = static_cast<long>(xs.size());
    if (exec == Exec::parallel) {
#pragma omp parallel
        {
            std::vector<double> scratch;
#pragma omp for schedule(static)
            for (long i = 0; i < n; ++i) features(f, xs[i], F.data() + i * nf, scratch);
        }
    } else {
        std::vector<double> scratch;
        for (long i = 0; i < n; ++i) features(f, xs[i], F.data() + i * nf, scratch);
    }
    return F;
}

double pair_sum(const double* a, const double* b, const double* w, int nf) {
    double s = 0.0;
    for (int q = 0; q < nf; ++q) s += a[q] * w[q] * b[q];
    return s;
}

void check_points(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) throw DomainError("kernel: non-finite evaluation point");
}

double sine_equal_time(double x, double y) {
    const double d = x - y;
    if (std::abs(d) < 1e-8) return 1.0 - (kPi * d) * (kPi * d) / 6.0;
    return std::sin(kPi * d) / (kPi * d);
}

}  // namespace

const char* kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::hermite: return "hermite";
        case KernelKind::airy: return "airy";
        case KernelKind::sine: return "sine";
    }
    return "?";
}

ExtendedKernelSpec ExtendedKernelSpec::hermite(int n, double t_i, double t_j, double tol) {
    ExtendedKernelSpec s;
    s.kind = KernelKind::hermite;
    s.n = n;
    s.t_i = t_i;
    s.t_j = t_j;
    s.tol = tol;
    return s;
}

ExtendedKernelSpec ExtendedKernelSpec::airy(double t_i, double t_j, double tol) {
    ExtendedKernelSpec s;
    s.kind = KernelKind::airy;
    s.t_i = t_i;
    s.t_j = t_j;
    s.tol = tol;
    return s;
}

ExtendedKernelSpec ExtendedKernelSpec::sine(double t_i, double t_j, double tol) {
    ExtendedKernelSpec s;
    s.kind = KernelKind::sine;
    s.t_i = t_i;
    s.t_j = t_j;
    s.tol = tol;
    return s;
}

void ExtendedKernelSpec::validate() const {
    if (!std::isfinite(t_i) || !std::isfinite(t_j)) throw DomainError("kernel: non-finite times");
    if (!(tol > 0.0 && tol <= 1e-4)) throw DomainError("kernel: tol must lie in (0, 1e-4]");
    if (kind == KernelKind::hermite && n < 1) throw DomainError("kernel: Hermite needs n >= 1");
    if (!(trunc.window_scale >= 1.0)) throw DomainError("kernel: window_scale must be >= 1");
    if (t_i < t_j && t_j - t_i < trunc.t_min)
        throw BranchError("kernel: t_i < t_j branch needs t_j - t_i >= t_min");
}

int hermite_negative_terms(int n, double gap, double tol, double window_scale) {
    (void)n;
    // |phi| <= envelope, so the dropped tail after M terms is at most
    // envelope^2 e^{-(M+1) gap} / (1 - e^{-gap}).
    const double c2 = kHermiteEnvelope * kHermiteEnvelope;
    const double denom = -std::expm1(-gap);
    const double need = std::log(c2 / (tol * denom)) / gap - 1.0;
    const double m = std::max(0.0, std::ceil(need));
    if (m > 2e9) return 2000000000;
    return static_cast<int>(std::ceil(m * window_scale));
}

double airy_equal_time(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("airy_equal_time: non-finite input");
    if (std::abs(x - y) > 1e-4) {
        const AiryPair a = airy_ai_pair(x), b = airy_ai_pair(y);
        return (a.ai * b.ai_prime - a.ai_prime * b.ai) / (x - y);
    }
    // expansion about the midpoint m with half-gap d; error O(d^4)
    const double m = 0.5 * (x + y), d = 0.5 * (x - y);
    const AiryPair p = airy_ai_pair(m);
    const double a2 = p.ai * p.ai, ap2 = p.ai_prime * p.ai_prime;
    const double diag = ap2 - m * a2;
    const double curv = p.ai * p.ai_prime / 3.0 - (2.0 / 3.0) * (m * m * a2 - m * ap2);
    return diag + d * d * curv;
}

double eval_kernel(const ExtendedKernelSpec& spec, double x, double y) {
    spec.validate();
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("eval_kernel: non-finite point");
    const Separable f = build_form(spec, std::min(x, y), std::max(x, y));
    const int nf = f.features();
    std::vector<double> fx(nf), fy(nf), w(nf), scratch;
    features(f, x, fx.data(), scratch);
    features(f, y, fy.data(), scratch);
    for (int q = 0; q < nf; ++q) w[q] = weight_of(f, q);
    return pair_sum(fx.data(), fy.data(), w.data(), nf);
}

Eigen::MatrixXd kernel_matrix(const ExtendedKernelSpec& spec, const std::vector<double>& xs,
                              const std::vector<double>& ys, Exec exec) {
    spec.validate();
    check_points(xs);
    check_points(ys);
    const long nx = static_cast<long>(xs.size()), ny = static_cast<long>(ys.size());
    Eigen::MatrixXd K(nx, ny);
    if (nx == 0 || ny == 0) return K;

    const bool equal = spec.t_i == spec.t_j;
    if (equal && spec.kind != KernelKind::hermite) {
        auto entry = [&](long i, long j) {
            K(i, j) = spec.kind == KernelKind::airy ? airy_equal_time(xs[i], ys[j])
                                                    : sine_equal_time(xs[i], ys[j]);
        };
        if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
            for (long j = 0; j < ny; ++j)
                for (long i = 0; i < nx; ++i) entry(i, j);
        } else {
            for (long j = 0; j < ny; ++j)
                for (long i = 0; i < nx; ++i) entry(i, j);
        }
        return K;
    }

    double lo = xs[0], hi = xs[0];
    for (double v : xs) lo = std::min(lo, v), hi = std::max(hi, v);
    for (double v : ys) lo = std::min(lo, v), hi = std::max(hi, v);
    const Separable f = build_form(spec, lo, hi);
    const int nf = f.features();
    std::vector<double> w(nf);
    for (int q = 0; q < nf; ++q) w[q] = weight_of(f, q);

    const bool same = xs == ys;
    const std::vector<double> Fx = feature_matrix(f, xs, exec);
    const std::vector<double> Fy = same ? std::vector<double>{} : feature_matrix(f, ys, exec);
    const double* py = same ? Fx.data() : Fy.data();

    auto column = [&](long j) {
        for (long i = 0; i < nx; ++i) K(i, j) = pair_sum(Fx.data() + i * nf, py + j * nf, w.data(), nf);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long j = 0; j < ny; ++j) column(j);
    } else {
        for (long j = 0; j < ny; ++j) column(j);
    }
    return K;
}

LimitComparison limit_compare(LimitTarget target, int n, double t, double s, double u, double v) {
    if (n < 20) throw DomainError("limit_compare: n must be >= 20");
    if (!(std::abs(u) <= 5.0 && std::abs(v) <= 5.0)) throw DomainError("limit_compare: (u, v) outside [-5, 5]^2");
    const double nd = n;
    LimitComparison out;
    if (target == LimitTarget::airy) {
        const double c = std::cbrt(nd);
        const double scale = 1.0 / (std::sqrt(2.0) * std::pow(nd, 1.0 / 6.0));
        const double edge = std::sqrt(2.0 * nd + 1.0);
        const auto hs = ExtendedKernelSpec::hermite(n, t / c, s / c);
        out.scaled_hermite = eval_kernel(hs, edge + u * scale, edge + v * scale) * scale;
        out.limit_value = eval_kernel(ExtendedKernelSpec::airy(t, s), u, v);
    } else {
        const double scale = kPi / std::sqrt(2.0 * nd);
        const double tf = kPi * kPi / (2.0 * nd);
        const auto hs = ExtendedKernelSpec::hermite(n, t * tf, s * tf);
        out.scaled_hermite = eval_kernel(hs, u * scale, v * scale) * scale;
        out.limit_value = std::exp(-0.5 * kPi * kPi * (t - s)) * eval_kernel(ExtendedKernelSpec::sine(t, s), u, v);
    }
    out.abs_error = std::abs(out.scaled_hermite - out.limit_value);
    return out;
}

}  // namespace dasp
