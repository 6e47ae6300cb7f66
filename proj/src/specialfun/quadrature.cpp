#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "dasp/errors.hpp"
#include "dasp/specialfun.hpp"

namespace dasp {
namespace {

QuadratureRule build_unit_rule(int m) {
    QuadratureRule r;
    r.nodes.resize(m);
    r.weights.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        // Tricomi's initial guess, then Newton on P_m
        double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                // one more pass for the derivative at the converged node
                p0 = 1.0;
                p1 = x;
                for (int j = 2; j <= m; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m * (x * p1 - p0) / (x * x - 1.0);
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[m - 1 - i] = x;
        r.weights[i] = w;
        r.weights[m - 1 - i] = w;
    }
    if (m % 2 == 1) r.nodes[m / 2] = 0.0;
    return r;
}

}  // namespace

const QuadratureRule& gauss_legendre_unit(int m) {
    if (m <= 0) throw DomainError("gauss_legendre: m must be positive");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[m];
    if (!slot) {
        if (m == 1) {
            slot = std::make_unique<QuadratureRule>(QuadratureRule{{0.0}, {2.0}});
        } else {
            slot = std::make_unique<QuadratureRule>(build_unit_rule(m));
        }
    }
    return *slot;
}

QuadratureRule gauss_legendre(int m, double a, double b) {
    if (m <= 0) throw DomainError("gauss_legendre: m must be positive");
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw DomainError("gauss_legendre: need finite a < b");
    const QuadratureRule& u = gauss_legendre_unit(m);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    QuadratureRule r;
    r.nodes.resize(m);
    r.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        r.nodes[i] = mid + half * u.nodes[i];
        r.weights[i] = half * u.weights[i];
    }
    return r;
}

}  // namespace dasp
