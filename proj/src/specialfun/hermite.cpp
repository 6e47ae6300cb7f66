#include <algorithm>
#include <cmath>
#include <string>

#include "dasp/errors.hpp"
#include "dasp/specialfun.hpp"

namespace dasp {
namespace {

constexpr double kPiMinusQuarter = 0.7511255444649425;
// Rescale the unweighted recurrence when it grows past this; the Gaussian
// factor is carried separately in log form so phi_0 never underflows.
constexpr double kBig = 1e150;
constexpr double kLogBig = 345.38776394910684;  // ln(1e150)

}  // namespace

void hermite_phi_fill(int k_max, double x, double* out) {
    if (k_max < 0) throw DomainError("hermite_phi_row: negative k_max");
    if (k_max > 1000000) throw DomainError("hermite_phi_row: k_max above 1e6");
    if (!std::isfinite(x)) throw DomainError("hermite_phi_row: non-finite x");

    double log_scale = -0.5 * x * x;
    double factor = std::exp(log_scale);
    double prev = 0.0;
    double cur = kPiMinusQuarter;
    out[0] = cur * factor;
    for (int k = 0; k < k_max; ++k) {
        const double kp1 = k + 1.0;
        const double next = x * std::sqrt(2.0 / kp1) * cur - std::sqrt(k / kp1) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > kBig) {
            cur /= kBig;
            prev /= kBig;
            log_scale += kLogBig;
            factor = std::exp(log_scale);
        }
        out[k + 1] = cur * factor;
    }
}

HermiteRow hermite_phi_row(int k_max, double x) {
    if (k_max < 0) throw DomainError("hermite_phi_row: negative k_max");
    HermiteRow row;
    row.k_max = k_max;
    row.x = x;
    row.values.resize(static_cast<std::size_t>(k_max) + 1);
    hermite_phi_fill(k_max, x, row.values.data());
    return row;
}

double hermite_max_abs(int k) {
    if (k < 0) throw DomainError("hermite_max_abs: negative index");
    const double edge = std::sqrt(2.0 * k + 1.0) + 3.0;
    const int steps = static_cast<int>(std::ceil(edge / 0.05));
    std::vector<double> buf(static_cast<std::size_t>(k) + 1);
    double best = 0.0;
    // |phi_k| is even in x
    for (int i = 0; i <= steps; ++i) {
        hermite_phi_fill(k, i * 0.05, buf.data());
        best = std::max(best, std::abs(buf[k]));
    }
    return best;
}

double edge_asymptotic_check(int n, int k, double u) {
    if (n < 10) throw DomainError("edge_asymptotic_check: n must be >= 10");
    if (!std::isfinite(u)) throw DomainError("edge_asymptotic_check: non-finite u");
    const double nd = n;
    if (std::abs(static_cast<double>(k)) > std::cbrt(nd) * std::log(nd))
        throw DomainError("edge_asymptotic_check: k outside |k| <= n^{1/3} log n");
    const double x = std::sqrt(2.0 * nd + 1.0) + u / (std::sqrt(2.0) * std::pow(nd, 1.0 / 6.0));
    std::vector<double> buf(static_cast<std::size_t>(n - k) + 1);
    hermite_phi_fill(n - k, x, buf.data());
    const double scale = std::pow(2.0, 0.25) * std::pow(nd, -1.0 / 12.0);
    const double ai = airy_ai_pair(u + k / std::cbrt(nd)).ai;
    return std::abs(buf[n - k] - scale * ai) / (scale * std::max(std::abs(ai), 1e-3));
}

}  // namespace dasp
