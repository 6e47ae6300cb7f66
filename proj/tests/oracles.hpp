#pragma once
// Reference computations that share no code path with the library.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

struct AiryRow {
    double x, ai, ai_prime;
};

inline std::vector<AiryRow> airy_table(const std::string& path) {
    std::ifstream in(path);
    std::vector<AiryRow> rows;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        AiryRow r{};
        char comma;
        ss >> r.x >> comma >> r.ai >> comma >> r.ai_prime;
        if (ss) rows.push_back(r);
    }
    return rows;
}

/// Legendre P_k(x) by the Bonnet recurrence.
inline double legendre(int k, double x) {
    double p0 = 1.0, p1 = x;
    if (k == 0) return p0;
    for (int j = 1; j < k; ++j) {
        const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

/// Hermite function phi_k by the physicists' polynomial recurrence in long
/// double with an explicit Gaussian factor; fine for k <~ 60, |x| <~ 10.
inline double hermite_function_direct(int k, double x) {
    long double h0 = 1.0L, h1 = 2.0L * x;
    long double hk = k == 0 ? h0 : h1;
    for (int j = 1; j < k; ++j) {
        const long double h2 = 2.0L * x * h1 - 2.0L * j * h0;
        h0 = h1;
        h1 = h2;
        hk = h2;
    }
    long double norm = std::sqrt(std::sqrt(std::numbers::pi_v<long double>));
    for (int j = 1; j <= k; ++j) norm *= std::sqrt(2.0L * j);
    return static_cast<double>(hk * std::exp(-0.5L * x * x) / norm);
}

/// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double eps, int depth = 40) {
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            const double flm = f(lm), frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
                return left + right + (left + right - whole) / 15.0;
            return rec(lo, mid, flo, flm, fmid, left, d - 1) + rec(mid, hi, fmid, frm, fhi, right, d - 1);
        };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), depth);
}

/// int_R e^{z tau} Ai(x+z) Ai(y+z) dz for tau > 0, in closed form.
inline double airy_gaussian_integral(double x, double y, double tau) {
    const double d = x - y;
    return std::exp(tau * tau * tau / 12.0 - 0.5 * (x + y) * tau - d * d / (4.0 * tau)) /
           std::sqrt(4.0 * std::numbers::pi * tau);
}

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic Kolmogorov series).
inline double ks_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
    const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    return std::clamp(p, 0.0, 1.0);
}

/// sup_x |F_emp(x) - F(x)| for a sample against a CDF.
inline double ks_distance(std::vector<double> s, const std::function<double(double)>& cdf) {
    std::sort(s.begin(), s.end());
    double d = 0.0;
    const double n = static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max({d, std::abs((i + 1) / n - f), std::abs(i / n - f)});
    }
    return d;
}

}  // namespace oracle
