#include "dasp/specialfun.hpp"

#include <array>
#include <cmath>
#include <string>

#include "dasp/errors.hpp"

// Ai on the real line in three regimes:
//   |x| <= 10.125  local Taylor series from tabulated anchors every 0.25,
//                  where the anchors come from the Maclaurin series summed
//                  in binary128 (the double-precision Maclaurin sum cancels
//                  badly for |x| beyond ~5);
//   x > 10.125     the exponentially decaying asymptotic series;
//   x < -10.125    the oscillatory asymptotic series, phase in long double.

namespace dasp {
namespace {

using quad = __float128;

constexpr double kAnchorStep = 0.25;
constexpr int kAnchorHalf = 40;  // anchors at -10, -9.75, ..., 10
constexpr int kAnchorCount = 2 * kAnchorHalf + 1;
constexpr double kSeriesLimit = 10.125;
constexpr int kLocalTerms = 26;

struct Anchor {
    double ai;
    double dai;
};

quad qabs(quad v) { return v < 0 ? -v : v; }

// Ai(0), Ai'(0) split as hi + lo doubles (~34 significant digits).
const quad kAi0 = static_cast<quad>(0.3550280538878172) + static_cast<quad>(2.05233632436212e-17);
const quad kDai0 = static_cast<quad>(-0.2588194037928068) + static_cast<quad>(2.522243111610832e-17);

Anchor maclaurin_anchor(quad x) {
    // y = sum a_k x^k with a_{k+3} = a_k / ((k+3)(k+2)), a_2 = 0.
    quad a[3] = {kAi0, kDai0, 0};
    quad p = 1;  // x^k
    quad val = 0, der = 0;
    int small = 0;
    for (int k = 0; k < 400; ++k) {
        const quad ak = a[k % 3];
        const quad tv = ak * p;
        const quad td = (k + 1 < 400) ? a[(k + 1) % 3] * (k + 1) * p : 0;
        val += tv;
        der += td;
        if (k > 30 && qabs(tv) < 1e-45 && qabs(td) < 1e-45) {
            if (++small >= 3) break;
        } else {
            small = 0;
        }
        // advance a_{k} -> a_{k+3} lazily: slot k%3 now holds a_{k+3}
        a[k % 3] = ak / static_cast<quad>((k + 3) * (k + 2));
        p *= x;
    }
    return {static_cast<double>(val), static_cast<double>(der)};
}

const std::array<Anchor, kAnchorCount>& anchors() {
    static const std::array<Anchor, kAnchorCount> table = [] {
        std::array<Anchor, kAnchorCount> t{};
        for (int j = 0; j < kAnchorCount; ++j) {
            t[j] = maclaurin_anchor(static_cast<quad>((j - kAnchorHalf) * kAnchorStep));
        }
        return t;
    }();
    return table;
}

AiryPair taylor_local(double x) {
    int j = static_cast<int>(std::lround(x / kAnchorStep));
    if (j < -kAnchorHalf) j = -kAnchorHalf;
    if (j > kAnchorHalf) j = kAnchorHalf;
    const double c = j * kAnchorStep;
    const double h = x - c;
    const Anchor& an = anchors()[j + kAnchorHalf];

    // y'' = (c + h) y  =>  (k+2)(k+1) b_{k+2} = c b_k + b_{k-1}
    double bkm1 = 0.0, bk = an.ai, bk1 = an.dai;
    double val = bk + bk1 * h;
    double der = bk1;
    double hk = 1.0;  // h^k
    for (int k = 0; k < kLocalTerms; ++k) {
        const double bk2 = (c * bk + bkm1) / ((k + 2.0) * (k + 1.0));
        const double hk1 = hk * h;
        der += (k + 2.0) * bk2 * hk1;
        val += bk2 * hk1 * h;
        bkm1 = bk;
        bk = bk1;
        bk1 = bk2;
        hk = hk1;
    }
    return {x, val, der};
}

// u_k, v_k of the asymptotic expansions.
struct AsymCoeffs {
    static constexpr int kCount = 40;
    std::array<double, kCount> u{}, v{};
    AsymCoeffs() {
        u[0] = 1.0;
        v[0] = 1.0;
        for (int k = 1; k < kCount; ++k) {
            u[k] = u[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
                   ((2.0 * k - 1.0) * 216.0 * k);
            v[k] = -u[k] * (6.0 * k + 1.0) / (6.0 * k - 1.0);
        }
    }
};

const AsymCoeffs& coeffs() {
    static const AsymCoeffs c;
    return c;
}

constexpr double kInvSqrtPi = 0.56418958354775628694807945156077;

AiryPair positive_asymptotic(double x) {
    const double zeta = (2.0 / 3.0) * x * std::sqrt(x);
    const double x14 = std::sqrt(std::sqrt(x));
    const auto& c = coeffs();
    double su = 0.0, sv = 0.0, zp = 1.0, sign = 1.0;
    double last = 1e300;
    for (int k = 0; k < AsymCoeffs::kCount; ++k) {
        const double tu = sign * c.u[k] * zp;
        const double tv = sign * c.v[k] * zp;
        if (std::abs(tu) > last) break;  // series starts to diverge
        su += tu;
        sv += tv;
        last = std::abs(tu);
        if (last < 1e-18) break;
        zp /= zeta;
        sign = -sign;
    }
    const double e = std::exp(-zeta);
    return {x, 0.5 * kInvSqrtPi * e / x14 * su, -0.5 * kInvSqrtPi * x14 * e * sv};
}

AiryPair negative_asymptotic(double x) {
    const long double r = -static_cast<long double>(x);
    const long double zeta = (2.0L / 3.0L) * r * std::sqrt(r);
    const long double theta = zeta - 0.785398163397448309615660845819875721L;
    const double zi = static_cast<double>(1.0L / zeta);
    const auto& c = coeffs();
    // even/odd split of the alternating sums
    double pu = 0.0, qu = 0.0, pv = 0.0, qv = 0.0;
    double zp = 1.0, last = 1e300;
    for (int k = 0; k < AsymCoeffs::kCount; ++k) {
        const double tu = c.u[k] * zp;
        if (std::abs(tu) > last) break;
        last = std::abs(tu);
        const double s = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            pu += s * tu;
            pv += s * c.v[k] * zp;
        } else {
            qu += s * tu;
            qv += s * c.v[k] * zp;
        }
        if (last < 1e-18) break;
        zp *= zi;
    }
    long double sn, cs;
    sincosl(theta, &sn, &cs);
    const double s = static_cast<double>(sn), co = static_cast<double>(cs);
    const double r14 = static_cast<double>(std::sqrt(std::sqrt(r)));
    const double ai = kInvSqrtPi / r14 * (co * pu + s * qu);
    const double dai = kInvSqrtPi * r14 * (s * pv - co * qv);
    return {x, ai, dai};
}

}  // namespace

AiryPair airy_ai_pair(double x) {
    if (!std::isfinite(x)) throw DomainError("airy_ai_pair: non-finite argument");
    if (std::abs(x) <= kSeriesLimit) return taylor_local(x);
    return x > 0 ? positive_asymptotic(x) : negative_asymptotic(x);
}

}  // namespace dasp
