#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../oracles.hpp"
#include "dasp/errors.hpp"
#include "dasp/kernels.hpp"
#include "dasp/specialfun.hpp"

using namespace dasp;

namespace {
constexpr double kPi = std::numbers::pi;

double ai(double x) { return airy_ai_pair(x).ai; }

std::vector<std::pair<double, double>> random_points(int count, double lo, double hi, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < count; ++i) {
        const double x = d(rng);
        out.emplace_back(x, d(rng));
    }
    return out;
}
}  // namespace

TEST_CASE("hermite kernel with one level keeps a single term") {
    const auto s = ExtendedKernelSpec::hermite(1, 0.7, 0.0);
    for (auto [x, y] : random_points(10, -3, 3, 1)) {
        const double expect = std::exp(-0.7) * hermite_phi_row(0, x)[0] * hermite_phi_row(0, y)[0];
        CHECK(eval_kernel(s, x, y) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("equal-time hermite kernel is the Christoffel-Darboux sum") {
    for (int n : {1, 5, 30, 200}) {
        const auto s = ExtendedKernelSpec::hermite(n, 0.4, 0.4);
        for (auto [x, y] : random_points(10, -6, 6, n)) {
            const HermiteRow rx = hermite_phi_row(n, x), ry = hermite_phi_row(n, y);
            double sum = 0.0;
            for (int j = 0; j < n; ++j) sum += rx[j] * ry[j];
            CHECK(std::abs(eval_kernel(s, x, y) - sum) <= 1e-12);
            // Christoffel-Darboux closed form as a second route
            if (std::abs(x - y) > 1e-3) {
                const double cd = std::sqrt(n / 2.0) * (rx[n] * ry[n - 1] - rx[n - 1] * ry[n]) / (x - y);
                CHECK(std::abs(cd - sum) <= 1e-11);
            }
        }
    }
}

TEST_CASE("equal-time sine kernel") {
    const auto s = ExtendedKernelSpec::sine(0.3, 0.3);
    CHECK(eval_kernel(s, 0.5, 0.0) == doctest::Approx(2.0 / kPi).epsilon(1e-13));
    CHECK(eval_kernel(s, 0.2, 0.2) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("equal-time airy kernel") {
    const double ap0 = -std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0);
    CHECK(airy_equal_time(0.0, 0.0) == doctest::Approx(ap0 * ap0).epsilon(1e-13));
    CHECK(airy_equal_time(0.7, -0.1) == airy_equal_time(-0.1, 0.7));
    const auto s = ExtendedKernelSpec::airy(1.0, 1.0);
    const double x = 0.2, y = -0.3;
    const AiryPair px = airy_ai_pair(x), py = airy_ai_pair(y);
    const double closed = (px.ai * py.ai_prime - px.ai_prime * py.ai) / (x - y);
    CHECK(std::abs(eval_kernel(s, x, y) - closed) <= 1e-8);
    for (auto [u, v] : random_points(20, -4, 2, 7)) CHECK(std::abs(eval_kernel(s, u, v) - airy_equal_time(u, v)) <= 1e-8);
    // the near-diagonal expansion joins the quotient continuously
    for (double m : {-3.0, -0.5, 0.0, 1.5}) {
        const double inside = airy_equal_time(m + 4.999e-5, m - 4.999e-5);
        const double outside = airy_equal_time(m + 5.001e-5, m - 5.001e-5);
        CHECK(std::abs(inside - outside) <= 1e-10);
    }
}

TEST_CASE("airy past-future branch against the Gaussian identity") {
    for (double gap : {0.3, 1.0, 2.5}) {
        const auto s = ExtendedKernelSpec::airy(0.0, gap);
        for (auto [x, y] : {std::pair{0.0, 0.0}, {0.5, -1.0}, {-2.0, 1.2}, {1.5, 1.5}}) {
            const double forward = oracle::simpson(
                [&](double z) { return std::exp(z * gap) * ai(x + z) * ai(y + z); }, 0.0, 30.0, 1e-15);
            const double expect = -(oracle::airy_gaussian_integral(x, y, gap) - forward);
            CHECK(std::abs(eval_kernel(s, x, y) - expect) <= 1e-10);
        }
    }
}

TEST_CASE("airy forward branch against direct quadrature") {
    for (double gap : {0.2, 1.0, 4.0}) {
        const auto s = ExtendedKernelSpec::airy(gap, 0.0);
        for (auto [x, y] : random_points(5, -3, 3, 11)) {
            const double direct = oracle::simpson(
                [&](double z) { return std::exp(-z * gap) * ai(x + z) * ai(y + z); }, 0.0, 40.0, 1e-15);
            CHECK(std::abs(eval_kernel(s, x, y) - direct) <= 1e-10);
        }
    }
}

TEST_CASE("sine branches against direct quadrature") {
    for (double gap : {0.3, 1.0}) {
        const auto fwd = ExtendedKernelSpec::sine(gap, 0.0);
        const auto bwd = ExtendedKernelSpec::sine(0.0, gap);
        for (auto [x, y] : random_points(5, -2, 2, 3)) {
            const double d = x - y;
            const double pos = oracle::simpson(
                [&](double z) { return std::exp(0.5 * z * z * gap) * std::cos(z * d); }, 0.0, kPi, 1e-15) / kPi;
            const double neg = -oracle::simpson(
                [&](double z) { return std::exp(-0.5 * z * z * gap) * std::cos(z * d); }, kPi, kPi + 40.0, 1e-15) / kPi;
            CHECK(std::abs(eval_kernel(fwd, x, y) - pos) <= 1e-11);
            CHECK(std::abs(eval_kernel(bwd, x, y) - neg) <= 1e-11);
        }
    }
}

TEST_CASE("kernels are symmetric in x and y") {
    const std::vector<ExtendedKernelSpec> specs = {
        ExtendedKernelSpec::hermite(20, 0.5, 0.0), ExtendedKernelSpec::hermite(20, 0.0, 0.5),
        ExtendedKernelSpec::airy(0.5, 0.0),        ExtendedKernelSpec::airy(0.0, 0.5),
        ExtendedKernelSpec::sine(0.5, 0.0),        ExtendedKernelSpec::sine(0.0, 0.5)};
    for (const auto& s : specs)
        for (auto [x, y] : random_points(10, -3, 3, 5)) CHECK(std::abs(eval_kernel(s, x, y) - eval_kernel(s, y, x)) <= 1e-13);
}

TEST_CASE("doubling truncation windows changes values below tol") {
    const std::vector<ExtendedKernelSpec> specs = {
        ExtendedKernelSpec::hermite(10, 0.0, 0.4), ExtendedKernelSpec::airy(0.6, 0.0), ExtendedKernelSpec::airy(0.0, 0.6),
        ExtendedKernelSpec::sine(0.0, 0.6)};
    for (const auto& s : specs) {
        ExtendedKernelSpec wide = s;
        wide.trunc.window_scale = 2.0;
        for (auto [x, y] : random_points(100, -3, 3, 9)) {
            const double a = eval_kernel(s, x, y), b = eval_kernel(wide, x, y);
            CHECK(std::abs(a - b) <= 10.0 * s.tol);
        }
    }
}

TEST_CASE("large-gap airy kernel decays like Ai(x)Ai(y)/gap") {
    for (double gap : {5.0, 10.0, 20.0}) {
        const auto s = ExtendedKernelSpec::airy(gap, 0.0);
        for (auto [x, y] : random_points(10, -2, 2, 13)) {
            const double k = eval_kernel(s, x, y);
            CHECK(std::abs(k) <= 1.5 / gap);
            CHECK(std::abs(gap * k - ai(x) * ai(y)) <= 2.0 / gap);
        }
    }
}

TEST_CASE("validation and branch errors") {
    CHECK_THROWS_AS(eval_kernel(ExtendedKernelSpec::airy(0.0, 5e-4), 0.0, 0.0), BranchError);
    CHECK_THROWS_AS(eval_kernel(ExtendedKernelSpec::sine(0.0, 1e-4), 0.0, 0.0), BranchError);
    CHECK_THROWS_AS(eval_kernel(ExtendedKernelSpec::hermite(0, 0.0, 0.0), 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(eval_kernel(ExtendedKernelSpec::airy(1.0, 0.0, 1e-3), 0.0, 0.0), DomainError);
    CHECK(hermite_negative_terms(10, 0.5, 1e-14) > 10);
}

TEST_CASE("kernel matrix: serial and parallel agree bitwise and match pointwise") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 23; ++i) xs.push_back(-2.0 + 0.19 * i);
    for (int i = 0; i < 17; ++i) ys.push_back(-1.0 + 0.23 * i);
    for (const auto& s : {ExtendedKernelSpec::hermite(12, 0.3, 0.0), ExtendedKernelSpec::hermite(12, 0.0, 0.3),
                          ExtendedKernelSpec::airy(0.3, 0.0), ExtendedKernelSpec::airy(0.0, 0.3),
                          ExtendedKernelSpec::airy(0.0, 0.0), ExtendedKernelSpec::sine(0.0, 0.3)}) {
        const Eigen::MatrixXd a = kernel_matrix(s, xs, ys, Exec::serial);
        const Eigen::MatrixXd b = kernel_matrix(s, xs, ys, Exec::parallel);
        CHECK((a.array() == b.array()).all());
        for (std::size_t i = 0; i < xs.size(); i += 5)
            for (std::size_t j = 0; j < ys.size(); j += 4) CHECK(std::abs(a(i, j) - eval_kernel(s, xs[i], ys[j])) <= 1e-11);
    }
}

TEST_CASE("scaling limits") {
    const double e50 = limit_compare(LimitTarget::airy, 50, 0.5, 0.0, 0.3, -0.2).abs_error;
    const double e3200 = limit_compare(LimitTarget::airy, 3200, 0.5, 0.0, 0.3, -0.2).abs_error;
    CHECK(e3200 < e50);

    double prev = 1e300;
    for (int n : {50, 200, 800}) {
        const LimitComparison c = limit_compare(LimitTarget::sine, n, 0.3, 0.3, 0.4, 0.0);
        CHECK(c.limit_value == doctest::Approx(std::sin(0.4 * kPi) / (0.4 * kPi)).epsilon(1e-12));
        CHECK(c.abs_error < prev);
        prev = c.abs_error;
    }
    const double ap0 = airy_ai_pair(0.0).ai_prime;
    CHECK(std::abs(limit_compare(LimitTarget::airy, 1000, 0.0, 0.0, 0.0, 0.0).scaled_hermite - ap0 * ap0) <= 0.05);
    CHECK_THROWS_AS(limit_compare(LimitTarget::airy, 10, 0.5, 0.0, 0.0, 0.0), DomainError);
}
