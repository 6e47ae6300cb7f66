#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "dasp/errors.hpp"
#include "dasp/specialfun.hpp"

using namespace dasp;

TEST_CASE("airy pair matches the high-precision table") {
    const auto rows = oracle::airy_table(DASP_TEST_DATA_DIR "/airy_reference.csv");
    REQUIRE(rows.size() > 100);
    for (const auto& r : rows) {
        const AiryPair p = airy_ai_pair(r.x);
        const double scale_a = std::max(std::abs(r.ai), 1e-280);
        const double scale_d = std::max(std::abs(r.ai_prime), 1e-280);
        if (std::abs(r.x) <= 12.0) {
            // relative contract, loosened to absolute near the zeros of Ai and Ai'
            CHECK(std::abs(p.ai - r.ai) <= 1e-12 * std::max(scale_a, 1e-3));
            CHECK(std::abs(p.ai_prime - r.ai_prime) <= 1e-12 * std::max(scale_d, 1e-3));
        } else {
            CHECK(std::abs(p.ai - r.ai) <= std::max(1e-15, 1e-12 * scale_a));
        }
    }
}

TEST_CASE("airy origin and decay") {
    CHECK(airy_ai_pair(0.0).ai == doctest::Approx(0.3550280538878172).epsilon(1e-15));
    CHECK(airy_ai_pair(30.0).ai < 1e-30);
    CHECK(airy_ai_pair(30.0).ai > 0.0);
    CHECK_THROWS_AS(airy_ai_pair(std::nan("")), DomainError);
    CHECK_THROWS_AS(airy_ai_pair(INFINITY), DomainError);
}

TEST_CASE("airy satisfies y'' = x y") {
    for (double x : {-9.0, -4.0, -1.0, 0.0, 1.0, 3.0, 7.5}) {
        const double h = 1e-4;
        const double d2 = (airy_ai_pair(x + h).ai_prime - airy_ai_pair(x - h).ai_prime) / (2 * h);
        const double target = x * airy_ai_pair(x).ai;
        CHECK(std::abs(d2 - target) <= 1e-8 * std::max(1.0, std::abs(target)));
    }
}

TEST_CASE("airy positive and decreasing on the positive axis") {
    double prev = airy_ai_pair(0.0).ai;
    for (double x = 0.1; x <= 20.0; x += 0.1) {
        const double a = airy_ai_pair(x).ai;
        CHECK(a > 0.0);
        CHECK(a < prev);
        prev = a;
    }
}

TEST_CASE("hermite ground state and negative index") {
    const HermiteRow r = hermite_phi_row(0, 0.0);
    CHECK(r[0] == doctest::Approx(0.7511255444649425).epsilon(1e-15));
    CHECK(r[-1] == 0.0);
    CHECK(hermite_phi_row(5, 1.0)[6] == 0.0);
    CHECK_THROWS_AS(hermite_phi_row(-1, 0.0), DomainError);
}

TEST_CASE("hermite recurrence agrees with the polynomial route") {
    for (double x : {-3.5, -1.0, 0.0, 0.4, 2.2, 5.0}) {
        const HermiteRow r = hermite_phi_row(40, x);
        for (int k = 0; k <= 40; ++k) CHECK(std::abs(r[k] - oracle::hermite_function_direct(k, x)) <= 1e-12);
    }
}

TEST_CASE("hermite functions are orthonormal") {
    const QuadratureRule q = gauss_legendre(400, -20.0, 20.0);
    double i35 = 0.0, i55 = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const HermiteRow r = hermite_phi_row(5, q.nodes[i]);
        i35 += q.weights[i] * r[3] * r[5];
        i55 += q.weights[i] * r[5] * r[5];
    }
    CHECK(std::abs(i35) <= 1e-10);
    CHECK(std::abs(i55 - 1.0) <= 1e-10);
}

TEST_CASE("hermite rows are deterministic and fill matches row") {
    std::vector<double> buf(1001);
    hermite_phi_fill(1000, 12.3, buf.data());
    const HermiteRow a = hermite_phi_row(1000, 12.3), b = hermite_phi_row(1000, 12.3);
    for (int k = 0; k <= 1000; ++k) {
        CHECK(a[k] == b[k]);
        CHECK(a[k] == buf[k]);
    }
}

TEST_CASE("hermite values obey the uniform envelope") {
    for (int k : {0, 1, 10, 100, 1000})
        for (double x = -50; x <= 50; x += 0.37) CHECK(std::abs(hermite_phi_row(k, x)[k]) <= kHermiteEnvelope);
}

TEST_CASE("k^{1/12} max |phi_k| stays within a 1.5 bracket") {
    double lo = 1e300, hi = 0.0;
    for (int k : {50, 100, 500, 1000, 5000}) {
        const double c = std::pow(k, 1.0 / 12.0) * hermite_max_abs(k);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    CHECK(hi / lo <= 1.5);
}

TEST_CASE("gauss legendre rules") {
    const QuadratureRule one = gauss_legendre(1, 0.0, 2.0);
    CHECK(one.nodes[0] == doctest::Approx(1.0));
    CHECK(one.weights[0] == doctest::Approx(2.0));
    const QuadratureRule two = gauss_legendre(2, 0.0, 1.0);
    double cube = 0.0;
    for (std::size_t i = 0; i < 2; ++i) cube += two.weights[i] * std::pow(two.nodes[i], 3);
    CHECK(std::abs(cube - 0.25) <= 1e-14);
    for (int m : {3, 17, 64, 200}) {
        const QuadratureRule r = gauss_legendre(m, -1.5, 2.5);
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            CHECK(r.nodes[i] > -1.5);
            CHECK(r.nodes[i] < 2.5);
            CHECK(r.weights[i] > 0.0);
            s += r.weights[i];
        }
        CHECK(std::abs(s - 4.0) <= 1e-13);
    }
    CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(gauss_legendre(4, 1.0, 1.0), DomainError);
}

TEST_CASE("gauss legendre integrates Legendre products exactly") {
    const QuadratureRule& r = gauss_legendre_unit(24);
    for (int a = 0; a < 24; a += 5)
        for (int b = 0; b < 24; b += 3) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i)
                s += r.weights[i] * oracle::legendre(a, r.nodes[i]) * oracle::legendre(b, r.nodes[i]);
            const double exact = a == b ? 2.0 / (2.0 * a + 1.0) : 0.0;
            CHECK(std::abs(s - exact) <= 1e-13);
        }
}

TEST_CASE("edge approximation of hermite functions") {
    CHECK(edge_asymptotic_check(1000, 0, 0.0) <= 0.02);
    CHECK(edge_asymptotic_check(4000, 0, 0.0) < edge_asymptotic_check(250, 0, 0.0));
    const int n = 1000;
    const int k = 10;
    const double u = 6.0 - k / std::cbrt(double(n));
    CHECK(edge_asymptotic_check(n, k, u) <= 1.0);
    CHECK_THROWS_AS(edge_asymptotic_check(1000, 500, 0.0), DomainError);
    CHECK_THROWS_AS(edge_asymptotic_check(5, 0, 0.0), DomainError);
}
