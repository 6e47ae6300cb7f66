#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "dasp/dyson_mc.hpp"
#include "dasp/errors.hpp"
#include "dasp/fredholm.hpp"
#include "dasp/painleve.hpp"

using namespace dasp;

TEST_CASE("stationary samples: Hermitian, correct second moment") {
    Rng rng = substream(1, 0);
    const int n = 4, draws = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < draws; ++i) {
        const HermitianMatrix B = sample_stationary(n, rng);
        CHECK_FALSE((B - B.adjoint()).norm() != 0.0);
        const double tr = (B * B).trace().real();
        s += tr;
        s2 += tr * tr;
    }
    const double mean = s / draws, se = std::sqrt((s2 / draws - mean * mean) / draws);
    CHECK(std::abs(mean - n * n / 2.0) <= 3 * se);

    Rng r1 = substream(2, 0);
    double v = 0;
    for (int i = 0; i < draws; ++i) {
        const double x = sample_stationary(1, r1)(0, 0).real();
        v += x * x;
    }
    CHECK(std::abs(v / draws - 0.5) <= 3 * 0.5 * std::sqrt(2.0 / draws));
}

TEST_CASE("transitions") {
    Rng rng = substream(3, 0);
    const HermitianMatrix B = sample_stationary(5, rng);
    const HermitianMatrix tiny = ou_transition(B, 1e-8, rng);
    CHECK((tiny - B).norm() <= 1e-3 * B.norm());
    CHECK_THROWS_AS(ou_transition(B, 0.0, rng), DomainError);

    // long gap: indistinguishable from stationary
    const int m = 10000;
    std::vector<double> far, fresh, two, one;
    Rng a = substream(4, 0), b = substream(4, 1), c = substream(4, 2), d = substream(4, 3);
    for (int i = 0; i < m; ++i) {
        far.push_back(eigenvalues(ou_transition(sample_stationary(3, a), 50.0, a)).back());
        fresh.push_back(eigenvalues(sample_stationary(3, b)).back());
        // start from a fixed non-stationary point so the gap matters
        HermitianMatrix X = HermitianMatrix::Identity(3, 3) * 2.0;
        two.push_back(eigenvalues(ou_transition(ou_transition(X, 0.2, c), 0.3, c)).back());
        one.push_back(eigenvalues(ou_transition(X, 0.5, d)).back());
    }
    CHECK(oracle::ks_pvalue(far, fresh) > 0.01);
    CHECK(oracle::ks_pvalue(two, one) > 0.01);
}

TEST_CASE("eigenvalues") {
    HermitianMatrix D = HermitianMatrix::Zero(3, 3);
    D(0, 0) = 3;
    D(1, 1) = 1;
    D(2, 2) = 2;
    CHECK(eigenvalues(D) == std::vector<double>{1, 2, 3});
    HermitianMatrix S = HermitianMatrix::Zero(2, 2);
    S(0, 1) = S(1, 0) = 1;
    const auto e = eigenvalues(S);
    CHECK(e[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(e[1] == doctest::Approx(1.0).epsilon(1e-14));
    Rng rng = substream(5, 0);
    const HermitianMatrix B = sample_stationary(30, rng);
    const auto ev = eigenvalues(B);
    double sum = 0;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        sum += ev[i];
        if (i) CHECK(ev[i] >= ev[i - 1]);
    }
    CHECK(std::abs(sum - B.trace().real()) <= 1e-10 * B.norm());
    HermitianMatrix bad = S;
    bad(0, 1) = 2.0;
    CHECK_THROWS_AS(eigenvalues(bad), DomainError);
}

TEST_CASE("joint estimates") {
    OUConfig cfg;
    cfg.n = 2;
    cfg.times = {0.0, 0.5};
    cfg.samples = 5000;
    const EmpiricalJoint all =
        estimate_joint(cfg, 0.0, 0.5, IntervalUnion::real_line(), IntervalUnion::real_line());
    CHECK(all.p_hat == 1.0);
    const EmpiricalJoint small =
        estimate_joint(cfg, 0.0, 0.5, IntervalUnion::interval(-2, 2), IntervalUnion::interval(-1, 1));
    const EmpiricalJoint big =
        estimate_joint(cfg, 0.0, 0.5, IntervalUnion::interval(-2, 2), IntervalUnion::interval(-2, 2));
    CHECK(big.hits >= small.hits);  // paired paths under the same seed
    CHECK_THROWS_AS(estimate_joint(cfg, 0.5, 0.5, IntervalUnion::real_line(), IntervalUnion::real_line()),
                    DomainError);
    cfg.samples = 40000;
    const EmpiricalJoint e =
        estimate_joint(cfg, 0.0, 0.5, IntervalUnion::interval(-1.5, 1.5), IntervalUnion::interval(-1, 2));
    const double p = joint_probability(Process::dyson, {2}, 0.0, 0.5, IntervalUnion::interval(-1.5, 1.5),
                                       IntervalUnion::interval(-1, 2))
                         .value;
    CHECK(std::abs(e.p_hat - p) <= 4 * e.stderr_);
}

TEST_CASE("seed determinism and thread independence") {
    OUConfig cfg;
    cfg.n = 3;
    cfg.times = {0.0, 0.2, 0.9};
    cfg.samples = 3000;
    const Eigen::MatrixXd a = sample_top_eigenvalue_paths(cfg, Exec::serial);
    const Eigen::MatrixXd b = sample_top_eigenvalue_paths(cfg, Exec::parallel);
    CHECK((a.array() == b.array()).all());
    cfg.seed += 1;
    const Eigen::MatrixXd c = sample_top_eigenvalue_paths(cfg, Exec::serial);
    CHECK_FALSE((a.array() == c.array()).all());
}

TEST_CASE("stationarity of the two-point law") {
    OUConfig cfg;
    cfg.n = 2;
    cfg.times = {0.0, 0.4, 1.3, 1.7};
    cfg.samples = 10000;
    const Eigen::MatrixXd p = sample_top_eigenvalue_paths(cfg);
    std::vector<double> d1, d2;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        d1.push_back(p(i, 1) - p(i, 0));
        d2.push_back(p(i, 3) - p(i, 2));
    }
    CHECK(oracle::ks_pvalue(d1, d2) > 0.01);
}

TEST_CASE("edge and bulk rescaling") {
    CHECK(rescale_edge(std::sqrt(2.0 * 50), 50) == doctest::Approx(0.0));
    CHECK(rescale_bulk(0.0, 50) == 0.0);
    OUConfig cfg;
    cfg.n = 100;
    cfg.times = {0.0};
    cfg.samples = 10000;
    const Eigen::MatrixXd p = sample_top_eigenvalue_paths(cfg);
    std::vector<double> s;
    for (Eigen::Index i = 0; i < p.rows(); ++i) s.push_back(rescale_edge(p(i, 0), cfg.n));
    const TracyWidomCurve& tw = default_tracy_widom();
    const double d = oracle::ks_distance(s, [&](double u) {
        if (u <= tw.u_min()) return 0.0;
        if (u >= tw.u_max()) return 1.0;
        return tw.F2_at(u);
    });
    CHECK(d <= 0.05);
}

TEST_CASE("nonexplosion: trends and starvation") {
    const auto r15 = nonexplosion_experiment(2, 0.5, 1.5, 0.0, 20000, 11);
    const double sig = std::hypot(r15.p_cond.stderr_, r15.p_bound.stderr_);
    CHECK(r15.p_cond.p_hat <= r15.p_bound.p_hat + 3 * sig);
    const auto r1 = nonexplosion_experiment(2, 0.5, 1.0, 0.0, 20000, 11);
    const auto r2 = nonexplosion_experiment(2, 0.5, 2.0, 0.0, 20000, 11);
    CHECK(r1.p_cond.p_hat > r15.p_cond.p_hat);
    CHECK(r15.p_cond.p_hat > r2.p_cond.p_hat);
    // long time: conditioning forgotten
    const auto late = nonexplosion_experiment(2, 8.0, 1.5, 0.0, 20000, 12);
    const double sig2 = std::hypot(late.p_cond.stderr_, late.p_bound.stderr_);
    CHECK(std::abs(late.p_cond.p_hat - late.p_bound.p_hat) <= 3 * sig2);
    CHECK_THROWS_AS(nonexplosion_experiment(6, 0.5, 4.0, 0.0, 1000, 1, Exec::parallel, 1e-3), SamplingError);
}
