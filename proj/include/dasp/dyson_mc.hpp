#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dasp/intervals.hpp"
#include "dasp/parallel.hpp"

namespace dasp {

using HermitianMatrix = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

/// Independent generator for (seed, stream); streams never overlap in practice.
Rng substream(std::uint64_t seed, std::uint64_t stream);

struct OUConfig {
    int n = 2;
    std::vector<double> times;  // strictly increasing, nonnegative
    long samples = 10000;
    std::uint64_t seed = 20240601;

    void validate() const;
};

struct EmpiricalJoint {
    long hits = 0;
    long samples = 0;
    double p_hat = 0.0;
    double stderr_ = 0.0;

    static EmpiricalJoint from_counts(long hits, long samples);
};

/// Draw from the stationary law with density proportional to exp(-Tr B^2).
HermitianMatrix sample_stationary(int n, Rng& rng);

/// Exact OU step: c B + sqrt(1 - c^2) H with c = exp(-dt), H stationary.
HermitianMatrix ou_transition(const HermitianMatrix& B, double dt, Rng& rng);

/// Ascending eigenvalues; DomainError if B is not Hermitian to 1e-12.
std::vector<double> eigenvalues(const HermitianMatrix& B);

/// Fraction of paths with all eigenvalues in E1 at t1 and in E2 at t2.
EmpiricalJoint estimate_joint(const OUConfig& cfg, double t1, double t2, const IntervalUnion& E1,
                              const IntervalUnion& E2, Exec exec = Exec::parallel);

/// Largest eigenvalue at each of cfg.times; row per sample.
Eigen::MatrixXd sample_top_eigenvalue_paths(const OUConfig& cfg, Exec exec = Exec::parallel);

double rescale_edge(double lam_top, int n);
double rescale_bulk(double lam, int n);

struct NonexplosionResult {
    EmpiricalJoint p_cond;   // P(lambda_max(t) >= a | lambda_max(0) <= -z)
    EmpiricalJoint p_bound;  // P(lambda_max(t) >= a + e^{-t} z), stationary
    double acceptance_rate = 0.0;
    long proposals = 0;
};

/// Rejection sampling of the conditioned start, with proposal X - zI
/// (X stationary) accepted with probability exp(2z(Tr B + nz)) on the event.
NonexplosionResult nonexplosion_experiment(int n, double t, double z, double a, long samples,
                                           std::uint64_t seed, Exec exec = Exec::parallel,
                                           double min_acceptance = 1e-3);

}  // namespace dasp
