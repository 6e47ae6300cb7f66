#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dasp/intervals.hpp"
#include "dasp/kernels.hpp"
#include "dasp/parallel.hpp"

namespace dasp {

enum class Process { dyson, airy, sine };

const char* process_name(Process p);

/// Set on which the kernel acts for the event "all points of time t lie in E":
/// E^c for Dyson and Airy, E itself for Sine (whose event is "no point in E").
IntervalUnion restriction_set(Process process, const IntervalUnion& E);

struct DomainPiece {
    double lo = 0.0;
    double hi = 0.0;
    int order = 0;
    bool lo_truncated = false;  // lo replaces -inf
    bool hi_truncated = false;  // hi replaces +inf
};

struct DiscretizedDomain {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<DomainPiece> pieces;

    std::size_t size() const { return nodes.size(); }
    bool empty() const { return nodes.empty(); }
    double total_length() const;
};

struct DiscretizeOptions {
    double airy_tail = 12.0;          // right-tail truncation length for Airy
    double hermite_scan_step = 0.5;   // outward scan step for Hermite tails
    double hermite_cutoff = 1e-16;    // diagonal kernel value ending the scan
    int hermite_scan_limit = 400;     // hard bound on scan steps
};

DiscretizedDomain discretize(const ExtendedKernelSpec& spec, const IntervalUnion& R, int order,
                             const DiscretizeOptions& opt = {});

/// M_{kl}[i, j] = sqrt(w_i) K_{t_k t_l}(x_i, y_j) sqrt(w_j).
struct BlockOperator {
    Eigen::MatrixXd m11, m12, m21, m22;
    Eigen::Index size1() const { return m11.rows(); }
    Eigen::Index size2() const { return m22.rows(); }
    Eigen::MatrixXd assembled() const;
};

BlockOperator assemble_block_operator(const ExtendedKernelSpec& s11, const ExtendedKernelSpec& s12,
                                      const ExtendedKernelSpec& s21, const ExtendedKernelSpec& s22,
                                      const DiscretizedDomain& d1, const DiscretizedDomain& d2,
                                      Exec exec = Exec::parallel);

/// det(I - M) by partial-pivot LU; throws NumericalError on breakdown.
double block_fredholm_det(const ExtendedKernelSpec& s11, const ExtendedKernelSpec& s12,
                          const ExtendedKernelSpec& s21, const ExtendedKernelSpec& s22,
                          const DiscretizedDomain& d1, const DiscretizedDomain& d2,
                          Exec exec = Exec::parallel);

struct ProcessParams {
    int n = 0;  // Dyson matrix size
};

struct FredholmConfig {
    double tol = 1e-10;     // refinement stops once successive values differ by less
    int initial_order = 16;  // GL nodes per domain piece on the first pass
    int max_order = 256;
    int fixed_order = 0;     // > 0 disables refinement
    double kernel_tol = 1e-14;
    DiscretizeOptions discretize;
    Exec exec = Exec::parallel;
};

struct FredholmResult {
    double value = 0.0;
    int order_used = 0;
    double est_error = 0.0;
};

/// The four block specs (t_k, t_l) for a process at times t1, t2.
std::array<ExtendedKernelSpec, 4> process_specs(Process process, const ProcessParams& params, double t1,
                                                double t2, double kernel_tol);

/// P(all points at t1 in E1, all points at t2 in E2) for Dyson/Airy, or
/// P(no point of S(t1) in E1, none of S(t2) in E2) for Sine.
/// E2 absent gives the one-time probability.
FredholmResult joint_probability(Process process, const ProcessParams& params, double t1, double t2,
                                 const IntervalUnion& E1, const std::optional<IntervalUnion>& E2,
                                 const FredholmConfig& cfg = {});

/// d/dp log P for the endpoint p = (E1 endpoints, then E2 endpoints)[index - 1],
/// from the resolvent diagonal R(p, p) with the sign of the endpoint's side.
FredholmResult resolvent_logderiv(Process process, const ProcessParams& params, double t1, double t2,
                                  const IntervalUnion& E1, const std::optional<IntervalUnion>& E2,
                                  int endpoint_index, const FredholmConfig& cfg = {});

/// P(A(0) <= u, A(t) <= v) / (F2(u) F2(v)) as det(I - K12 K21) with
/// K12 = (I - K00)^{-1} K_{0,t} on (u, inf) x (v, inf), K21 likewise.
FredholmResult two_time_ratio_factorized(double t, double u, double v, const FredholmConfig& cfg = {});

/// Spectral norm of the discretized K^A_{t,0} block on (v, inf) x (u, inf).
double airy_offdiagonal_norm(double t, double u, double v, int order, const FredholmConfig& cfg = {});

}  // namespace dasp
