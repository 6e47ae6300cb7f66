#include "dasp/dyson_mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dasp/errors.hpp"

namespace dasp {
namespace {

// Fixed chunking keeps results independent of the thread count.
constexpr long kChunk = 4096;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double max_eigenvalue(const HermitianMatrix& B) {
    if (B.rows() == 2) {
        // closed form keeps the n = 2 hot loop cheap
        const double a = B(0, 0).real(), d = B(1, 1).real();
        const double off = std::norm(B(0, 1));
        return 0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + off);
    }
    return eigenvalues(B).back();
}

// Sorted spectrum without the Hermiticity check (inputs built internally).
std::vector<double> spectrum(const HermitianMatrix& B) {
    if (B.rows() == 2) {
        const double a = B(0, 0).real(), d = B(1, 1).real();
        const double r = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(B(0, 1)));
        return {0.5 * (a + d) - r, 0.5 * (a + d) + r};
    }
    return eigenvalues(B);
}

bool all_inside(const std::vector<double>& lam, const IntervalUnion& E) {
    if (E.is_full()) return true;
    for (double l : lam)
        if (!E.contains(l)) return false;
    return true;
}

template <class Body>
void for_chunks(long chunks, Exec exec, Body&& body) {
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long c = 0; c < chunks; ++c) body(c);
    } else {
        for (long c = 0; c < chunks; ++c) body(c);
    }
}

}  // namespace

Rng substream(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t s = splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

void OUConfig::validate() const {
    if (n < 1) throw DomainError("OUConfig: n must be >= 1");
    if (samples < 1) throw DomainError("OUConfig: samples must be >= 1");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw DomainError("OUConfig: times must be finite and >= 0");
        if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("OUConfig: times must increase strictly");
    }
}

EmpiricalJoint EmpiricalJoint::from_counts(long hits, long samples) {
    EmpiricalJoint e;
    e.hits = hits;
    e.samples = samples;
    e.p_hat = samples > 0 ? static_cast<double>(hits) / samples : 0.0;
    e.stderr_ = samples > 0 ? std::sqrt(e.p_hat * (1.0 - e.p_hat) / samples) : 0.0;
    return e;
}

HermitianMatrix sample_stationary(int n, Rng& rng) {
    if (n < 1) throw DomainError("sample_stationary: n must be >= 1");
    std::normal_distribution<double> nd(0.0, 1.0);
    const double sd_diag = std::sqrt(0.5), sd_off = 0.5;
    HermitianMatrix B(n, n);
    for (int j = 0; j < n; ++j) {
        B(j, j) = {sd_diag * nd(rng), 0.0};
        for (int i = j + 1; i < n; ++i) {
            const double re = sd_off * nd(rng);
            const double im = sd_off * nd(rng);
            B(i, j) = {re, im};
            B(j, i) = {re, -im};
        }
    }
    return B;
}

HermitianMatrix ou_transition(const HermitianMatrix& B, double dt, Rng& rng) {
    if (!(dt > 0.0)) throw DomainError("ou_transition: dt must be positive");
    const double c = std::exp(-dt);
    const double s = std::sqrt(-std::expm1(-2.0 * dt));
    HermitianMatrix out = sample_stationary(static_cast<int>(B.rows()), rng);
    out *= s;
    out += c * B;
    return out;
}

std::vector<double> eigenvalues(const HermitianMatrix& B) {
    if (B.rows() != B.cols()) throw DomainError("eigenvalues: matrix must be square");
    const double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
    if ((B - B.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DomainError("eigenvalues: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<HermitianMatrix> es(B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: solver did not converge");
    std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + B.rows());
    std::sort(lam.begin(), lam.end());
    return lam;
}

EmpiricalJoint estimate_joint(const OUConfig& cfg, double t1, double t2, const IntervalUnion& E1,
                              const IntervalUnion& E2, Exec exec) {
    cfg.validate();
    if (!(t1 < t2)) throw DomainError("estimate_joint: need t1 < t2");
    const long chunks = (cfg.samples + kChunk - 1) / kChunk;
    std::vector<long> hits(static_cast<std::size_t>(chunks), 0);
    for_chunks(chunks, exec, [&](long c) {
        Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(c));
        const long count = std::min(kChunk, cfg.samples - c * kChunk);
        long h = 0;
        for (long k = 0; k < count; ++k) {
            const HermitianMatrix B0 = sample_stationary(cfg.n, rng);
            const HermitianMatrix B1 = ou_transition(B0, t2 - t1, rng);
            if (all_inside(spectrum(B0), E1) && all_inside(spectrum(B1), E2)) ++h;
        }
        hits[c] = h;
    });
    long total = 0;
    for (long h : hits) total += h;
    return EmpiricalJoint::from_counts(total, cfg.samples);
}

Eigen::MatrixXd sample_top_eigenvalue_paths(const OUConfig& cfg, Exec exec) {
    cfg.validate();
    if (cfg.times.empty()) throw DomainError("sample_top_eigenvalue_paths: no times given");
    const long chunks = (cfg.samples + kChunk - 1) / kChunk;
    const auto nt = static_cast<Eigen::Index>(cfg.times.size());
    Eigen::MatrixXd out(cfg.samples, nt);
    for_chunks(chunks, exec, [&](long c) {
        Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(c));
        const long count = std::min(kChunk, cfg.samples - c * kChunk);
        for (long k = 0; k < count; ++k) {
            HermitianMatrix B = sample_stationary(cfg.n, rng);
            out(c * kChunk + k, 0) = max_eigenvalue(B);
            for (Eigen::Index j = 1; j < nt; ++j) {
                B = ou_transition(B, cfg.times[j] - cfg.times[j - 1], rng);
                out(c * kChunk + k, j) = max_eigenvalue(B);
            }
        }
    });
    return out;
}

double rescale_edge(double lam_top, int n) {
    if (n < 1) throw DomainError("rescale_edge: n must be >= 1");
    return std::sqrt(2.0) * std::pow(static_cast<double>(n), 1.0 / 6.0) * (lam_top - std::sqrt(2.0 * n));
}

double rescale_bulk(double lam, int n) {
    if (n < 1) throw DomainError("rescale_bulk: n must be >= 1");
    return std::sqrt(2.0 * n) / std::numbers::pi * lam;
}

NonexplosionResult nonexplosion_experiment(int n, double t, double z, double a, long samples,
                                           std::uint64_t seed, Exec exec, double min_acceptance) {
    if (n < 1 || samples < 1) throw DomainError("nonexplosion_experiment: need n >= 1 and samples >= 1");
    if (!(t > 0.0) || !(z > 0.0) || !std::isfinite(a))
        throw DomainError("nonexplosion_experiment: need t > 0, z > 0, finite a");
    const long chunks = (samples + kChunk - 1) / kChunk;
    std::vector<long> cond_hits(chunks, 0), bound_hits(chunks, 0), proposals(chunks, 0), accepts(chunks, 0);
    std::vector<int> starved(chunks, 0);
    const double shift = a + std::exp(-t) * z;
    for_chunks(chunks, exec, [&](long c) {
        // separate stream families for conditioned and stationary parts
        Rng rng = substream(seed, 2 * static_cast<std::uint64_t>(c));
        Rng rng_b = substream(seed, 2 * static_cast<std::uint64_t>(c) + 1);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const long count = std::min(kChunk, samples - c * kChunk);
        const double cap = count / min_acceptance;
        long accepted = 0, tried = 0, hc = 0;
        while (accepted < count) {
            if (tried > cap) {
                starved[c] = 1;
                break;
            }
            ++tried;
            HermitianMatrix B = sample_stationary(n, rng);
            for (int i = 0; i < n; ++i) B(i, i) -= z;
            const double tr = B.trace().real();
            // cheap trace test first; the eigenvalue event only when it passes
            if (unif(rng) >= std::exp(2.0 * z * (tr + n * z))) continue;
            if (max_eigenvalue(B) > -z) continue;
            ++accepted;
            if (max_eigenvalue(ou_transition(B, t, rng)) >= a) ++hc;
        }
        long hb = 0;
        for (long k = 0; k < count; ++k)
            if (max_eigenvalue(sample_stationary(n, rng_b)) >= shift) ++hb;
        cond_hits[c] = hc;
        bound_hits[c] = hb;
        proposals[c] = tried;
        accepts[c] = accepted;
    });
    long tot_c = 0, tot_b = 0, tot_p = 0, tot_a = 0;
    bool any_starved = false;
    for (long c = 0; c < chunks; ++c) {
        tot_c += cond_hits[c];
        tot_b += bound_hits[c];
        tot_p += proposals[c];
        tot_a += accepts[c];
        any_starved = any_starved || starved[c];
    }
    NonexplosionResult r;
    r.proposals = tot_p;
    if (any_starved) {
        throw SamplingError("nonexplosion_experiment: acceptance rate fell below " + std::to_string(min_acceptance),
                            static_cast<double>(tot_a) / std::max<long>(tot_p, 1));
    }
    r.acceptance_rate = static_cast<double>(samples) / tot_p;
    r.p_cond = EmpiricalJoint::from_counts(tot_c, samples);
    r.p_bound = EmpiricalJoint::from_counts(tot_b, samples);
    return r;
}

}  // namespace dasp
