#pragma once

#include <stdexcept>
#include <string>

namespace dasp {

/// Invalid argument or unsupported parameter range.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A kernel branch was requested that is not defined for the given times.
class BranchError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A truncation or refinement did not reach the requested tolerance.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Factorization breakdown, singular operator, or a degenerate evaluation point.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejection sampling could not keep the acceptance rate above its floor.
class SamplingError : public std::runtime_error {
public:
    SamplingError(const std::string& what, double rate)
        : std::runtime_error(what), rate_(rate) {}
    double observed_rate() const noexcept { return rate_; }

private:
    double rate_;
};

}  // namespace dasp
