#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace dasp {

/// Finite union of disjoint intervals, with optional tails at either end.
/// Endpoints are strictly increasing; a left tail attaches to the first
/// endpoint and a right tail to the last. Whether endpoints belong to the
/// set is immaterial here (everything downstream is a Lebesgue integral).
class IntervalUnion {
public:
    IntervalUnion() = default;  // the empty set
    IntervalUnion(std::vector<double> endpoints, bool left_infinite, bool right_infinite);

    static IntervalUnion empty() { return {}; }
    static IntervalUnion real_line() { return IntervalUnion({}, true, true); }
    static IntervalUnion interval(double a, double b) { return IntervalUnion({a, b}, false, false); }
    static IntervalUnion below(double u) { return IntervalUnion({u}, true, false); }  // (-inf, u]
    static IntervalUnion above(double u) { return IntervalUnion({u}, false, true); }  // [u, inf)

    /// Parses "a:b,c:d" with "-inf"/"inf" allowed at the ends, or "empty"/"all".
    static IntervalUnion parse(const std::string& text);

    const std::vector<double>& endpoints() const { return endpoints_; }
    bool left_infinite() const { return left_; }
    bool right_infinite() const { return right_; }

    bool is_empty() const { return endpoints_.empty() && !left_ && !right_; }
    bool is_full() const { return endpoints_.empty() && left_ && right_; }
    bool is_compact() const { return !left_ && !right_; }
    bool contains(double x) const;

    IntervalUnion complement() const { return IntervalUnion(endpoints_, !left_, !right_); }

    /// Same shape with the finite endpoints replaced (used by stencils).
    IntervalUnion with_endpoints(std::vector<double> endpoints) const {
        return IntervalUnion(std::move(endpoints), left_, right_);
    }

    /// Pieces as (lo, hi) pairs; infinite ends are +-infinity.
    std::vector<std::pair<double, double>> pieces() const;

    std::string to_string() const;

    bool operator==(const IntervalUnion& o) const {
        return endpoints_ == o.endpoints_ && left_ == o.left_ && right_ == o.right_;
    }

private:
    std::vector<double> endpoints_;
    bool left_ = false;
    bool right_ = false;
};

}  // namespace dasp
