#include "dasp/intervals.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "dasp/errors.hpp"

namespace dasp {

IntervalUnion::IntervalUnion(std::vector<double> endpoints, bool left_infinite, bool right_infinite)
    : endpoints_(std::move(endpoints)), left_(left_infinite), right_(right_infinite) {
    for (std::size_t i = 0; i < endpoints_.size(); ++i) {
        if (!std::isfinite(endpoints_[i])) throw DomainError("IntervalUnion: endpoints must be finite");
        if (i > 0 && !(endpoints_[i - 1] < endpoints_[i]))
            throw DomainError("IntervalUnion: endpoints must be strictly increasing");
    }
    const std::size_t ends = endpoints_.size() + (left_ ? 1 : 0) + (right_ ? 1 : 0);
    if (ends % 2 != 0) throw DomainError("IntervalUnion: endpoint count does not match the tails");
}

bool IntervalUnion::contains(double x) const {
    for (auto [lo, hi] : pieces())
        if (x >= lo && x <= hi) return true;
    return false;
}

std::vector<std::pair<double, double>> IntervalUnion::pieces() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> e;
    if (left_) e.push_back(-inf);
    e.insert(e.end(), endpoints_.begin(), endpoints_.end());
    if (right_) e.push_back(inf);
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < e.size(); i += 2) out.emplace_back(e[i], e[i + 1]);
    return out;
}

std::string IntervalUnion::to_string() const {
    if (is_empty()) return "empty";
    if (is_full()) return "all";
    std::ostringstream os;
    bool first = true;
    for (auto [lo, hi] : pieces()) {
        if (!first) os << ',';
        first = false;
        auto put = [&](double v) {
            if (std::isinf(v)) {
                os << (v < 0 ? "-inf" : "inf");
            } else {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                os << buf;
            }
        };
        put(lo);
        os << ':';
        put(hi);
    }
    return os.str();
}

IntervalUnion IntervalUnion::parse(const std::string& text) {
    if (text == "empty") return empty();
    if (text == "all") return real_line();
    std::vector<double> ends;
    bool left = false, right = false;
    std::stringstream ss(text);
    std::string piece;
    std::vector<std::string> parts;
    while (std::getline(ss, piece, ',')) parts.push_back(piece);
    if (parts.empty()) throw DomainError("IntervalUnion::parse: empty text");
    auto number = [](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw DomainError("IntervalUnion::parse: bad number '" + s + "'");
        }
        if (used != s.size()) throw DomainError("IntervalUnion::parse: bad number '" + s + "'");
        return v;
    };
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto colon = parts[i].find(':');
        if (colon == std::string::npos) throw DomainError("IntervalUnion::parse: expected lo:hi in '" + parts[i] + "'");
        const std::string lo = parts[i].substr(0, colon), hi = parts[i].substr(colon + 1);
        if (lo == "-inf") {
            if (i != 0) throw DomainError("IntervalUnion::parse: -inf only allowed first");
            left = true;
        } else {
            ends.push_back(number(lo));
        }
        if (hi == "inf") {
            if (i + 1 != parts.size()) throw DomainError("IntervalUnion::parse: inf only allowed last");
            right = true;
        } else {
            ends.push_back(number(hi));
        }
    }
    return IntervalUnion(std::move(ends), left, right);
}

}  // namespace dasp
