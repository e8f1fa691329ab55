#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace abcopt {

/// Closed interval on the extended real line.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x >= lo && x <= hi; }
    double width() const { return hi - lo; }
    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool empty() const { return lo > hi; }

    static Interval whole() { return {}; }

    static Interval intersect(const Interval& a, const Interval& b) {
        return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    }

    static Interval hull(const Interval& a, const Interval& b) {
        return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
    }
};

} // namespace abcopt
