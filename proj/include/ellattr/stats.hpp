#ifndef ELLATTR_STATS_HPP
#define ELLATTR_STATS_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace ellattr {

/// Streaming (count, mean, M2) accumulator, mergeable in any fixed order.
class mean_accumulator {
public:
    void add(double x) {
        n_ += 1;
        const double d = x - mean_;
        mean_ += d / double(n_);
        m2_ += d * (x - mean_);
    }

    /// Chan et al. pairwise merge; used to combine per-chunk accumulators
    /// in deterministic chunk order.
    void merge(const mean_accumulator& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) { *this = o; return; }
        const std::uint64_t n = n_ + o.n_;
        const double d = o.mean_ - mean_;
        m2_ += o.m2_ + d * d * (double(n_) * double(o.n_) / double(n));
        mean_ += d * double(o.n_) / double(n);
        n_ = n;
    }

    std::uint64_t count() const { return n_; }
    double mean() const { return n_ ? mean_ : std::numeric_limits<double>::quiet_NaN(); }
    double variance() const {
        return n_ > 1 ? m2_ / double(n_ - 1) : std::numeric_limits<double>::quiet_NaN();
    }
    double standard_error() const {
        return n_ > 1 ? std::sqrt(variance() / double(n_))
                      : std::numeric_limits<double>::quiet_NaN();
    }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for a binomial proportion. z = 2.5758... gives 99%.
inline interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double p = double(successes) / double(n);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / double(n);
    const double center = p + z2 / (2.0 * double(n));
    const double half = z * std::sqrt(p * (1.0 - p) / double(n) + z2 / (4.0 * double(n) * double(n)));
    double lo = (center - half) / denom;
    double hi = (center + half) / denom;
    if (lo < 0.0) lo = 0.0;
    if (hi > 1.0) hi = 1.0;
    return {lo, hi};
}

inline constexpr double z_99 = 2.5758293035489004;  // two-sided 99% normal quantile

}  // namespace ellattr

#endif
