#pragma once

#include <cmath>
#include <cstddef>

namespace adl {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Welford mean/variance; merge() combines two disjoint streams (Chan et al.),
// so merging per-chunk moments in a fixed order is deterministic.
class RunningMoments {
public:
    void add(double x) {
        ++n_;
        double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }
    void merge(const RunningMoments& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        double n = static_cast<double>(n_ + o.n_);
        double delta = o.mean_ - mean_;
        mean_ += delta * static_cast<double>(o.n_) / n;
        m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
        n_ += o.n_;
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    // Unbiased sample variance (n − 1 denominator); 0 for n < 2.
    double variance() const { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }
    double standard_error() const {
        return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace adl
