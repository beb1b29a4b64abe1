#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace ppimex {

/// Streaming mean and variance (Welford) with an exact pairwise merge.
class RunningStats {
public:
    void add(double x) {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    void merge(const RunningStats& other) {
        if (other.n_ == 0) return;
        if (n_ == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(n_);
        const double nb = static_cast<double>(other.n_);
        const double delta = other.mean_ - mean_;
        const double total = na + nb;
        mean_ += delta * nb / total;
        m2_ += other.m2_ + delta * delta * na * nb / total;
        n_ += other.n_;
    }

    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    /// Unbiased sample variance; 0 for fewer than two samples.
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stderr_of_mean() const;

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    /// Root-mean-square of the weighted residuals.
    double residual_rms = 0.0;
    std::size_t points = 0;
};

/// Weighted least-squares line y = intercept + slope x. Empty weights mean
/// unit weights. Throws std::invalid_argument for fewer than two points or a
/// degenerate abscissa.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> weights = {});

/// Fit of log(y) against log(x); all entries must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y,
                   std::span<const double> weights = {});

}  // namespace ppimex
