#include "ppimex/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ppimex {

double RunningStats::stderr_of_mean() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> weights) {
    const std::size_t n = x.size();
    if (y.size() != n || (!weights.empty() && weights.size() != n))
        throw std::invalid_argument("fit: length mismatch");
    if (n < 2) throw std::invalid_argument("fit needs at least two points");
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("fit: bad weight");
        sw += w;
        sx += w * x[i];
        sy += w * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        sxx += w * (x[i] - mx) * (x[i] - mx);
        sxy += w * (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit: abscissae are all equal");
    LineFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        rss += w * r * r;
    }
    fit.residual_rms = std::sqrt(rss / sw);
    fit.slope_stderr = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
    return fit;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y,
                   std::span<const double> weights) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) throw std::invalid_argument("log fit: abscissa must be positive");
        lx[i] = std::log(x[i]);
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0)) throw std::invalid_argument("log fit: ordinate must be positive");
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly, weights);
}

}  // namespace ppimex
