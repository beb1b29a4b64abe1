#include "ppimex/resolvent.hpp"

#include <algorithm>
#include <cmath>

namespace ppimex {

std::vector<double> sine_basis(std::size_t n) {
    std::vector<double> s(n * n);
    const double scale = std::sqrt(2.0 / static_cast<double>(n + 1));
    const double step = std::numbers::pi / static_cast<double>(n + 1);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t p = 0; p < n; ++p)
            s[j * n + p] =
                scale * std::sin(static_cast<double>((j + 1) * (p + 1)) * step);
    return s;
}

void Resolvents::Tridiagonal::build(std::size_t n, double d, double e) {
    diag = d;
    off = e;
    upper.assign(n, 0.0);
    inv_pivot.assign(n, 0.0);
    double prev_upper = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pivot = d - (i > 0 ? e * prev_upper : 0.0);
        inv_pivot[i] = 1.0 / pivot;
        upper[i] = e * inv_pivot[i];
        prev_upper = upper[i];
    }
}

void Resolvents::Tridiagonal::solve(std::span<const double> v, std::span<double> out) const {
    const std::size_t n = inv_pivot.size();
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        prev = (v[i] - off * prev) * inv_pivot[i];
        out[i] = prev;
    }
    for (std::size_t i = n - 1; i-- > 0;) out[i] -= upper[i] * out[i + 1];
}

Resolvents::Resolvents(const SemilinearSystem& system, double h)
    : h_(h), dim_(system.dim()), diagonal_(system.op() == SemilinearSystem::Operator::diagonal) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ProblemError("step size must be positive");
    const auto lambda = system.lambda();
    if (diagonal_) {
        j1_.resize(dim_);
        j2_.resize(dim_);
        j3_.resize(dim_);
        jhalf_.resize(dim_);
        for (std::size_t p = 0; p < dim_; ++p) {
            const double z = lambda[p] * h;
            j1_[p] = 1.0 / (1.0 + z);
            j2_[p] = 1.0 / (1.0 + kGamma * z);
            jhalf_[p] = 1.0 / (1.0 + 0.5 * z);
            j3_[p] = std::sqrt(jhalf_[p]);
        }
        return;
    }
    const double r = h / (system.dx() * system.dx());
    t1_.build(dim_, 1.0 + 2.0 * r, -r);
    t2_.build(dim_, 1.0 + 2.0 * kGamma * r, -kGamma * r);
    thalf_.build(dim_, 1.0 + r, -0.5 * r);
    const auto s = sine_basis(dim_);
    std::vector<double> d(dim_);
    for (std::size_t p = 0; p < dim_; ++p) d[p] = 1.0 / std::sqrt(1.0 + 0.5 * h * lambda[p]);
    j3_dense_.assign(dim_ * dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = i; j < dim_; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < dim_; ++p) acc += s[i * dim_ + p] * d[p] * s[j * dim_ + p];
            j3_dense_[i * dim_ + j] = acc;
            j3_dense_[j * dim_ + i] = acc;
        }
}

void Resolvents::check(std::span<const double> v, std::span<double> out) const {
    if (v.size() != dim_ || out.size() != dim_) throw ProblemError("resolvent: dimension mismatch");
}

void Resolvents::apply(ResolventKind kind, std::span<const double> v,
                       std::span<double> out) const {
    check(v, out);
    if (diagonal_) {
        const auto& f = kind == ResolventKind::J1 ? j1_ : kind == ResolventKind::J2 ? j2_ : j3_;
        for (std::size_t i = 0; i < dim_; ++i) out[i] = f[i] * v[i];
        return;
    }
    switch (kind) {
        case ResolventKind::J1: t1_.solve(v, out); return;
        case ResolventKind::J2: t2_.solve(v, out); return;
        case ResolventKind::J3: {
            std::vector<double> tmp(dim_, 0.0);
            for (std::size_t i = 0; i < dim_; ++i) {
                double acc = 0.0;
                const double* row = j3_dense_.data() + i * dim_;
                for (std::size_t j = 0; j < dim_; ++j) acc += row[j] * v[j];
                tmp[i] = acc;
            }
            std::copy(tmp.begin(), tmp.end(), out.begin());
            return;
        }
    }
}

void Resolvents::apply_half(std::span<const double> v, std::span<double> out) const {
    check(v, out);
    if (diagonal_) {
        for (std::size_t i = 0; i < dim_; ++i) out[i] = jhalf_[i] * v[i];
        return;
    }
    thalf_.solve(v, out);
}

std::vector<double> resolvent_apply(const SemilinearSystem& system, ResolventKind kind, double h,
                                    std::span<const double> v) {
    const Resolvents r(system, h);
    std::vector<double> out(system.dim());
    r.apply(kind, v, out);
    return out;
}

std::vector<double> resolvent_apply(const SpectralProblem& problem, ResolventKind kind, double h,
                                    std::span<const double> v) {
    return resolvent_apply(problem.system(), kind, h, v);
}

std::vector<double> resolvent_apply(const GridProblem& problem, ResolventKind kind, double h,
                                    std::span<const double> v) {
    return resolvent_apply(problem.system(), kind, h, v);
}

}  // namespace ppimex
