#include "ppimex/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace ppimex {

std::string_view functional_name(Functional f) {
    switch (f) {
        case Functional::exp_neg_sq_norm: return "exp_neg_sq_norm";
        case Functional::second_moment: return "second_moment";
        case Functional::custom: return "custom";
    }
    return "?";
}

Functional parse_functional(std::string_view text) {
    if (text == "exp_neg_sq_norm" || text == "exp") return Functional::exp_neg_sq_norm;
    if (text == "second_moment" || text == "sq_norm") return Functional::second_moment;
    throw std::invalid_argument("unknown functional '" + std::string(text) + "'");
}

double evaluate_functional(Functional f, const SemilinearSystem& system,
                           std::span<const double> u) {
    switch (f) {
        case Functional::exp_neg_sq_norm: return std::exp(-system.squared_norm(u));
        case Functional::second_moment: return system.squared_norm(u);
        case Functional::custom: break;
    }
    throw std::invalid_argument("custom functional needs a callable");
}

unsigned default_worker_count() {
    if (const char* env = std::getenv("PPIMEX_WORKERS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 4096)
            throw std::invalid_argument("PPIMEX_WORKERS must be a positive integer");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

const CoupledEntry& CoupledResult::entry(Scheme scheme, double h) const {
    for (const auto& e : entries)
        if (e.scheme == scheme && std::abs(e.h - h) <= 1e-12 * h) return e;
    throw std::out_of_range("no entry for this scheme and step size");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

McEstimate to_estimate(const RunningStats& s, std::uint64_t seed) {
    return {s.mean(), s.stderr_of_mean(), s.count(), seed};
}

std::uint64_t checked_steps(double T, double h) {
    const double steps = std::round(T / h);
    if (!(steps >= 1.0)) throw std::invalid_argument("T must be at least one step");
    if (steps >= static_cast<double>(NoiseStream::kPostprocessStep))
        throw std::invalid_argument("too many steps for the noise counter");
    return static_cast<std::uint64_t>(steps);
}

}  // namespace

CoupledResult coupled_compare(const SemilinearSystem& system, std::span<const Scheme> schemes,
                              const McConfig& cfg) {
    if (schemes.empty()) throw std::invalid_argument("no schemes to compare");
    if (cfg.h_grid.empty()) throw std::invalid_argument("empty step-size grid");
    if (cfg.n_samples == 0) throw std::invalid_argument("n_samples must be positive");
    if (!(cfg.T > 0.0)) throw std::invalid_argument("final time must be positive");
    if (cfg.block_size == 0) throw std::invalid_argument("block size must be positive");
    if (cfg.functional == Functional::custom && !cfg.custom)
        throw std::invalid_argument("custom functional needs a callable");
    for (double h : cfg.h_grid)
        if (!(h > 0.0)) throw std::invalid_argument("step sizes must be positive");
    const std::size_t dim = system.dim();
    std::vector<double> u0 = cfg.u0.empty() ? std::vector<double>(dim, 0.0) : cfg.u0;
    if (u0.size() != dim) throw std::invalid_argument("initial state has the wrong dimension");

    const bool fine_ref = cfg.reference == ReferenceKind::fine_step;
    const double hmin = *std::min_element(cfg.h_grid.begin(), cfg.h_grid.end());
    const double base = cfg.h_ref > 0.0 ? cfg.h_ref : (fine_ref ? hmin / 8.0 : hmin);
    const std::size_t nh = cfg.h_grid.size(), ns = schemes.size();

    std::vector<std::uint64_t> steps(nh), ratio(nh, 1);
    const std::uint64_t n_fine = checked_steps(cfg.T, base);
    for (std::size_t i = 0; i < nh; ++i) {
        const double h = cfg.h_grid[i];
        steps[i] = checked_steps(cfg.T, h);
        if (cfg.coupling) {
            const double k = std::round(h / base);
            if (k < 1.0 || std::abs(k * base - h) > 1e-9 * h)
                throw std::invalid_argument("coupled step sizes must be multiples of the base step");
            ratio[i] = static_cast<std::uint64_t>(k);
            if (steps[i] * ratio[i] != n_fine)
                throw std::invalid_argument("final time must be a multiple of every step size");
        }
    }

    std::vector<Stepper> steppers;
    steppers.reserve(nh);
    for (double h : cfg.h_grid) steppers.emplace_back(system, h);
    const Stepper ref_stepper(system, base);

    const auto phi = [&](std::span<const double> u) {
        return cfg.functional == Functional::custom ? cfg.custom(system, u)
                                                    : evaluate_functional(cfg.functional, system, u);
    };

    // Slot layout: 0 reference, then per (scheme, h) estimate and error, then
    // per h and scheme pair the difference.
    const std::size_t n_pairs = ns * (ns - 1) / 2;
    const std::size_t slot_entries = 1;
    const std::size_t slot_pairs = slot_entries + 2 * ns * nh;
    const std::size_t n_slots = slot_pairs + n_pairs * nh;
    const std::uint64_t n_blocks = (cfg.n_samples + cfg.block_size - 1) / cfg.block_size;
    std::vector<std::vector<RunningStats>> block_stats(n_blocks,
                                                       std::vector<RunningStats>(n_slots));
    std::vector<std::uint64_t> block_failures(n_blocks, 0);
    const auto scale = system.noise_scale();

    auto process_block = [&](std::uint64_t block) {
        StepWorkspace ws(dim);
        std::vector<double> fine(cfg.coupling || fine_ref ? n_fine * dim : 0);
        std::vector<double> coarse, post(dim), u(dim), bar(dim), xi(dim);
        std::vector<double> values(ns * nh);
        auto& stats = block_stats[block];
        const std::uint64_t first = block * cfg.block_size;
        const std::uint64_t last = std::min(cfg.n_samples, first + cfg.block_size);
        for (std::uint64_t traj = first; traj < last; ++traj) {
            bool ok = true;
            double ref_value = 0.0;
            try {
                const NoiseStream shared(cfg.seed, traj);
                const NoiseStream ref_stream(cfg.coupling ? cfg.seed : splitmix64(cfg.seed), traj);
                if (!fine.empty()) {
                    const NoiseStream& fs = cfg.coupling ? shared : ref_stream;
                    for (std::uint64_t j = 0; j < n_fine; ++j)
                        fs.standard_normals(static_cast<std::uint32_t>(j),
                                            std::span<double>(fine.data() + j * dim, dim));
                }
                auto run = [&](const Stepper& st, Scheme scheme, std::uint64_t n,
                               const double* incs, std::span<const double> post_draw) {
                    std::copy(u0.begin(), u0.end(), u.begin());
                    for (std::uint64_t m = 0; m < n; ++m)
                        st.step(scheme, u, std::span<const double>(incs + m * dim, dim), u, ws);
                    const auto finite = [](std::span<const double> x) {
                        return std::all_of(x.begin(), x.end(),
                                           [](double v) { return std::isfinite(v); });
                    };
                    const double nan = std::numeric_limits<double>::quiet_NaN();
                    if (scheme == Scheme::postprocessed) {
                        st.postprocess(u, post_draw, bar, ws);
                        return finite(bar) ? phi(bar) : nan;
                    }
                    return finite(u) ? phi(u) : nan;
                };
                if (fine_ref) {
                    coarse.assign(fine.begin(), fine.end());
                    for (std::size_t j = 0; j < coarse.size(); ++j) coarse[j] *= scale[j % dim];
                    sample_noise_increment(system, ref_stream, NoiseStream::kPostprocessStep,
                                           post);
                    ref_value = run(ref_stepper, Scheme::postprocessed, n_fine, coarse.data(),
                                    post);
                    ok = ok && std::isfinite(ref_value);
                }
                for (std::size_t i = 0; i < nh && ok; ++i) {
                    const std::uint64_t n = steps[i];
                    coarse.assign(n * dim, 0.0);
                    const NoiseStream own(splitmix64(cfg.seed ^ (0x5851F42D4C957F2Dull * (i + 1))),
                                          traj);
                    const NoiseStream& stream = cfg.coupling ? shared : own;
                    if (cfg.coupling) {
                        const std::uint64_t k = ratio[i];
                        const double norm = 1.0 / std::sqrt(static_cast<double>(k));
                        for (std::uint64_t m = 0; m < n; ++m) {
                            double* out = coarse.data() + m * dim;
                            if (k == 1) {
                                std::copy_n(fine.data() + m * dim, dim, out);
                            } else {
                                for (std::uint64_t j = 0; j < k; ++j) {
                                    const double* row = fine.data() + (m * k + j) * dim;
                                    for (std::size_t c = 0; c < dim; ++c) out[c] += row[c];
                                }
                                for (std::size_t c = 0; c < dim; ++c) out[c] *= norm;
                            }
                        }
                    } else {
                        for (std::uint64_t m = 0; m < n; ++m)
                            stream.standard_normals(static_cast<std::uint32_t>(m),
                                                    std::span<double>(coarse.data() + m * dim, dim));
                    }
                    for (std::size_t j = 0; j < coarse.size(); ++j) coarse[j] *= scale[j % dim];
                    sample_noise_increment(system, stream, NoiseStream::kPostprocessStep, post);
                    for (std::size_t s = 0; s < ns; ++s) {
                        const double v = run(steppers[i], schemes[s], n, coarse.data(), post);
                        values[s * nh + i] = v;
                        ok = ok && std::isfinite(v);
                    }
                }
            } catch (const std::exception&) {
                ok = false;
            }
            if (!ok) {
                ++block_failures[block];
                continue;
            }
            if (fine_ref) stats[0].add(ref_value);
            for (std::size_t s = 0; s < ns; ++s)
                for (std::size_t i = 0; i < nh; ++i) {
                    const double v = values[s * nh + i];
                    const std::size_t slot = slot_entries + 2 * (s * nh + i);
                    stats[slot].add(v);
                    if (fine_ref)
                        stats[slot + 1].add(v - ref_value);
                    else if (cfg.reference == ReferenceKind::analytic)
                        stats[slot + 1].add(v - cfg.analytic_value);
                }
            std::size_t pair = 0;
            for (std::size_t a = 0; a < ns; ++a)
                for (std::size_t b = a + 1; b < ns; ++b, ++pair)
                    for (std::size_t i = 0; i < nh; ++i)
                        stats[slot_pairs + pair * nh + i].add(values[a * nh + i] -
                                                              values[b * nh + i]);
        }
    };

    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(
        cfg.workers ? cfg.workers : default_worker_count(), n_blocks));
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) process_block(b);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                try {
                    for (std::uint64_t b; (b = next.fetch_add(1)) < n_blocks;) process_block(b);
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }

    std::vector<RunningStats> total(n_slots);
    std::uint64_t failures = 0;
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
        for (std::size_t k = 0; k < n_slots; ++k) total[k].merge(block_stats[b][k]);
        failures += block_failures[b];
    }
    if (static_cast<double>(failures) > 1e-3 * static_cast<double>(cfg.n_samples))
        throw McAborted(std::to_string(failures) + " of " + std::to_string(cfg.n_samples) +
                        " trajectories failed");

    CoupledResult out;
    out.T = cfg.T;
    out.base_step = base;
    out.failures = failures;
    if (fine_ref) out.reference = to_estimate(total[0], cfg.seed);
    if (cfg.reference == ReferenceKind::analytic)
        out.reference = {cfg.analytic_value, 0.0, 0, cfg.seed};
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t i = 0; i < nh; ++i) {
            const std::size_t slot = slot_entries + 2 * (s * nh + i);
            out.entries.push_back({schemes[s], cfg.h_grid[i], steps[i],
                                   to_estimate(total[slot], cfg.seed),
                                   to_estimate(total[slot + 1], cfg.seed)});
        }
    std::size_t pair = 0;
    for (std::size_t a = 0; a < ns; ++a)
        for (std::size_t b = a + 1; b < ns; ++b, ++pair)
            for (std::size_t i = 0; i < nh; ++i)
                out.differences.push_back({schemes[a], schemes[b], cfg.h_grid[i],
                                           to_estimate(total[slot_pairs + pair * nh + i],
                                                       cfg.seed)});
    return out;
}

std::vector<McEstimate> estimate_functional(const SemilinearSystem& system, Scheme scheme,
                                            const McConfig& config) {
    const Scheme one[] = {scheme};
    const auto result = coupled_compare(system, one, config);
    std::vector<McEstimate> out;
    for (const auto& e : result.entries) out.push_back(e.estimate);
    return out;
}

OrderFit global_order_fit(std::span<const ErrorPoint> points) {
    if (points.size() < 4) throw std::invalid_argument("order fit needs at least 4 step sizes");
    OrderFit out;
    for (const auto& p : points) {
        if (!(p.h > 0.0)) throw std::invalid_argument("order fit needs positive step sizes");
        if (std::abs(p.error) < 3.0 * p.std_error || p.error == 0.0)
            out.excluded.push_back(p);
        else
            out.used.push_back(p);
    }
    if (out.used.size() < 3)
        throw std::invalid_argument("fewer than 3 step sizes have errors above 3 standard errors");
    const bool weighted =
        std::all_of(out.used.begin(), out.used.end(), [](const ErrorPoint& p) {
            return p.std_error > 0.0;
        });
    std::vector<double> h, e, w;
    for (const auto& p : out.used) {
        h.push_back(p.h);
        e.push_back(std::abs(p.error));
        if (weighted) w.push_back((p.error / p.std_error) * (p.error / p.std_error));
    }
    const auto fit = fit_loglog(h, e, w);
    out.slope = fit.slope;
    out.slope_stderr = fit.slope_stderr;
    out.intercept = fit.intercept;
    return out;
}

McEstimate time_average(const SemilinearSystem& system, Scheme scheme, double h,
                        std::uint64_t n_steps, std::uint64_t burn_in, std::uint64_t seed,
                        Functional functional, std::uint64_t n_batches) {
    if (functional == Functional::custom)
        throw std::invalid_argument("time averages need a built-in functional");
    if (n_batches < 2 || n_steps < n_batches)
        throw std::invalid_argument("need at least two batches of at least one step");
    if (n_steps + burn_in >= NoiseStream::kPostprocessStep)
        throw std::invalid_argument("too many steps for the noise counter");
    const Stepper stepper(system, h);
    const std::size_t dim = system.dim();
    StepWorkspace ws(dim);
    const NoiseStream stream(seed, 0);
    std::vector<double> u(dim, 0.0), xi(dim), bar(dim);
    const std::uint64_t batch_len = n_steps / n_batches;
    RunningStats all, batches, current;
    for (std::uint64_t k = 0; k < burn_in + n_steps; ++k) {
        sample_noise_increment(system, stream, static_cast<std::uint32_t>(k), xi);
        if (k >= burn_in) {
            double v;
            if (scheme == Scheme::postprocessed) {
                stepper.postprocess(u, xi, bar, ws);
                v = evaluate_functional(functional, system, bar);
            } else {
                v = evaluate_functional(functional, system, u);
            }
            all.add(v);
            const std::uint64_t idx = k - burn_in;
            if (idx < batch_len * n_batches) {
                current.add(v);
                if (current.count() == batch_len) {
                    batches.add(current.mean());
                    current = RunningStats{};
                }
            }
        }
        stepper.step(scheme, u, xi, u, ws);
    }
    return {all.mean(), batches.stderr_of_mean(), all.count(), seed};
}

}  // namespace ppimex
