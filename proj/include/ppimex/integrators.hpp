#pragma once

#include "ppimex/problem.hpp"
#include "ppimex/resolvent.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ppimex {

/// The three time integrators.
///   linearized_euler  v' = J1(v + hF(v) + sigma sqrt(h) xi)
///   trapezoidal       (I - h/2 A)u' = (I + h/2 A)u + hF(u) + sigma sqrt(h) xi
///   postprocessed     primary chain u' plus the end-of-run correction u_bar
enum class Scheme { linearized_euler, trapezoidal, postprocessed };

std::string_view scheme_name(Scheme scheme);
/// Accepts `euler`, `linearized_euler`, `trapezoidal`, `new`, `postprocessed`.
Scheme parse_scheme(std::string_view text);

/// Scratch buffers for one trajectory; not shareable between threads.
struct StepWorkspace {
    explicit StepWorkspace(std::size_t n) : a(n), b(n), c(n) {}
    std::vector<double> a, b, c;
};

/// One-step maps of a semilinear system at a fixed step size.
///
/// Noise arguments are the Q-scaled draws xi^Q produced by
/// sample_noise_increment; the maps multiply them by sigma sqrt(h). Output
/// spans may alias the state input.
class Stepper {
public:
    Stepper(SemilinearSystem system, double h);

    const SemilinearSystem& system() const { return system_; }
    const Resolvents& resolvents() const { return resolvents_; }
    double h() const { return h_; }
    std::size_t dim() const { return system_.dim(); }

    void euler(std::span<const double> u, std::span<const double> xi, std::span<double> out,
               StepWorkspace& ws) const;
    void trapezoidal(std::span<const double> u, std::span<const double> xi,
                     std::span<double> out, StepWorkspace& ws) const;
    /// Primary chain of the postprocessed method:
    /// u' = J1(u + hF(u + w/2) + ((sqrt2 - 1)/2) w) + kGamma w, w = sigma sqrt(h) J2 xi.
    void postprocessed(std::span<const double> u, std::span<const double> xi,
                       std::span<double> out, StepWorkspace& ws) const;
    /// u_bar = u + (1/2) sigma sqrt(h) J3 xi.
    void postprocess(std::span<const double> u, std::span<const double> xi,
                     std::span<double> out, StepWorkspace& ws) const;

    void step(Scheme scheme, std::span<const double> u, std::span<const double> xi,
              std::span<double> out, StepWorkspace& ws) const;

private:
    void check(std::span<const double> u, std::span<const double> xi,
               std::span<double> out) const;

    SemilinearSystem system_;
    double h_;
    double noise_factor_;
    Resolvents resolvents_;
};

std::vector<double> step_linearized_euler(const SemilinearSystem& system, double h,
                                          std::span<const double> v,
                                          std::span<const double> xi);
std::vector<double> step_trapezoidal(const SemilinearSystem& system, double h,
                                     std::span<const double> u, std::span<const double> xi);
/// Returns (u_{n+1}, u_bar_n), both driven by the same draw.
std::pair<std::vector<double>, std::vector<double>> step_new_spde(const SemilinearSystem& system,
                                                                  double h,
                                                                  std::span<const double> u,
                                                                  std::span<const double> xi);

/// Markov state of a chain. For the postprocessed scheme u_bar holds the
/// correction of the previous iterate with that step's draw.
struct StepperState {
    std::vector<double> u;
    std::optional<std::vector<double>> u_bar;
    std::uint64_t step_index = 0;
    double h = 0.0;
};

/// Advances the state by one step with the given draw.
void advance(const Stepper& stepper, Scheme scheme, StepperState& state,
             std::span<const double> xi, StepWorkspace& ws);

/// Writes rows `step_index t x_1 ... x_N` every `stride` steps.
class PathRecorder {
public:
    explicit PathRecorder(std::ostream& out, std::uint64_t stride = 1);
    void record(std::uint64_t step_index, double t, std::span<const double> state);

private:
    std::ostream* out_;
    std::uint64_t stride_;
};

struct TrajectoryResult {
    std::vector<double> u;
    /// Postprocessed final value for the postprocessed scheme, else a copy of u.
    std::vector<double> u_bar;
};

/// Iterates a scheme with the counter-based stream for (seed, trajectory).
///
/// With substeps = k each step consumes the normalised sum of k consecutive
/// fine draws, so runs at h and h/k share their Brownian path. The final
/// postprocessor draw uses NoiseStream::kPostprocessStep. A recorder sees u_n
/// for the baselines and u_bar_n for the postprocessed scheme.
TrajectoryResult run_trajectory(const Stepper& stepper, Scheme scheme, std::uint64_t n_steps,
                                std::uint64_t seed, std::uint64_t trajectory,
                                std::span<const double> u0, PathRecorder* recorder = nullptr,
                                std::uint32_t substeps = 1);
TrajectoryResult run_trajectory(const SemilinearSystem& system, Scheme scheme, double h,
                                std::uint64_t n_steps, std::uint64_t seed,
                                std::span<const double> u0, PathRecorder* recorder = nullptr);

/// Coefficients of the perturbed Euler family
///   Y' = Y + h f1(Y' + a1 w) + h f2(Y + a2 w) + (I + a3 h f1') w
///   Y_bar = Y + b1 h f1(Y_bar) + b2 h f2(Y) + c w,   w = sigma sqrt(h) xi.
struct SchemeCoefficients {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, b1 = 0.0, b2 = 0.0, c = 0.0;

    /// a1 = -a3 = (sqrt5 - 2)/2, a2 = c = 1/2, b1 = b2 = 0.
    static SchemeCoefficients canonical();
};

/// dX = (f1(X) + f2(X)) dt + sigma dW with f1 treated implicitly.
struct SdeProblem {
    std::size_t dim = 1;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f1;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> f1_jacobian;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f2;
    double sigma = 1.0;
    /// Set when f1 is linear: factorizations are then computed once.
    bool f1_linear = false;

    /// f1 = A x, f2 = 0 convenience.
    static SdeProblem linear(const Eigen::MatrixXd& a, double sigma);
};

class NewtonFailure : public std::runtime_error {
public:
    NewtonFailure(const std::string& what, std::uint64_t step_index)
        : std::runtime_error(what + " at step " + std::to_string(step_index)),
          step_index_(step_index) {}
    std::uint64_t step_index() const { return step_index_; }

private:
    std::uint64_t step_index_;
};

class SingularFactor : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NewtonOptions {
    double tolerance = 1e-12;
    int max_iterations = 50;
};

struct SdeStepResult {
    Eigen::VectorXd x_next;
    Eigen::VectorXd x_bar;
    int newton_iterations = 0;
};

/// Implicit-explicit scheme for nonlinear SDEs with the resolvents
/// J1 = (I - h f1'(X))^{-1}, J2 = (I - kGamma h f1'(X))^{-1} and
/// J3 J3^T = (I - (h/2) f1'(X))^{-1} (J3 from a Cholesky factor):
///   X' = X + h f1(X' + a1 J2 w) + h f2(X + a2 J2 w) + (c1 J1^{-1} + c2) J2 w
///   X_bar = X + b1 h f1(X_bar) + b2 h f2(X) + c J3 w
/// with c1 = kGamma - a3 and c2 = 1 - c1. The implicit stages use damped
/// Newton iterations.
class SdeStepper {
public:
    SdeStepper(SdeProblem problem, SchemeCoefficients coeffs, double h,
               NewtonOptions options = {});

    SdeStepResult step(const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                       std::uint64_t step_index = 0) const;

private:
    struct Factors {
        Eigen::MatrixXd jac;
        Eigen::PartialPivLU<Eigen::MatrixXd> j2;
        Eigen::MatrixXd j3_upper;  // L^T with L L^T = I - (h/2) f1'
    };
    Factors factor(const Eigen::VectorXd& x, std::uint64_t step_index) const;
    Eigen::VectorXd solve_implicit(const Eigen::VectorXd& guess, double coef,
                                   const Eigen::VectorXd& offset, const Eigen::VectorXd& rhs,
                                   std::uint64_t step_index, int& iterations) const;

    SdeProblem problem_;
    SchemeCoefficients coeffs_;
    double h_;
    NewtonOptions options_;
    std::optional<Factors> cached_;
};

SdeStepResult step_new_sde(const SdeProblem& problem, const SchemeCoefficients& coeffs, double h,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                           std::uint64_t step_index = 0);

}  // namespace ppimex
