#pragma once

#include "sphclust/model.hpp"

#include <chrono>
#include <string_view>
#include <vector>

namespace sphclust {

enum class BaselineMethod { QuasiNewton, QuasiNewtonLimited, Subgradient, BruteForce };

constexpr std::string_view to_string(BaselineMethod m) {
    switch (m) {
    case BaselineMethod::QuasiNewton: return "bfgs";
    case BaselineMethod::QuasiNewtonLimited: return "lbfgs";
    case BaselineMethod::Subgradient: return "subgradient";
    case BaselineMethod::BruteForce: return "brute";
    }
    return "unknown";
}

enum class BaselineStatus { Converged, IterationLimit, LineSearchFailed };

struct BaselineResult {
    Point final_point;
    double f_value = 0.0;
    int iterations = 0;
    long f_evals = 0;
    std::chrono::duration<double> wall_time{0.0};
    BaselineMethod method = BaselineMethod::QuasiNewton;
    BaselineStatus status = BaselineStatus::Converged;
    /// Best F after each iteration (brute force: after each outer bracket step).
    std::vector<double> history;
};

/// Central difference step used by the quasi-Newton baselines.
double fd_step(const Point& x);
/// Central finite-difference gradient of F.
Point fd_gradient(const Problem& problem, const Point& x);

/// BFGS (or L-BFGS with `limited_memory`) on F with finite-difference
/// gradients and Armijo backtracking (c1 = 1e-4, factor 0.5). Stops when the
/// gradient estimate drops below `tol`, after 10000 iterations, or when the
/// line search fails from a fresh curvature model.
BaselineResult quasi_newton_min(const Problem& problem, const Point& start, bool limited_memory,
                                double tol = 1e-7);

/// Projected subgradient method with steps D / (G sqrt(k)) over the ball
/// around the barycenter that contains every sink center. Returns the best
/// iterate.
BaselineResult subgradient_min(const Problem& problem, const Point& start, int steps);

/// Nested golden-section search over the bounding box of the sink spheres,
/// each coordinate bracketed down to `tol_pos`. d <= 3 only.
BaselineResult brute_force_min(const Problem& problem, double tol_pos);

} // namespace sphclust
