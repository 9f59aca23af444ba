#pragma once

#include "sphclust/cellgeom.hpp"
#include "sphclust/clarke.hpp"
#include "sphclust/model.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sphclust {

enum class StartKind { Mean, Point, Random };

struct SolverConfig {
    /// Relative stationarity threshold; see `gradient_tolerance`.
    double tol_grad = 1e-8;
    double tol_sign = kDefaultTolSign;
    double tol_lambda = 1e-7;
    /// 0 selects 10 n + 1000.
    int max_steps = 0;
    StartKind start = StartKind::Mean;
    Point start_point;
    std::uint64_t seed = 0;
    /// Jitter displacement is jitter_scale * 1e-9 * diameter.
    double jitter_scale = 100.0;
    int max_jitters = 5;
    bool record_trace = true;

    void validate() const;
    int step_limit(int n) const { return max_steps > 0 ? max_steps : 10 * n + 1000; }
};

enum class StepKind { Teleport, LineDescent, SphereDescent, MinJump };
inline constexpr int kStepKinds = 4;

constexpr std::string_view to_string(StepKind k) {
    switch (k) {
    case StepKind::Teleport: return "Teleport";
    case StepKind::LineDescent: return "LineDescent";
    case StepKind::SphereDescent: return "SphereDescent";
    case StepKind::MinJump: return "MinJump";
    }
    return "Unknown";
}

enum class SolveStatus { Converged, StepLimitExceeded, NonGenericGeometry };

constexpr std::string_view to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::StepLimitExceeded: return "StepLimitExceeded";
    case SolveStatus::NonGenericGeometry: return "NonGenericGeometry";
    }
    return "Unknown";
}

struct Step {
    StepKind kind;
    Point point;
    CellSignature signature;
    double f_value = 0.0;
    /// Generalized gradient norm at `point`.
    double gen_grad_norm = 0.0;
};

struct Trajectory {
    Point start;
    double start_f = 0.0;
    /// Moves only; the start is not a step. Empty unless record_trace.
    std::vector<Step> steps;
    Point final_point;
    double final_f = 0.0;
    double final_gen_grad_norm = 0.0;
    CellSignature final_signature;
    /// Absolute threshold the final point was tested against.
    double grad_tolerance = 0.0;
    bool converged = false;
    SolveStatus status = SolveStatus::StepLimitExceeded;
    std::array<int, kStepKinds> step_counts{};
    int jitters = 0;
    std::string diagnostics;

    int total_steps() const;
    int count(StepKind k) const { return step_counts[static_cast<int>(k)]; }
};

/// Absolute stationarity threshold tol_grad (1 + |g0|), with g0 the
/// generalized gradient at the barycenter.
double gradient_tolerance(const Problem& problem, const SolverConfig& config);

Trajectory solve(const Problem& problem, const SolverConfig& config = {});

struct Certificate {
    double gen_grad_norm = 0.0;
    bool is_minimum = false;
    CellSignature signature;
};

/// Recomputes the cell and the Clarke QP at x from scratch.
Certificate certify(const Problem& problem, const Point& x, const SolverConfig& config = {});
Certificate certify(const Problem& problem, const Point& x, const SolverConfig& config,
                    double grad_tolerance);

/// Restarts `solve` from `trials` points drawn uniformly in the ball of
/// `radius` around x_star; returns the largest step count observed.
int convergence_radius_check(const Problem& problem, const Point& x_star, int trials,
                             double radius, const SolverConfig& config = {});

} // namespace sphclust
