#include "sphclust/exact_solver.hpp"

#include "sphclust/errors.hpp"
#include "sphclust/random.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace sphclust {

void SolverConfig::validate() const {
    if (!(tol_grad > 0.0) || !(tol_sign > 0.0) || !(tol_lambda > 0.0) || !(tol_lambda < 0.5))
        throw Error(ErrorKind::InvalidArgument, "solver tolerances must be positive");
    if (max_steps < 0)
        throw Error(ErrorKind::InvalidArgument, "max_steps must be >= 1 (0 for the default)");
    if (!(jitter_scale > 0.0) || max_jitters < 0)
        throw Error(ErrorKind::InvalidArgument, "invalid jitter settings");
}

int Trajectory::total_steps() const {
    int total = 0;
    for (int c : step_counts)
        total += c;
    return total;
}

namespace {

// Generalized gradient at x for the given cell.
double gen_grad_norm_at(const Problem& problem, const Point& x, const CellSignature& sig,
                        const ClarkeOptions& copts) {
    if (sig.full_dimensional())
        return cell_gradient(problem, sig, x).norm();
    return solve_clarke_qp(problem, x, sig, copts).gen_grad_norm;
}

bool cell_contains(const Problem& problem, const Point& p, const CellSignature& cell,
                   double tol_sign) {
    const CellSignature s = signature(problem, p, tol_sign);
    return s.i_zero.empty() && s.i_plus == cell.i_plus;
}

Point draw_start(const Problem& problem, const SolverConfig& config) {
    switch (config.start) {
    case StartKind::Mean:
        return problem.mean();
    case StartKind::Point:
        if (config.start_point.size() != problem.dim() || !config.start_point.allFinite())
            throw Error(ErrorKind::InvalidArgument, "start point has the wrong dimension");
        return config.start_point;
    case StartKind::Random: {
        Rng rng(derive_seed(config.seed, 0x5747));
        const auto& x = problem.dataset().points();
        const Eigen::VectorXd lo = x.rowwise().minCoeff();
        const Eigen::VectorXd hi = x.rowwise().maxCoeff();
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        Point p(problem.dim());
        for (int k = 0; k < problem.dim(); ++k)
            p(k) = lo(k) + unif(rng) * (hi(k) - lo(k));
        return p;
    }
    }
    return problem.mean();
}

class SemiflowRunner {
public:
    SemiflowRunner(const Problem& problem, const SolverConfig& config)
        : problem_(problem), config_(config), rng_(derive_seed(config.seed, 0x717)) {
        copts_.tol_lambda = config.tol_lambda;
        gopts_.tol_sign = config.tol_sign;
    }

    Trajectory run() {
        config_.validate();
        traj_.grad_tolerance = gradient_tolerance(problem_, config_);
        copts_.tol_grad = traj_.grad_tolerance;

        x_ = draw_start(problem_, config_);
        sig_ = signature(problem_, x_, config_.tol_sign);
        f_ = problem_.objective(x_);
        traj_.start = x_;
        traj_.start_f = f_;

        const int limit = config_.step_limit(problem_.size());
        while (traj_.total_steps() < limit) {
            std::optional<Move> move;
            try {
                move = next_move();
            } catch (const Error& e) {
                note(e.what());
                if (!jitter())
                    return finish(SolveStatus::NonGenericGeometry);
                continue;
            }
            if (!move)
                return finish(SolveStatus::Converged);
            if (!accept(*move) && !jitter())
                return finish(SolveStatus::NonGenericGeometry);
        }
        // One last look: the final step may have landed on the minimizer.
        try {
            if (is_stationary())
                return finish(SolveStatus::Converged);
        } catch (const Error& e) {
            note(e.what());
        }
        return finish(SolveStatus::StepLimitExceeded);
    }

private:
    struct Move {
        StepKind kind;
        Point point;
        std::vector<int> forced_zero;
    };

    bool is_stationary() {
        last_norm_ = gen_grad_norm_at(problem_, x_, sig_, copts_);
        return last_norm_ <= traj_.grad_tolerance;
    }

    // Decides the next move from x; nullopt when x is the minimizer.
    std::optional<Move> next_move() {
        if (sig_.full_dimensional()) {
            const Point grad = cell_gradient(problem_, sig_, x_);
            record_norm(grad.norm());
            if (grad.norm() <= traj_.grad_tolerance)
                return std::nullopt;
            return line_or_teleport(sig_, problem_.centroid(sig_.i_plus) - x_);
        }

        const ClarkeSolution cs = solve_clarke_qp(problem_, x_, sig_, copts_);
        record_norm(cs.gen_grad_norm);
        if (cs.is_minimum)
            return std::nullopt;
        if (cs.degenerate)
            throw Error(ErrorKind::NumericalLoss, "degenerate Clarke QP");

        const CellSignature star = cs.star_signature();
        if (star.i_zero.empty())
            return line_or_teleport(star, -cs.gen_gradient);

        const IntersectionSphere inter = sphere_intersection(problem_, star.i_zero, gopts_);
        const Point y = min_on_intersection(problem_, inter, star.i_plus);
        if (signature(problem_, y, config_.tol_sign) == star)
            return Move{StepKind::MinJump, y, star.i_zero};
        const GeodesicCrossing gc = geodesic_crossing(problem_, x_, y, inter, star, gopts_);
        std::vector<int> forced = gc.signature.i_zero;
        return Move{StepKind::SphereDescent, gc.point, std::move(forced)};
    }

    Move line_or_teleport(const CellSignature& cell, const Point& direction) {
        const Point target = problem_.centroid(cell.i_plus);
        if (cell_contains(problem_, target, cell, config_.tol_sign))
            return Move{StepKind::Teleport, target, {}};
        const LineCrossing lc = line_crossing(problem_, x_, direction, cell, gopts_);
        if (!lc.crossed)
            return Move{StepKind::Teleport, target, {}};
        return Move{StepKind::LineDescent, lc.point, lc.changed};
    }

    bool accept(const Move& move) {
        const double f_new = problem_.objective(move.point);
        if (!std::isfinite(f_new) || f_new > f_ + 1e-12 * (1.0 + std::abs(f_))) {
            std::ostringstream os;
            os << to_string(move.kind) << " step rejected: F " << f_ << " -> " << f_new;
            note(os.str());
            return false;
        }
        const bool progress = f_new < f_ - 1e-14 * (1.0 + std::abs(f_));

        x_ = move.point;
        f_ = f_new;
        sig_ = settle(x_, move.forced_zero);
        ++traj_.step_counts[static_cast<int>(move.kind)];
        if (config_.record_trace)
            traj_.steps.push_back(Step{move.kind, x_, sig_, f_, 0.0});

        stall_ = progress ? 0 : stall_ + 1;
        if (stall_ >= 3) {
            note("no decrease over three steps");
            stall_ = 0;
            return false;
        }
        return true;
    }

    // Recomputed signature, with indices the construction put on a sphere
    // kept in I0.
    CellSignature settle(const Point& x, const std::vector<int>& forced) const {
        CellSignature s = signature(problem_, x, config_.tol_sign);
        std::vector<int> missing;
        for (int i : forced)
            if (!std::binary_search(s.i_zero.begin(), s.i_zero.end(), i))
                missing.push_back(i);
        if (missing.empty())
            return s;
        return move_to_zero(s, missing);
    }

    bool jitter() {
        if (traj_.jitters >= config_.max_jitters)
            return false;
        ++traj_.jitters;
        if (diameter_ < 0.0)
            diameter_ = problem_.dataset().diameter();
        const double amount = config_.jitter_scale * 1e-9 * diameter_;
        x_ += amount * random_unit(rng_, problem_.dim());
        sig_ = signature(problem_, x_, config_.tol_sign);
        f_ = problem_.objective(x_);
        stall_ = 0;
        return true;
    }

    void record_norm(double norm) {
        last_norm_ = norm;
        if (config_.record_trace && !traj_.steps.empty())
            traj_.steps.back().gen_grad_norm = norm;
    }

    void note(const std::string& msg) {
        if (!traj_.diagnostics.empty())
            traj_.diagnostics += "; ";
        traj_.diagnostics += msg;
    }

    Trajectory finish(SolveStatus status) {
        traj_.status = status;
        traj_.converged = status == SolveStatus::Converged;
        traj_.final_point = x_;
        traj_.final_f = f_;
        traj_.final_signature = sig_;
        traj_.final_gen_grad_norm = last_norm_;
        return std::move(traj_);
    }

    const Problem& problem_;
    SolverConfig config_;
    ClarkeOptions copts_;
    GeometryOptions gopts_;
    Rng rng_;
    Trajectory traj_;
    Point x_;
    CellSignature sig_;
    double f_ = 0.0;
    double last_norm_ = 0.0;
    double diameter_ = -1.0;
    int stall_ = 0;
};

} // namespace

double gradient_tolerance(const Problem& problem, const SolverConfig& config) {
    ClarkeOptions copts;
    copts.tol_lambda = config.tol_lambda;
    const Point& m = problem.mean();
    double g0 = 0.0;
    try {
        g0 = gen_grad_norm_at(problem, m, signature(problem, m, config.tol_sign), copts);
    } catch (const Error&) {
        g0 = problem.gradient_sum(signature(problem, m, config.tol_sign).i_plus, m).norm();
    }
    return config.tol_grad * (1.0 + g0);
}

Trajectory solve(const Problem& problem, const SolverConfig& config) {
    return SemiflowRunner(problem, config).run();
}

Certificate certify(const Problem& problem, const Point& x, const SolverConfig& config,
                    double grad_tolerance) {
    Certificate out;
    out.signature = signature(problem, x, config.tol_sign);
    ClarkeOptions copts;
    copts.tol_lambda = config.tol_lambda;
    copts.tol_grad = grad_tolerance;
    out.gen_grad_norm = gen_grad_norm_at(problem, x, out.signature, copts);
    out.is_minimum = out.gen_grad_norm <= grad_tolerance;
    return out;
}

Certificate certify(const Problem& problem, const Point& x, const SolverConfig& config) {
    return certify(problem, x, config, gradient_tolerance(problem, config));
}

int convergence_radius_check(const Problem& problem, const Point& x_star, int trials,
                             double radius, const SolverConfig& config) {
    Rng rng(derive_seed(config.seed, 0xc0de));
    int worst = 0;
    for (int trial = 0; trial < trials; ++trial) {
        SolverConfig cfg = config;
        cfg.start = StartKind::Point;
        cfg.start_point = random_in_ball(rng, x_star, radius);
        cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial));
        worst = std::max(worst, solve(problem, cfg).total_steps());
    }
    return worst;
}

} // namespace sphclust
