#pragma once

#include "sphclust/model.hpp"

#include <optional>
#include <vector>

namespace sphclust {

/// Result of min |g + A lambda|^2 over lambda in [0,1]^k.
struct BoxLsqResult {
    Eigen::VectorXd lambda;
    /// g + A lambda
    Eigen::VectorXd residual;
    int iterations = 0;
};

/// Primal active-set method for the box-constrained least-squares problem
/// behind the Clarke gradient. `start`, when given, must have size k and is
/// clamped into the box. Throws QPNotConverged after `max_iterations`
/// working-set changes.
BoxLsqResult solve_box_lsq(const Eigen::VectorXd& g, const Eigen::MatrixXd& a,
                           const std::optional<Eigen::VectorXd>& start = std::nullopt,
                           int max_iterations = 200);

struct ClarkeOptions {
    /// lambda_i is 0 (resp. 1) when within this band of the bound.
    double tol_lambda = 1e-7;
    /// Absolute threshold on |gen_gradient| for declaring a minimum.
    double tol_grad = 1e-8;
    /// |<gen_gradient, grad f_i>| below this, relative to the two norms, for a
    /// bound index flags a degenerate QP.
    double tol_degenerate = 1e-9;
};

struct ClarkeSolution {
    /// Multipliers, aligned with sig.i_zero.
    Eigen::VectorXd lambda;
    Point gen_gradient;
    double gen_grad_norm = 0.0;
    std::vector<int> i_star_plus;
    std::vector<int> i_star_zero;
    std::vector<int> i_star_minus;
    bool is_minimum = false;
    /// A bound multiplier whose gradient is orthogonal to the generalized
    /// gradient: the semiflow is not characterised there.
    bool degenerate = false;

    CellSignature star_signature() const { return {i_star_plus, i_star_zero, i_star_minus}; }
};

/// Minimum-norm element of the Clarke subdifferential at x, and the refined
/// partition of the indices of I0 by their multiplier.
ClarkeSolution solve_clarke_qp(const Problem& problem, const Point& x, const CellSignature& sig,
                               const ClarkeOptions& opts = {},
                               const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

} // namespace sphclust
