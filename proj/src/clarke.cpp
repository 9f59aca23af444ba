#include "sphclust/clarke.hpp"

#include "sphclust/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sphclust {

namespace {

enum class Bound : signed char { Lower = -1, Free = 0, Upper = 1 };

} // namespace

BoxLsqResult solve_box_lsq(const Eigen::VectorXd& g, const Eigen::MatrixXd& a,
                           const std::optional<Eigen::VectorXd>& start, int max_iterations) {
    const Eigen::Index k = a.cols();
    if (a.rows() != g.size())
        throw Error(ErrorKind::InvalidArgument, "column length does not match g");
    BoxLsqResult out;
    out.lambda = Eigen::VectorXd::Zero(k);
    if (k == 0) {
        out.residual = g;
        return out;
    }
    if (start) {
        if (start->size() != k)
            throw Error(ErrorKind::InvalidArgument, "warm start has the wrong size");
        out.lambda = start->cwiseMax(0.0).cwiseMin(1.0);
    }

    std::vector<Bound> state(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
        const double l = out.lambda(i);
        state[i] = l <= 0.0 ? Bound::Lower : (l >= 1.0 ? Bound::Upper : Bound::Free);
    }

    const double col_scale = std::max(1.0, a.colwise().squaredNorm().maxCoeff());
    const double mult_tol = 1e-13 * col_scale;

    for (int iter = 0; iter < max_iterations; ++iter) {
        out.iterations = iter + 1;
        std::vector<Eigen::Index> free;
        for (Eigen::Index i = 0; i < k; ++i)
            if (state[i] == Bound::Free)
                free.push_back(i);

        bool moved_to_bound = false;
        if (!free.empty()) {
            // Least squares over the free block with bound variables fixed.
            Eigen::VectorXd rhs = -g;
            for (Eigen::Index i = 0; i < k; ++i)
                if (state[i] != Bound::Free)
                    rhs -= out.lambda(i) * a.col(i);
            Eigen::MatrixXd af(a.rows(), static_cast<Eigen::Index>(free.size()));
            for (std::size_t j = 0; j < free.size(); ++j)
                af.col(static_cast<Eigen::Index>(j)) = a.col(free[j]);
            const Eigen::VectorXd target =
                Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(af).solve(rhs);

            double step = 1.0;
            for (std::size_t j = 0; j < free.size(); ++j) {
                const double cur = out.lambda(free[j]);
                const double tgt = target(static_cast<Eigen::Index>(j));
                if (tgt < 0.0)
                    step = std::min(step, cur / (cur - tgt));
                else if (tgt > 1.0)
                    step = std::min(step, (1.0 - cur) / (tgt - cur));
            }
            step = std::clamp(step, 0.0, 1.0);
            for (std::size_t j = 0; j < free.size(); ++j) {
                const auto i = free[j];
                const double tgt = target(static_cast<Eigen::Index>(j));
                const double cur = out.lambda(i);
                double next = cur + step * (tgt - cur);
                if (step < 1.0) {
                    // Variables that hit a bound on this step join the working set.
                    const bool low = tgt < 0.0 && cur / (cur - tgt) <= step;
                    const bool high = tgt > 1.0 && (1.0 - cur) / (tgt - cur) <= step;
                    if (low) {
                        next = 0.0;
                        state[i] = Bound::Lower;
                        moved_to_bound = true;
                    } else if (high) {
                        next = 1.0;
                        state[i] = Bound::Upper;
                        moved_to_bound = true;
                    }
                }
                out.lambda(i) = std::clamp(next, 0.0, 1.0);
            }
        }
        if (moved_to_bound)
            continue;

        // Subproblem optimal: release the bound with the worst multiplier.
        const Eigen::VectorXd grad = a.transpose() * (g + a * out.lambda);
        Eigen::Index worst = -1;
        double worst_val = mult_tol;
        for (Eigen::Index i = 0; i < k; ++i) {
            double violation = 0.0;
            if (state[i] == Bound::Lower)
                violation = -grad(i);
            else if (state[i] == Bound::Upper)
                violation = grad(i);
            if (violation > worst_val) {
                worst_val = violation;
                worst = i;
            }
        }
        if (worst < 0) {
            out.residual = g + a * out.lambda;
            return out;
        }
        state[worst] = Bound::Free;
    }
    throw Error(ErrorKind::QPNotConverged,
                "box least squares did not settle in " + std::to_string(max_iterations) +
                    " iterations");
}

ClarkeSolution solve_clarke_qp(const Problem& problem, const Point& x, const CellSignature& sig,
                               const ClarkeOptions& opts,
                               const std::optional<Eigen::VectorXd>& warm_start) {
    const int d = problem.dim();
    const auto k = static_cast<Eigen::Index>(sig.i_zero.size());
    const Point g = problem.gradient_sum(sig.i_plus, x);
    Eigen::MatrixXd a(d, k);
    for (Eigen::Index j = 0; j < k; ++j)
        a.col(j) = 2.0 * problem.scale() * (x - problem.center(sig.i_zero[j]));

    // Rescaling keeps |g| <= 1; the argmin in lambda is unchanged.
    const double s = 1.0 / std::max(1.0, g.norm());
    const BoxLsqResult qp = solve_box_lsq(s * g, s * a, warm_start);

    ClarkeSolution out;
    out.lambda = qp.lambda;
    out.gen_gradient = g + a * qp.lambda;
    out.gen_grad_norm = out.gen_gradient.norm();
    out.is_minimum = out.gen_grad_norm <= opts.tol_grad;

    out.i_star_plus = sig.i_plus;
    out.i_star_minus = sig.i_minus;
    for (Eigen::Index j = 0; j < k; ++j) {
        const int idx = sig.i_zero[j];
        const double l = qp.lambda(j);
        if (l <= opts.tol_lambda)
            out.i_star_minus.push_back(idx);
        else if (l >= 1.0 - opts.tol_lambda)
            out.i_star_plus.push_back(idx);
        else
            out.i_star_zero.push_back(idx);

        const bool bound = l <= opts.tol_lambda || l >= 1.0 - opts.tol_lambda;
        if (bound && !out.is_minimum) {
            const double dot = out.gen_gradient.dot(a.col(j));
            if (std::abs(dot) <= opts.tol_degenerate * out.gen_grad_norm * a.col(j).norm())
                out.degenerate = true;
        }
    }
    std::sort(out.i_star_plus.begin(), out.i_star_plus.end());
    std::sort(out.i_star_minus.begin(), out.i_star_minus.end());
    return out;
}

} // namespace sphclust
