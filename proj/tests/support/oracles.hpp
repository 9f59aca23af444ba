#pragma once

#include "sphclust/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace oracles {

inline double box_lsq_value(const Eigen::VectorXd& g, const Eigen::MatrixXd& a,
                            const Eigen::VectorXd& lambda) {
    return (g + a * lambda).squaredNorm();
}

/// Largest KKT violation of lambda for min |g + A lambda|^2 on [0,1]^k,
/// using the gradient of |.|^2 / 2 and the given bound band.
inline double kkt_violation(const Eigen::VectorXd& g, const Eigen::MatrixXd& a,
                            const Eigen::VectorXd& lambda, double band = 1e-9) {
    const Eigen::VectorXd grad = a.transpose() * (g + a * lambda);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double l = lambda(i);
        worst = std::max(worst, std::max(0.0, -l));
        worst = std::max(worst, std::max(0.0, l - 1.0));
        if (l <= band)
            worst = std::max(worst, -grad(i));
        else if (l >= 1.0 - band)
            worst = std::max(worst, grad(i));
        else
            worst = std::max(worst, std::abs(grad(i)));
    }
    return worst;
}

/// Grid search over [0,1]^k (k <= 3): spacing 0.1 over the whole box, then
/// 0.01 and 0.001 in windows of two coarse cells around the running best.
/// Every grid contains the box corners' coordinates 0 and 1.
inline double grid_box_lsq(const Eigen::VectorXd& g, const Eigen::MatrixXd& a) {
    const int k = static_cast<int>(a.cols());
    Eigen::VectorXd best = Eigen::VectorXd::Constant(k, 0.5);
    double best_val = box_lsq_value(g, a, best);
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd hi = Eigen::VectorXd::Ones(k);
    for (double h : {0.1, 0.01, 0.001}) {
        std::vector<int> count(k);
        for (int i = 0; i < k; ++i)
            count[i] = static_cast<int>(std::lround((hi(i) - lo(i)) / h)) + 1;
        std::vector<int> idx(k, 0);
        Eigen::VectorXd lam(k);
        while (true) {
            for (int i = 0; i < k; ++i)
                lam(i) = std::clamp(lo(i) + h * idx[i], 0.0, 1.0);
            const double v = box_lsq_value(g, a, lam);
            if (v < best_val) {
                best_val = v;
                best = lam;
            }
            int pos = 0;
            while (pos < k && ++idx[pos] == count[pos])
                idx[pos++] = 0;
            if (pos == k)
                break;
        }
        for (int i = 0; i < k; ++i) {
            lo(i) = std::max(0.0, std::round((best(i) - h) / (h / 10)) * (h / 10));
            hi(i) = std::min(1.0, std::round((best(i) + h) / (h / 10)) * (h / 10));
        }
    }
    return best_val;
}

struct BoxQp {
    Eigen::VectorXd g;
    Eigen::MatrixXd a;
};

/// Columns with norms in [0.2, 1.5] and |g| <= 3, so the 1e-3 grid is
/// within about 1e-5 of the true optimum.
inline BoxQp random_box_qp(sphclust::Rng& rng, int k, int d) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    BoxQp qp;
    qp.a.resize(d, k);
    for (int j = 0; j < k; ++j)
        qp.a.col(j) = (0.2 + 1.3 * unif(rng)) * sphclust::random_unit(rng, d);
    qp.g = 3.0 * unif(rng) * sphclust::random_unit(rng, d);
    return qp;
}

} // namespace oracles
