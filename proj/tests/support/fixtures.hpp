#pragma once

#include "sphclust/model.hpp"
#include "sphclust/random.hpp"

#include <cmath>
#include <random>

namespace fixtures {

using sphclust::Dataset;
using sphclust::Point;
using sphclust::Problem;
using sphclust::Rng;

inline Point vec(std::initializer_list<double> xs) {
    Point p(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs)
        p(k++) = x;
    return p;
}

inline Dataset two_points() {
    Eigen::MatrixXd x(2, 2);
    x << 0, 1, 0, 0;
    return Dataset(x);
}

inline Problem two_point_problem() { return Problem(two_points(), 0.4); }

/// Standard normal points, column-wise.
inline Dataset gaussian_dataset(Rng& rng, int n, int d) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(d, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k)
            x(k, i) = normal(rng);
    return Dataset(x);
}

inline Dataset uniform_dataset(Rng& rng, int n, int d) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd x(d, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k)
            x(k, i) = unif(rng);
    return Dataset(x);
}

/// Gaussian bulk plus a far cluster holding a fifth of the points, so the
/// SC center moves away from the mean as eta grows.
inline Dataset skewed_dataset(Rng& rng, int n, int d) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(d, n);
    const int far = std::max(1, n / 5);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k)
            x(k, i) = (i < far ? 6.0 : 0.0) + (i < far ? 0.5 : 1.0) * normal(rng);
    return Dataset(x);
}

inline Point uniform_in_box(Rng& rng, const Point& lo, const Point& hi) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Point p(lo.size());
    for (Eigen::Index k = 0; k < lo.size(); ++k)
        p(k) = lo(k) + (hi(k) - lo(k)) * unif(rng);
    return p;
}

/// Box around the data, padded by its diameter.
inline std::pair<Point, Point> padded_box(const Dataset& data) {
    const double pad = data.diameter();
    Point lo = data.points().rowwise().minCoeff();
    Point hi = data.points().rowwise().maxCoeff();
    lo.array() -= pad;
    hi.array() += pad;
    return {lo, hi};
}

} // namespace fixtures
