#include "sphclust/medians.hpp"

#include "sphclust/errors.hpp"
#include "sphclust/random.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace sphclust {

Point center_of_mass(const Eigen::MatrixXd& points) {
    if (points.cols() < 1)
        throw Error(ErrorKind::InvalidArgument, "center of mass of an empty set");
    return points.rowwise().mean();
}

ProjectionMedian projection_median(const Dataset& data, const Eigen::MatrixXd& directions) {
    if (directions.cols() < 1)
        throw Error(ErrorKind::InvalidArgument, "at least one direction is required");
    if (directions.rows() != data.dim())
        throw Error(ErrorKind::InvalidArgument, "direction dimension mismatch");
    const int n = data.size();
    const auto& x = data.points();

    Eigen::VectorXd weights = Eigen::VectorXd::Zero(n);
    std::vector<int> order(static_cast<std::size_t>(n));
    Eigen::VectorXd proj(n);
    for (Eigen::Index j = 0; j < directions.cols(); ++j) {
        proj = x.transpose() * directions.col(j);
        std::iota(order.begin(), order.end(), 0);
        // Ties broken by index so the responsible point is well defined.
        auto less = [&](int a, int b) { return proj(a) < proj(b) || (proj(a) == proj(b) && a < b); };
        const auto lower = static_cast<std::ptrdiff_t>((n - 1) / 2);
        std::nth_element(order.begin(), order.begin() + lower, order.end(), less);
        const int mid_lo = order[static_cast<std::size_t>(lower)];
        if (n % 2 == 1) {
            weights(mid_lo) += 1.0;
        } else {
            const int mid_hi = *std::min_element(order.begin() + lower + 1, order.end(), less);
            weights(mid_lo) += 0.5;
            weights(mid_hi) += 0.5;
        }
    }
    weights /= weights.sum();
    return {x * weights, weights};
}

ProjectionMedian projection_median(const Dataset& data, int num_directions, std::uint64_t seed) {
    if (num_directions < 1)
        throw Error(ErrorKind::InvalidArgument, "num_directions must be >= 1");
    Rng rng(seed);
    Eigen::MatrixXd dirs(data.dim(), num_directions);
    for (int j = 0; j < num_directions; ++j)
        dirs.col(j) = random_unit(rng, data.dim());
    return projection_median(data, dirs);
}

std::string sc_label(double eta) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "sc@%.6g", eta);
    return buf;
}

CenterReport center_report(const Point& mean, const std::map<double, Point>& sc_centers,
                           const Point& projection_median) {
    CenterReport rep;
    rep.mean = mean;
    rep.sc_centers = sc_centers;
    rep.projection_median = projection_median;

    std::vector<std::pair<std::string, const Point*>> all;
    all.emplace_back("mean", &rep.mean);
    all.emplace_back("projection_median", &rep.projection_median);
    for (const auto& [eta, c] : rep.sc_centers)
        all.emplace_back(sc_label(eta), &c);
    for (const auto& [label, p] : all)
        rep.labels.push_back(label);
    for (const auto& [la, pa] : all)
        for (const auto& [lb, pb] : all)
            rep.pairwise_distances[{la, lb}] = la == lb ? 0.0 : (*pa - *pb).norm();
    return rep;
}

} // namespace sphclust
