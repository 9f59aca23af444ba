#pragma once

#include "sphclust/model.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sphclust {

Point center_of_mass(const Eigen::MatrixXd& points);
inline Point center_of_mass(const Dataset& data) { return center_of_mass(data.points()); }

struct ProjectionMedian {
    Point point;
    /// Per data point, non-negative, summing to 1.
    Eigen::VectorXd weights;
};

/// Weighted average of the points realising the univariate median of each
/// projection <x_i, theta>. For even n the two middle points share the
/// weight. Directions are columns of `directions` (need not be unit).
ProjectionMedian projection_median(const Dataset& data, const Eigen::MatrixXd& directions);

/// Same, with `num_directions` uniform random unit directions.
ProjectionMedian projection_median(const Dataset& data, int num_directions, std::uint64_t seed);

inline int default_num_directions(int dim) { return std::max(1000, 50 * dim); }

struct CenterReport {
    Point mean;
    std::map<double, Point> sc_centers;
    Point projection_median;
    /// Keyed by label pairs in both orders, including the diagonal.
    std::map<std::pair<std::string, std::string>, double> pairwise_distances;
    std::vector<std::string> labels;
};

/// Labels: "mean", "projection_median", and "sc@<eta>" per SC center.
CenterReport center_report(const Point& mean, const std::map<double, Point>& sc_centers,
                           const Point& projection_median);

std::string sc_label(double eta);

} // namespace sphclust
