#pragma once

#include "sphclust/exact_solver.hpp"
#include "sphclust/model.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sphclust {

/// Points exactly on the sphere (within this band relative to max(1, r^2))
/// count as inliers: sink regions are closed.
inline constexpr double kOutlierBand = 1e-9;

/// eta * sigma^2(center), with the unbiased 1/(n-1) distance variance.
double sc_radius_sq(const Problem& problem, const Point& center);

/// |x_i - sphere_center|^2 > radius_sq, beyond the band.
std::vector<bool> outliers_by_distance(const Dataset& data, const Point& sphere_center,
                                       double radius_sq);
/// f_i(center) > 0, beyond the band; equivalent to distance-based
/// classification against the SC sphere.
std::vector<bool> outliers_by_sign(const Problem& problem, const Point& center);

struct EtaReport {
    double eta = 0.0;
    Point center;
    double f_value = 0.0;
    double sc_radius_sq = 0.0;
    int n_out_sc = 0;
    int n_out_com = 0;
    std::optional<double> mean_cost_sc;
    std::optional<double> mean_cost_com;
    std::optional<double> outlier_ratio;
    bool converged = false;
    double gen_grad_norm = 0.0;
    std::array<int, kStepKinds> step_counts{};
    /// Wall time in seconds per method.
    std::map<std::string, double> timings;

    friend bool operator==(const EtaReport&, const EtaReport&) = default;
};

/// Center-dependent fields only (eta through outlier statistics); no
/// convergence information.
EtaReport center_statistics(const Problem& problem, const Point& center);

/// Requires a converged trajectory.
EtaReport eta_report(const Problem& problem, const Trajectory& trajectory,
                     const std::map<std::string, double>& timings = {});

struct ProjectionRow {
    double x = 0.0;
    double y = 0.0;
    bool is_outlier = false;
    std::string label;
};

struct ProjectionTable {
    /// d x 2, orthonormal columns, each with a positive largest-magnitude entry.
    Eigen::MatrixXd directions;
    /// Variance of the data along each direction.
    Eigen::Vector2d variances;
    std::vector<ProjectionRow> rows;
};

/// Top two principal directions of the mean-centered data.
Eigen::MatrixXd principal_directions(const Dataset& data, Eigen::Vector2d* variances = nullptr);

/// Data rows (label "data", outlier flag from f_i(center)) followed by one
/// row per labeled center (outlier flag false).
ProjectionTable principal_projection(const Dataset& data,
                                     const std::vector<std::pair<std::string, Point>>& centers,
                                     const Problem& problem, const Point& center);

} // namespace sphclust
