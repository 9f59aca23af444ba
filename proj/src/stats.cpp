#include "sphclust/stats.hpp"

#include "sphclust/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sphclust {

double sc_radius_sq(const Problem& problem, const Point& center) {
    const auto& x = problem.dataset().points();
    const double var = (x.colwise() - center).colwise().squaredNorm().sum() / (problem.size() - 1.0);
    return problem.eta() * var;
}

std::vector<bool> outliers_by_distance(const Dataset& data, const Point& sphere_center,
                                       double radius_sq) {
    std::vector<bool> out(static_cast<std::size_t>(data.size()));
    const double band = kOutlierBand * std::max(1.0, radius_sq);
    for (int i = 0; i < data.size(); ++i)
        out[i] = (data.point(i) - sphere_center).squaredNorm() - radius_sq > band;
    return out;
}

std::vector<bool> outliers_by_sign(const Problem& problem, const Point& center) {
    const double band = kOutlierBand * std::max(1.0, sc_radius_sq(problem, center));
    std::vector<bool> out(static_cast<std::size_t>(problem.size()));
    for (int i = 0; i < problem.size(); ++i)
        out[i] = problem.f_sub(i, center) > band;
    return out;
}

EtaReport center_statistics(const Problem& problem, const Point& center) {
    EtaReport rep;
    rep.eta = problem.eta();
    rep.center = center;
    rep.f_value = problem.objective(center);
    rep.sc_radius_sq = sc_radius_sq(problem, center);

    const auto& data = problem.dataset();
    const auto sc = outliers_by_distance(data, center, rep.sc_radius_sq);
    const auto com = outliers_by_distance(data, problem.mean(), rep.sc_radius_sq);
    rep.n_out_sc = static_cast<int>(std::count(sc.begin(), sc.end(), true));
    rep.n_out_com = static_cast<int>(std::count(com.begin(), com.end(), true));
    if (rep.n_out_sc > 0) {
        rep.mean_cost_sc = rep.f_value / rep.n_out_sc;
        rep.outlier_ratio = static_cast<double>(rep.n_out_com) / rep.n_out_sc;
    }
    if (rep.n_out_com > 0)
        rep.mean_cost_com = rep.f_value / rep.n_out_com;
    return rep;
}

EtaReport eta_report(const Problem& problem, const Trajectory& trajectory,
                     const std::map<std::string, double>& timings) {
    if (!trajectory.converged)
        throw Error(ErrorKind::InvalidArgument, "statistics need a converged solve");
    EtaReport rep = center_statistics(problem, trajectory.final_point);
    rep.converged = true;
    rep.gen_grad_norm = trajectory.final_gen_grad_norm;
    rep.step_counts = trajectory.step_counts;
    rep.timings = timings;
    return rep;
}

Eigen::MatrixXd principal_directions(const Dataset& data, Eigen::Vector2d* variances) {
    if (data.dim() < 2)
        throw Error(ErrorKind::InvalidArgument, "principal projection needs d >= 2");
    const Eigen::MatrixXd centered =
        (data.points().colwise() - data.points().rowwise().mean()).transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double scale = std::max(1.0, data.points().cwiseAbs().maxCoeff());
    if (!(sv(0) > 1e-14 * scale))
        throw Error(ErrorKind::RankDeficient, "data has no variance");

    Eigen::MatrixXd dirs = svd.matrixV().leftCols(2);
    for (int j = 0; j < 2; ++j) {
        Eigen::Index arg;
        dirs.col(j).cwiseAbs().maxCoeff(&arg);
        if (dirs(arg, j) < 0.0)
            dirs.col(j) = -dirs.col(j);
    }
    if (variances) {
        const double denom = data.size() - 1.0;
        (*variances)(0) = sv(0) * sv(0) / denom;
        (*variances)(1) = sv.size() > 1 ? sv(1) * sv(1) / denom : 0.0;
    }
    return dirs;
}

ProjectionTable principal_projection(const Dataset& data,
                                     const std::vector<std::pair<std::string, Point>>& centers,
                                     const Problem& problem, const Point& center) {
    ProjectionTable table;
    table.directions = principal_directions(data, &table.variances);
    const Point mean = data.points().rowwise().mean();
    const auto flags = outliers_by_sign(problem, center);
    auto project = [&](const Point& p) -> Eigen::Vector2d {
        return table.directions.transpose() * (p - mean);
    };
    for (int i = 0; i < data.size(); ++i) {
        const Eigen::Vector2d q = project(data.point(i));
        table.rows.push_back({q(0), q(1), flags[i], "data"});
    }
    for (const auto& [label, p] : centers) {
        const Eigen::Vector2d q = project(p);
        table.rows.push_back({q(0), q(1), false, label});
    }
    return table;
}

} // namespace sphclust
