#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace sphclust {

using Point = Eigen::VectorXd;

/// Points stored column-wise (d x n).
class Dataset {
public:
    /// Validates: n >= 2, all coordinates finite, not all points equal.
    explicit Dataset(Eigen::MatrixXd points);

    static Dataset from_rows(const std::vector<std::vector<double>>& rows);

    const Eigen::MatrixXd& points() const noexcept { return points_; }
    auto point(int i) const { return points_.col(i); }
    int dim() const noexcept { return static_cast<int>(points_.rows()); }
    int size() const noexcept { return static_cast<int>(points_.cols()); }

    /// Largest pairwise distance.
    double diameter() const;

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
               a.points_ == b.points_;
    }

private:
    Eigen::MatrixXd points_;
};

/// The immutable spherical-cluster instance for one (dataset, eta).
///
/// Each sub-function f_i(c) = |x_i - c|^2 - eta/(n-1) sum_j |x_j - c|^2 is a
/// scaled spherical power (1 - eta') (|c - c_i|^2 - R_i^2) with
/// eta' = n eta / (n - 1).
class Problem {
public:
    Problem(Dataset dataset, double eta);

    const Dataset& dataset() const noexcept { return dataset_; }
    double eta() const noexcept { return eta_; }
    double eta_prime() const noexcept { return eta_prime_; }
    /// 1 - eta'
    double scale() const noexcept { return scale_; }
    const Point& mean() const noexcept { return mean_; }
    const Eigen::MatrixXd& centers() const noexcept { return centers_; }
    auto center(int i) const { return centers_.col(i); }
    const Eigen::VectorXd& radii_sq() const noexcept { return radii_sq_; }
    double radius_sq(int i) const { return radii_sq_(i); }

    int size() const noexcept { return dataset_.size(); }
    int dim() const noexcept { return dataset_.dim(); }

    /// f_i(c), factored form.
    double f_sub(int i, const Point& c) const;
    /// f_i(c) expanded from the data, used only as a cross-check.
    double f_sub_direct(int i, const Point& c) const;
    /// |c - c_i|^2 - R_i^2
    double power(int i, const Point& c) const;

    /// F(c) = sum_i max(0, f_i(c)).
    double objective(const Point& c) const;

    /// Centroid of the sink centers indexed by `indices`.
    Point centroid(std::span<const int> indices) const;
    /// Gradient of f_J = sum_{i in J} f_i at c.
    Point gradient_sum(std::span<const int> indices, const Point& c) const;

private:
    Dataset dataset_;
    double eta_;
    double eta_prime_;
    double scale_;
    Point mean_;
    Eigen::MatrixXd centers_;
    Eigen::VectorXd radii_sq_;
};

inline Problem build_problem(const Dataset& dataset, double eta) { return Problem(dataset, eta); }

inline double f_sub(const Problem& p, int i, const Point& c) { return p.f_sub(i, c); }
inline double objective(const Problem& p, const Point& c) { return p.objective(c); }

/// Cell of a point in the sphere arrangement: indices outside / on / inside
/// each sink sphere. All three lists are sorted.
struct CellSignature {
    std::vector<int> i_plus;
    std::vector<int> i_zero;
    std::vector<int> i_minus;

    bool full_dimensional() const noexcept { return i_zero.empty(); }
    int codimension() const noexcept { return static_cast<int>(i_zero.size()); }

    friend bool operator==(const CellSignature&, const CellSignature&) = default;
};

inline constexpr double kDefaultTolSign = 1e-9;

/// Index i is on sphere i iff |power_i(c)| <= tol_sign * max(1, R_i^2).
CellSignature signature(const Problem& problem, const Point& c, double tol_sign = kDefaultTolSign);

/// 2 (1 - eta') #I+ (c - c_{I+}); requires a full-dimensional signature.
Point cell_gradient(const Problem& problem, const CellSignature& sig, const Point& c);

} // namespace sphclust
