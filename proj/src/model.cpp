#include "sphclust/model.hpp"

#include "sphclust/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sphclust {

Dataset::Dataset(Eigen::MatrixXd points) : points_(std::move(points)) {
    if (points_.cols() < 2)
        throw Error(ErrorKind::DegenerateData, "a dataset needs at least two points");
    if (points_.rows() < 1)
        throw Error(ErrorKind::DegenerateData, "points must have at least one coordinate");
    if (!points_.allFinite())
        throw Error(ErrorKind::DegenerateData, "non-finite coordinate");
    bool distinct = false;
    for (Eigen::Index j = 1; j < points_.cols() && !distinct; ++j)
        distinct = points_.col(j) != points_.col(0);
    if (!distinct)
        throw Error(ErrorKind::DegenerateData, "all points coincide");
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty())
        throw Error(ErrorKind::DegenerateData, "no points");
    const auto d = rows.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].size() != d)
            throw Error(ErrorKind::RaggedRows, "row " + std::to_string(j + 1) + " has " +
                                                   std::to_string(rows[j].size()) +
                                                   " values, expected " + std::to_string(d));
        for (std::size_t k = 0; k < d; ++k)
            m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = rows[j][k];
    }
    return Dataset(std::move(m));
}

double Dataset::diameter() const {
    const auto n = points_.cols();
    // Exact for desk-scale data; the bounding-box diagonal (an upper bound
    // within a factor sqrt(d)) beyond that.
    if (n <= 4096) {
        double best = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                best = std::max(best, (points_.col(i) - points_.col(j)).squaredNorm());
        return std::sqrt(best);
    }
    return (points_.rowwise().maxCoeff() - points_.rowwise().minCoeff()).norm();
}

Problem::Problem(Dataset dataset, double eta) : dataset_(std::move(dataset)), eta_(eta) {
    const int n = dataset_.size();
    const double nd = n;
    if (!(eta > 0.0) || !(nd * eta < nd - 1.0)) {
        std::ostringstream os;
        os << "eta=" << eta << " must lie in (0, 1 - 1/n) = (0, " << 1.0 - 1.0 / nd << ")";
        throw Error(ErrorKind::EtaOutOfRange, os.str());
    }
    eta_prime_ = nd * eta / (nd - 1.0);
    scale_ = 1.0 - eta_prime_;

    const auto& x = dataset_.points();
    mean_ = x.rowwise().mean();
    // Centered coordinates keep R_i^2 free of the cancellation in
    // |c_i|^2 - (|x_i|^2 - eta'/n sum |x_j|^2) / (1 - eta').
    const Eigen::MatrixXd y = x.colwise() - mean_;
    const Eigen::VectorXd y_sq = y.colwise().squaredNorm().transpose();
    const double var = y_sq.mean();

    centers_ = (y / scale_).colwise() + mean_;
    radii_sq_ = (eta_prime_ / (scale_ * scale_)) * y_sq.array() + eta_prime_ * var / scale_;
    for (int i = 0; i < n; ++i)
        if (!(radii_sq_(i) > 0.0))
            throw Error(ErrorKind::DegenerateData, "sink sphere " + std::to_string(i) +
                                                       " has non-positive radius");
}

double Problem::power(int i, const Point& c) const {
    return (c - centers_.col(i)).squaredNorm() - radii_sq_(i);
}

double Problem::f_sub(int i, const Point& c) const { return scale_ * power(i, c); }

double Problem::f_sub_direct(int i, const Point& c) const {
    const auto& x = dataset_.points();
    const double total = (x.colwise() - c).colwise().squaredNorm().sum();
    return (x.col(i) - c).squaredNorm() - eta_ / (size() - 1.0) * total;
}

double Problem::objective(const Point& c) const {
    double sum = 0.0;
    for (int i = 0; i < size(); ++i)
        sum += std::max(0.0, power(i, c));
    return scale_ * sum;
}

Point Problem::centroid(std::span<const int> indices) const {
    Point acc = Point::Zero(dim());
    for (int i : indices)
        acc += centers_.col(i);
    if (!indices.empty())
        acc /= static_cast<double>(indices.size());
    return acc;
}

Point Problem::gradient_sum(std::span<const int> indices, const Point& c) const {
    if (indices.empty())
        return Point::Zero(dim());
    return 2.0 * scale_ * static_cast<double>(indices.size()) * (c - centroid(indices));
}

CellSignature signature(const Problem& problem, const Point& c, double tol_sign) {
    if (tol_sign < 0.0)
        throw Error(ErrorKind::InvalidArgument, "tol_sign must be non-negative");
    CellSignature sig;
    for (int i = 0; i < problem.size(); ++i) {
        const double pw = problem.power(i, c);
        const double band = tol_sign * std::max(1.0, problem.radius_sq(i));
        if (std::abs(pw) <= band)
            sig.i_zero.push_back(i);
        else if (pw > 0.0)
            sig.i_plus.push_back(i);
        else
            sig.i_minus.push_back(i);
    }
    return sig;
}

Point cell_gradient(const Problem& problem, const CellSignature& sig, const Point& c) {
    if (!sig.full_dimensional())
        throw Error(ErrorKind::NotFullDimensional,
                    "gradient requested on a cell of codimension " +
                        std::to_string(sig.codimension()));
    return problem.gradient_sum(sig.i_plus, c);
}

} // namespace sphclust
