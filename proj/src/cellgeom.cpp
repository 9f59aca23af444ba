#include "sphclust/cellgeom.hpp"

#include "sphclust/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sphclust {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool on_sphere(const Problem& problem, int i, const Point& x, double tol_sign) {
    return std::abs(problem.power(i, x)) <= tol_sign * std::max(1.0, problem.radius_sq(i));
}

// Smallest positive root of t^2 + b t + c = 0 (monic), +inf if none.
double smallest_positive_root(double b, double c) {
    const double disc = b * b - 4.0 * c;
    if (disc < 0.0)
        return kInf;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double best = kInf;
    if (q > 0.0)
        best = q;
    if (q != 0.0) {
        const double other = c / q;
        if (other > 0.0)
            best = std::min(best, other);
    }
    return best;
}

double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    return a < 0.0 ? a + two_pi : a;
}

// Keeps the running minimum and the set of indices tied with it.
struct FirstHit {
    double value = kInf;
    std::vector<int> indices;
    double tie_tol = 0.0;

    void offer(int i, double v) {
        if (!(v < kInf))
            return;
        if (std::abs(v - value) <= tie_tol * (1.0 + std::abs(value))) {
            indices.push_back(i);
            value = std::min(value, v);
        } else if (v < value) {
            value = v;
            indices.assign(1, i);
        }
    }
};

std::vector<int> cell_boundary_candidates(const CellSignature& sig) {
    std::vector<int> out;
    out.reserve(sig.i_plus.size() + sig.i_minus.size());
    std::merge(sig.i_plus.begin(), sig.i_plus.end(), sig.i_minus.begin(), sig.i_minus.end(),
               std::back_inserter(out));
    return out;
}

} // namespace

double IntersectionSphere::radius() const { return std::sqrt(std::max(0.0, radius_sq)); }

Point IntersectionSphere::project(const Point& p) const {
    Point q = p - center;
    if (normal_basis.cols() > 0)
        q -= normal_basis * (normal_basis.transpose() * q);
    const double norm = q.norm();
    const double r = radius();
    if (!(norm > 1e-14 * std::max(1.0, r)))
        throw Error(ErrorKind::NumericalLoss, "point projects onto the intersection center");
    return center + (r / norm) * q;
}

IntersectionSphere sphere_intersection(const Problem& problem, std::span<const int> indices,
                                       const GeometryOptions& opts) {
    const int k = static_cast<int>(indices.size());
    const int d = problem.dim();
    if (k < 1)
        throw Error(ErrorKind::InvalidArgument, "empty index set");
    if (k > d)
        throw Error(ErrorKind::SingularIntersection,
                    std::to_string(k) + " spheres cannot meet transversely in dimension " +
                        std::to_string(d));

    IntersectionSphere out;
    out.indices.assign(indices.begin(), indices.end());
    const int first = indices[0];
    const Point c0 = problem.center(first);
    const double r0 = problem.radius_sq(first);

    if (k == 1) {
        out.center = c0;
        out.radius_sq = r0;
        out.barycentric = Eigen::VectorXd::Ones(1);
        out.normal_basis = Eigen::MatrixXd(d, 0);
        return out;
    }

    // Work relative to c_first so that |c|^2 terms never appear. Rows
    // 1..k-1: <sum_i lambda_i c_i - c_first, e_m> = K_m with
    // e_m = c_m - c_first; last row: sum_i lambda_i = 1.
    Eigen::MatrixXd e(d, k);
    for (int m = 0; m < k; ++m)
        e.col(m) = problem.center(indices[m]) - c0;

    Eigen::MatrixXd sys(k, k);
    Eigen::VectorXd rhs(k);
    for (int m = 1; m < k; ++m) {
        const double em_sq = e.col(m).squaredNorm();
        if (!(em_sq > 0.0))
            throw Error(ErrorKind::SingularIntersection, "coincident sphere centers");
        for (int i = 0; i < k; ++i)
            sys(m - 1, i) = e.col(i).dot(e.col(m)) / em_sq;
        rhs(m - 1) = 0.5 * (r0 - problem.radius_sq(indices[m]) + em_sq) / em_sq;
    }
    sys.row(k - 1).setOnes();
    rhs(k - 1) = 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
    const double rcond = lu.rcond();
    if (!(rcond * opts.max_condition > 1.0))
        throw Error(ErrorKind::SingularIntersection,
                    "center system is ill-conditioned (rcond=" + std::to_string(rcond) + ")");
    out.barycentric = lu.solve(rhs);

    const Point offset = e * out.barycentric;
    out.center = c0 + offset;
    const double rs = r0 - offset.squaredNorm();
    if (rs < -1e-12 * std::max(1.0, r0))
        throw Error(ErrorKind::EmptyIntersection, "spheres do not meet (R_S^2=" +
                                                       std::to_string(rs) + ")");
    out.radius_sq = std::max(0.0, rs);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(e.rightCols(k - 1));
    out.normal_basis = qr.householderQ() * Eigen::MatrixXd::Identity(d, k - 1);
    return out;
}

Point min_on_intersection(const Problem& problem, const IntersectionSphere& inter,
                          std::span<const int> target) {
    if (target.empty())
        throw Error(ErrorKind::InvalidArgument, "empty target index set");
    const Point c = problem.centroid(target);
    const Point anchor = problem.center(inter.indices.front());
    Point b = c - anchor;
    if (inter.normal_basis.cols() > 0)
        b -= inter.normal_basis * (inter.normal_basis.transpose() * b);
    const double b_norm = b.norm();
    const double scale = std::max({1.0, inter.radius(), (c - inter.center).norm()});
    if (!(b_norm > 1e-12 * scale))
        throw Error(ErrorKind::DegenerateProjection,
                    "target center lies in the affine hull of the sphere centers");
    const Point dir = b / b_norm;
    const Point y1 = inter.center + inter.radius() * dir;
    const Point y2 = inter.center - inter.radius() * dir;
    return (y1 - c).squaredNorm() >= (y2 - c).squaredNorm() ? y2 : y1;
}

Point min_on_intersection(const Problem& problem, std::span<const int> on_spheres,
                          std::span<const int> target) {
    return min_on_intersection(problem, sphere_intersection(problem, on_spheres), target);
}

CellSignature move_to_zero(const CellSignature& sig, std::span<const int> changed) {
    std::vector<int> moved(changed.begin(), changed.end());
    std::sort(moved.begin(), moved.end());
    auto strip = [&](const std::vector<int>& from) {
        std::vector<int> out;
        std::set_difference(from.begin(), from.end(), moved.begin(), moved.end(),
                            std::back_inserter(out));
        return out;
    };
    CellSignature out;
    out.i_plus = strip(sig.i_plus);
    out.i_minus = strip(sig.i_minus);
    std::set_union(sig.i_zero.begin(), sig.i_zero.end(), moved.begin(), moved.end(),
                   std::back_inserter(out.i_zero));
    return out;
}

LineCrossing line_crossing(const Problem& problem, const Point& x, const Point& direction,
                           const CellSignature& sig, const GeometryOptions& opts) {
    const double norm = direction.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw Error(ErrorKind::InvalidArgument, "direction must be a non-zero finite vector");
    const Point u = direction / norm;

    FirstHit hit;
    hit.tie_tol = opts.tie_tol;
    for (int i : cell_boundary_candidates(sig)) {
        const Point rel = x - problem.center(i);
        const double b = 2.0 * rel.dot(u);
        double t;
        if (on_sphere(problem, i, x, opts.tol_sign)) {
            // One root is the departure point itself.
            t = -b > 0.0 ? -b : kInf;
        } else {
            t = smallest_positive_root(b, problem.power(i, x));
        }
        hit.offer(i, t);
    }

    LineCrossing out;
    if (hit.indices.empty()) {
        out.signature = sig;
        out.point = x;
        return out;
    }
    out.crossed = true;
    out.t = hit.value;
    out.point = x + hit.value * u;
    std::sort(hit.indices.begin(), hit.indices.end());
    out.changed = hit.indices;
    out.signature = move_to_zero(sig, out.changed);
    return out;
}

GeodesicCrossing geodesic_crossing(const Problem& problem, const Point& x, const Point& y,
                                   const IntersectionSphere& inter, const CellSignature& sig,
                                   const GeometryOptions& opts) {
    const Point& center = inter.center;
    const double r = inter.radius();
    const Point xr = x - center;
    const double x_norm = xr.norm();
    if (!(x_norm > 1e-12 * std::max(1.0, r)))
        throw Error(ErrorKind::NumericalLoss, "start point coincides with the sphere center");
    const Point u = xr / x_norm;
    const Point yr = y - center;
    const double y_u = yr.dot(u);
    Point v = yr - y_u * u;
    const double v_norm = v.norm();
    if (!(v_norm > 1e-9 * std::max(r, 1e-300))) {
        if (y_u < 0.0)
            throw Error(ErrorKind::AntipodalEndpoints, "geodesic endpoints are antipodal");
        throw Error(ErrorKind::NumericalLoss, "geodesic endpoints coincide");
    }
    v /= v_norm;
    const double target_angle = std::atan2(yr.dot(v), y_u);

    FirstHit hit;
    hit.tie_tol = opts.tie_tol;
    const double r_sq = r * r;
    for (int i : cell_boundary_candidates(sig)) {
        const Point di = problem.center(i) - center;
        const double wx = di.dot(u);
        const double wy = di.dot(v);
        const double w_sq = wx * wx + wy * wy;
        double best = kInf;
        auto consider = [&](double angle) {
            angle = wrap_angle(angle);
            if (angle > 0.0 && angle <= target_angle)
                best = std::min(best, angle);
        };
        if (on_sphere(problem, i, x, opts.tol_sign)) {
            // h(theta) vanishes at theta = 0 and at theta = 2 atan2(wy, wx).
            if (w_sq > 0.0)
                consider(2.0 * std::atan2(wy, wx));
        } else if (w_sq > 0.0) {
            // Crossings solve s wx + t wy = D, s^2 + t^2 = R^2.
            const double dd = 0.5 * (r_sq + di.squaredNorm() - problem.radius_sq(i));
            const double delta = r_sq - dd * dd / w_sq;
            if (delta > 0.0) {
                const double along = dd / w_sq;
                const double across = std::sqrt(delta / w_sq);
                for (double sign : {1.0, -1.0}) {
                    const double s = along * wx - sign * across * wy;
                    const double t = along * wy + sign * across * wx;
                    consider(std::atan2(t, s));
                }
            }
        }
        hit.offer(i, best);
    }

    GeodesicCrossing out;
    if (hit.indices.empty()) {
        out.reached_target = true;
        out.point = inter.project(y);
        out.signature = sig;
        out.angle = target_angle;
        out.s = r * std::cos(target_angle);
        out.t = r * std::sin(target_angle);
        return out;
    }
    out.angle = hit.value;
    out.s = r * std::cos(hit.value);
    out.t = r * std::sin(hit.value);
    out.point = inter.project(center + out.s * u + out.t * v);
    std::sort(hit.indices.begin(), hit.indices.end());
    out.changed = hit.indices;
    out.signature = move_to_zero(sig, out.changed);
    return out;
}

} // namespace sphclust
