#pragma once

#include "sphclust/model.hpp"

#include <span>
#include <vector>

namespace sphclust {

/// S_I: the (d - |I|)-dimensional sphere along which the sink spheres in I
/// meet. It lives in the affine space through `center` orthogonal to the
/// directions spanned by the sphere centers.
struct IntersectionSphere {
    Point center;
    double radius_sq = 0.0;
    std::vector<int> indices;
    /// Coefficients of `center` over the sphere centers; they sum to 1.
    Eigen::VectorXd barycentric;
    /// Orthonormal basis (d x (|I|-1)) of span{c_i - c_first, i in I}.
    Eigen::MatrixXd normal_basis;

    double radius() const;
    /// Closest point of S_I to p. Throws NumericalLoss when p projects onto
    /// the center.
    Point project(const Point& p) const;
};

struct GeometryOptions {
    /// Same band as `signature`, used to recognise indices a point already sits on.
    double tol_sign = kDefaultTolSign;
    /// Two crossing parameters t_i, t_j tie when |t_i - t_j| <= tie_tol (1 + t).
    double tie_tol = 1e-10;
    /// Condition estimate above which the center system is deemed singular.
    double max_condition = 1e12;
};

IntersectionSphere sphere_intersection(const Problem& problem, std::span<const int> indices,
                                       const GeometryOptions& opts = {});

/// Minimizer of f_J restricted to the intersection sphere.
Point min_on_intersection(const Problem& problem, const IntersectionSphere& inter,
                          std::span<const int> target);
Point min_on_intersection(const Problem& problem, std::span<const int> on_spheres,
                          std::span<const int> target);

struct LineCrossing {
    /// False when no sphere of I+ or I- is met for t > 0.
    bool crossed = false;
    /// Distance along the unit direction.
    double t = 0.0;
    Point point;
    /// Input signature with the changing indices moved into I0.
    CellSignature signature;
    std::vector<int> changed;
};

/// First point along x + t u, t > 0, that leaves the cell `sig`.
LineCrossing line_crossing(const Problem& problem, const Point& x, const Point& direction,
                           const CellSignature& sig, const GeometryOptions& opts = {});

struct GeodesicCrossing {
    /// True when the arc reaches y without leaving the cell.
    bool reached_target = false;
    Point point;
    CellSignature signature;
    std::vector<int> changed;
    /// Frame coordinates of the crossing: point = C + s u + t v.
    double s = 0.0;
    double t = 0.0;
    /// Arc angle from x, in (0, angle of y].
    double angle = 0.0;
};

/// Walks the shorter great-circle arc of `inter` from x toward y and returns
/// the first point where a sphere outside I0 is met.
GeodesicCrossing geodesic_crossing(const Problem& problem, const Point& x, const Point& y,
                                   const IntersectionSphere& inter, const CellSignature& sig,
                                   const GeometryOptions& opts = {});

/// Moves `changed` from I+ / I- into I0, keeping all lists sorted.
CellSignature move_to_zero(const CellSignature& sig, std::span<const int> changed);

} // namespace sphclust
