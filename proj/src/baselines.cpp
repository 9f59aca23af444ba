#include "sphclust/baselines.hpp"

#include "sphclust/errors.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <deque>

namespace sphclust {

namespace {

using Clock = std::chrono::steady_clock;

constexpr int kMaxIterations = 10000;
constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kMaxBacktracks = 60;
constexpr int kLbfgsMemory = 10;

class CountingObjective {
public:
    explicit CountingObjective(const Problem& p) : problem_(p) {}
    double operator()(const Point& x) {
        ++evals_;
        return problem_.objective(x);
    }
    Point gradient(const Point& x) {
        evals_ += 2 * x.size();
        return fd_gradient(problem_, x);
    }
    long evals() const { return evals_; }

private:
    const Problem& problem_;
    long evals_ = 0;
};

// Curvature model: dense inverse Hessian or the two-loop recursion.
class InverseHessian {
public:
    InverseHessian(int dim, bool limited) : dim_(dim), limited_(limited) { reset(1.0); }

    void reset(double gamma) {
        gamma_ = gamma;
        fresh_ = true;
        pairs_.clear();
        if (!limited_)
            dense_ = gamma * Eigen::MatrixXd::Identity(dim_, dim_);
    }

    bool fresh() const { return fresh_; }

    Point apply(const Point& g) const {
        if (!limited_)
            return dense_ * g;
        Point q = g;
        std::vector<double> alpha(pairs_.size());
        for (std::size_t j = pairs_.size(); j-- > 0;) {
            alpha[j] = pairs_[j].rho * pairs_[j].s.dot(q);
            q -= alpha[j] * pairs_[j].y;
        }
        Point r = gamma_ * q;
        for (std::size_t j = 0; j < pairs_.size(); ++j) {
            const double beta = pairs_[j].rho * pairs_[j].y.dot(r);
            r += (alpha[j] - beta) * pairs_[j].s;
        }
        return r;
    }

    void update(const Point& s, const Point& y) {
        const double sy = s.dot(y);
        if (!(sy > 1e-12 * s.norm() * y.norm()))
            return;
        const double rho = 1.0 / sy;
        if (fresh_) {
            gamma_ = sy / y.squaredNorm();
            if (!limited_)
                dense_ = gamma_ * Eigen::MatrixXd::Identity(dim_, dim_);
        }
        fresh_ = false;
        if (limited_) {
            pairs_.push_back({s, y, rho});
            if (static_cast<int>(pairs_.size()) > kLbfgsMemory)
                pairs_.pop_front();
            gamma_ = sy / y.squaredNorm();
            return;
        }
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim_, dim_);
        const Eigen::MatrixXd left = id - rho * s * y.transpose();
        dense_ = left * dense_ * left.transpose() + rho * s * s.transpose();
    }

private:
    struct Pair {
        Point s;
        Point y;
        double rho;
    };
    int dim_;
    bool limited_;
    bool fresh_ = true;
    double gamma_ = 1.0;
    Eigen::MatrixXd dense_;
    std::deque<Pair> pairs_;
};

} // namespace

double fd_step(const Point& x) { return 1e-6 * (1.0 + x.cwiseAbs().maxCoeff()); }

Point fd_gradient(const Problem& problem, const Point& x) {
    const double h = fd_step(x);
    Point g(x.size());
    Point probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        probe(k) = x(k) + h;
        const double up = problem.objective(probe);
        probe(k) = x(k) - h;
        const double down = problem.objective(probe);
        probe(k) = x(k);
        g(k) = (up - down) / (2.0 * h);
    }
    return g;
}

BaselineResult quasi_newton_min(const Problem& problem, const Point& start, bool limited_memory,
                                double tol) {
    if (!(tol > 0.0))
        throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    if (start.size() != problem.dim())
        throw Error(ErrorKind::InvalidArgument, "start point has the wrong dimension");
    const auto t0 = Clock::now();
    CountingObjective f(problem);
    BaselineResult out;
    out.method = limited_memory ? BaselineMethod::QuasiNewtonLimited : BaselineMethod::QuasiNewton;
    out.status = BaselineStatus::IterationLimit;

    Point x = start;
    double fx = f(x);
    Point g = f.gradient(x);
    InverseHessian h(problem.dim(), limited_memory);
    h.reset(1.0 / std::max(1.0, g.norm()));
    int flat = 0;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        out.iterations = iter;
        if (g.norm() <= tol) {
            out.status = BaselineStatus::Converged;
            break;
        }
        Point p = -h.apply(g);
        double slope = g.dot(p);
        if (!(slope < 0.0)) {
            h.reset(1.0 / std::max(1.0, g.norm()));
            p = -h.apply(g);
            slope = g.dot(p);
        }

        double alpha = 1.0;
        double f_new = fx;
        bool found = false;
        for (int b = 0; b < kMaxBacktracks; ++b, alpha *= kBacktrack) {
            f_new = f(x + alpha * p);
            if (f_new <= fx + kArmijo * alpha * slope) {
                found = true;
                break;
            }
        }
        if (!found) {
            if (h.fresh()) {
                out.status = BaselineStatus::LineSearchFailed;
                break;
            }
            h.reset(1.0 / std::max(1.0, g.norm()));
            continue;
        }

        const Point s = alpha * p;
        const Point x_new = x + s;
        const Point g_new = f.gradient(x_new);
        h.update(s, g_new - g);
        flat = (fx - f_new <= 1e-15 * (1.0 + std::abs(fx))) ? flat + 1 : 0;
        x = x_new;
        fx = f_new;
        g = g_new;
        out.history.push_back(fx);
        out.iterations = iter + 1;
        if (flat >= 5) {
            out.status = BaselineStatus::Converged;
            break;
        }
    }

    out.final_point = x;
    out.f_value = problem.objective(x);
    out.f_evals = f.evals();
    out.wall_time = Clock::now() - t0;
    return out;
}

BaselineResult subgradient_min(const Problem& problem, const Point& start, int steps) {
    if (steps < 1)
        throw Error(ErrorKind::InvalidArgument, "steps must be >= 1");
    if (start.size() != problem.dim())
        throw Error(ErrorKind::InvalidArgument, "start point has the wrong dimension");
    const auto t0 = Clock::now();
    BaselineResult out;
    out.method = BaselineMethod::Subgradient;

    // The minimizer is a convex combination of the sink centers, so it lies
    // in this ball.
    const Point& mid = problem.mean();
    const double rho = (problem.centers().colwise() - mid).colwise().norm().maxCoeff();
    const double diam = 2.0 * rho;
    const double lipschitz = 2.0 * problem.scale() * problem.size() * 2.0 * rho;

    Point x = start;
    Point best = x;
    double best_f = problem.objective(x);
    out.f_evals = 1;
    std::vector<int> outside;
    for (int k = 1; k <= steps; ++k) {
        outside.clear();
        for (int i = 0; i < problem.size(); ++i)
            if (problem.power(i, x) > 0.0)
                outside.push_back(i);
        const Point g = problem.gradient_sum(outside, x);
        if (!(g.squaredNorm() > 0.0)) {
            out.iterations = k - 1;
            out.status = BaselineStatus::Converged;
            break;
        }
        x -= (diam / (lipschitz * std::sqrt(static_cast<double>(k)))) * g;
        const Point off = x - mid;
        const double r = off.norm();
        if (r > rho)
            x = mid + (rho / r) * off;
        const double fx = problem.objective(x);
        ++out.f_evals;
        if (fx < best_f) {
            best_f = fx;
            best = x;
        }
        out.history.push_back(best_f);
        out.iterations = k;
    }
    out.final_point = best;
    out.f_value = problem.objective(best);
    out.wall_time = Clock::now() - t0;
    return out;
}

namespace {

// Nested golden-section search: coordinate k is minimized over [lo_k, hi_k]
// with coordinates k+1.. minimized inside each evaluation. Partial minima of
// a convex function are convex, so every bracket keeps the minimizer.
class NestedGolden {
public:
    NestedGolden(const Problem& problem, Point lo, Point hi, double tol, BaselineResult& out)
        : problem_(problem), lo_(std::move(lo)), hi_(std::move(hi)), tol_(tol), out_(out),
          probe_(lo_.size()) {}

    // Minimizes over coordinates k.. with probe_(0..k-1) fixed; leaves the
    // argmin of those coordinates in `arg`.
    double minimize(int k, Point& arg) {
        const int d = static_cast<int>(probe_.size());
        if (k == d) {
            ++out_.f_evals;
            arg = probe_;
            return problem_.objective(probe_);
        }
        constexpr double inv_phi = 0.6180339887498949;
        double a = lo_(k);
        double b = hi_(k);
        double c = b - inv_phi * (b - a);
        double e = a + inv_phi * (b - a);
        Point arg_c, arg_e;
        double fc = evaluate(k, c, arg_c);
        double fe = evaluate(k, e, arg_e);
        double best = std::min(fc, fe);
        arg = fc <= fe ? arg_c : arg_e;
        while (b - a > tol_) {
            if (fc <= fe) {
                b = e;
                e = c;
                fe = fc;
                arg_e = arg_c;
                c = b - inv_phi * (b - a);
                fc = evaluate(k, c, arg_c);
            } else {
                a = c;
                c = e;
                fc = fe;
                arg_c = arg_e;
                e = a + inv_phi * (b - a);
                fe = evaluate(k, e, arg_e);
            }
            const double f_new = std::min(fc, fe);
            if (f_new < best) {
                best = f_new;
                arg = fc <= fe ? arg_c : arg_e;
            }
            if (k == 0) {
                ++out_.iterations;
                out_.history.push_back(best);
            }
        }
        return best;
    }

private:
    double evaluate(int k, double value, Point& arg) {
        probe_(k) = value;
        return minimize(k + 1, arg);
    }

    const Problem& problem_;
    Point lo_;
    Point hi_;
    double tol_;
    BaselineResult& out_;
    Point probe_;
};

} // namespace

BaselineResult brute_force_min(const Problem& problem, double tol_pos) {
    const int d = problem.dim();
    if (d > 3)
        throw Error(ErrorKind::DimensionTooHigh,
                    "brute force search supports d <= 3, got d=" + std::to_string(d));
    if (!(tol_pos > 0.0))
        throw Error(ErrorKind::InvalidArgument, "tol_pos must be positive");
    const auto t0 = Clock::now();
    BaselineResult out;
    out.method = BaselineMethod::BruteForce;

    Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
    Eigen::VectorXd hi = -lo;
    for (int i = 0; i < problem.size(); ++i) {
        const double r = std::sqrt(problem.radius_sq(i));
        lo = lo.cwiseMin((problem.center(i).array() - r).matrix());
        hi = hi.cwiseMax((problem.center(i).array() + r).matrix());
    }

    NestedGolden search(problem, lo, hi, tol_pos, out);
    Point best;
    search.minimize(0, best);
    out.final_point = best;
    out.f_value = problem.objective(best);
    out.status = BaselineStatus::Converged;
    out.wall_time = Clock::now() - t0;
    return out;
}

} // namespace sphclust
