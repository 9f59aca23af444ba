#include "fixtures.hpp"

#include "sphclust/baselines.hpp"
#include "sphclust/errors.hpp"
#include "sphclust/model.hpp"

#include <doctest.h>

using namespace sphclust;
using fixtures::vec;

namespace {

// Sink sphere read off the expanded quadratic of the direct form:
// f_i(c) = (1 - eta') |c|^2 - 2 <c, x_i - eta' mean> + |x_i|^2 - eta/(n-1) sum |x_j|^2.
void expanded_sink(const Dataset& data, double eta, int i, Point& center, double& r_sq) {
    const int n = data.size();
    const double ep = n * eta / (n - 1.0);
    const Point mean = data.points().rowwise().mean();
    const double sum_sq = data.points().colwise().squaredNorm().sum();
    center = (data.point(i) - ep * mean) / (1.0 - ep);
    const double constant = data.point(i).squaredNorm() - eta / (n - 1.0) * sum_sq;
    r_sq = center.squaredNorm() - constant / (1.0 - ep);
}

} // namespace

TEST_CASE("two-point problem has the hand-derived sinks") {
    const Problem p = fixtures::two_point_problem();
    CHECK(p.eta_prime() == doctest::Approx(0.8).epsilon(1e-15));
    CHECK((p.center(0) - vec({-2, 0})).norm() < 1e-12);
    CHECK((p.center(1) - vec({3, 0})).norm() < 1e-12);
    CHECK(p.radius_sq(0) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(p.radius_sq(1) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(std::abs(p.f_sub_direct(0, vec({std::sqrt(6.0) - 2.0, 0}))) < 1e-12);
}

TEST_CASE("sub-function and objective values") {
    const Problem p = fixtures::two_point_problem();
    CHECK(p.f_sub(0, vec({0, 0})) == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(p.f_sub_direct(0, vec({0, 0})) == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(p.objective(vec({0.5, 0})) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(p.f_sub(0, vec({0, 0})) < 0.0);
    CHECK(p.f_sub(1, vec({1, 0})) < 0.0);

    // on S_1
    const Point on = p.center(0) + std::sqrt(p.radius_sq(0)) * vec({0.6, 0.8});
    CHECK(std::abs(p.f_sub(0, on)) <= 1e-9 * p.scale() * p.radius_sq(0));
}

TEST_CASE("eta range is enforced") {
    const Dataset d = fixtures::two_points();
    CHECK_THROWS_AS(Problem(d, 0.5), Error);
    CHECK_THROWS_AS(Problem(d, 0.0), Error);
    CHECK_THROWS_AS(Problem(d, -0.1), Error);
    try {
        Problem(d, 0.5);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EtaOutOfRange);
    }
    Eigen::MatrixXd five = Eigen::MatrixXd::Random(2, 5);
    CHECK_THROWS_AS(Problem(Dataset(five), 0.8), Error);
    CHECK_NOTHROW(Problem(Dataset(five), 0.79));
}

TEST_CASE("dataset validation") {
    Eigen::MatrixXd same(2, 3);
    same << 1, 1, 1, 2, 2, 2;
    CHECK_THROWS_AS(Dataset{same}, Error);
    CHECK_THROWS_AS(Dataset{Eigen::MatrixXd::Zero(2, 1)}, Error);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(Dataset{bad}, Error);
    Eigen::MatrixXd dup(1, 3);
    dup << 0, 0, 1;
    CHECK_NOTHROW(Dataset{dup});
    try {
        Dataset::from_rows({{0, 0}, {1}});
        FAIL("ragged rows accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RaggedRows);
    }
}

TEST_CASE("eta near zero: sinks collapse onto the data") {
    Rng rng(7);
    const Dataset d = fixtures::gaussian_dataset(rng, 6, 3);
    const Problem p(d, 1e-12);
    for (int i = 0; i < d.size(); ++i) {
        CHECK((p.center(i) - d.point(i)).norm() < 1e-9);
        CHECK(p.radius_sq(i) > 0.0);
        CHECK(p.radius_sq(i) < 1e-9);
    }
}

TEST_CASE("sink spheres match the expanded quadratic") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + trial % 20;
        const int d = 1 + trial % 4;
        const Dataset data = fixtures::gaussian_dataset(rng, n, d);
        const double eta = (0.05 + 0.9 * (trial % 10) / 10.0) * (1.0 - 1.0 / n);
        const Problem p(data, eta);
        for (int i = 0; i < n; ++i) {
            Point c;
            double r_sq = 0.0;
            expanded_sink(data, eta, i, c, r_sq);
            CHECK((p.center(i) - c).norm() <= 1e-9 * (1.0 + c.norm()));
            CHECK(std::abs(p.radius_sq(i) - r_sq) <= 1e-8 * (1.0 + r_sq));
            CHECK(p.radius_sq(i) > 0.0);
        }
    }
}

TEST_CASE("factored and direct forms agree") {
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + trial % 15;
        const int d = 1 + trial % 5;
        const Dataset data = fixtures::gaussian_dataset(rng, n, d);
        const Problem p(data, u(rng) * (1.0 - 1.0 / n) * 0.999 + 1e-6);
        const auto [lo, hi] = fixtures::padded_box(data);
        const Point c = fixtures::uniform_in_box(rng, lo, hi);
        const int i = trial % n;
        const double direct = p.f_sub_direct(i, c);
        CHECK(std::abs(direct - p.f_sub(i, c)) <= 1e-9 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("objective is positive and strongly convex") {
    Rng rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int inst = 0; inst < 20; ++inst) {
        const int n = 5 + inst;
        const Dataset data = fixtures::gaussian_dataset(rng, n, 2 + inst % 2);
        const Problem p(data, (0.1 + 0.8 * u(rng)) * (1.0 - 1.0 / n));
        const auto [lo, hi] = fixtures::padded_box(data);
        for (int k = 0; k < 200; ++k) {
            const Point x = fixtures::uniform_in_box(rng, lo, hi);
            const Point y = fixtures::uniform_in_box(rng, lo, hi);
            const double t = u(rng);
            const double lhs = p.objective(t * x + (1 - t) * y);
            const double rhs = t * p.objective(x) + (1 - t) * p.objective(y) -
                               p.scale() * t * (1 - t) * (x - y).squaredNorm();
            CHECK(lhs <= rhs + 1e-9 * (1.0 + std::abs(rhs)));
            CHECK(p.objective(x) > 0.0);
        }
    }
}

TEST_CASE("far-field growth") {
    const Problem p = fixtures::two_point_problem();
    const Point far = vec({1e6, -2e6});
    const double lead = p.size() * p.scale() * far.squaredNorm();
    CHECK(p.objective(far) / lead == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("signature classification") {
    const Problem p = fixtures::two_point_problem();
    const auto s = signature(p, vec({0.5, 0}));
    CHECK(s.i_plus == std::vector<int>{0, 1});
    CHECK(s.i_zero.empty());
    CHECK(s.i_minus.empty());
    const auto on = signature(p, vec({std::sqrt(6.0) - 2.0, 0}));
    CHECK(on.i_zero == std::vector<int>{0});
    CHECK(on.codimension() == 1);

    Rng rng(9);
    const Dataset data = fixtures::gaussian_dataset(rng, 20, 3);
    const Problem q(data, 0.5);
    for (int k = 0; k < 100; ++k) {
        const auto [lo, hi] = fixtures::padded_box(data);
        const auto sig = signature(q, fixtures::uniform_in_box(rng, lo, hi), 0.0);
        CHECK(sig.full_dimensional());
        CHECK(sig.i_plus.size() + sig.i_minus.size() == 20u);
    }
}

TEST_CASE("cell gradient") {
    const Problem p = fixtures::two_point_problem();
    CHECK(cell_gradient(p, signature(p, vec({0.5, 0})), vec({0.5, 0})).norm() == 0.0);
    const CellSignature only_first{{0}, {}, {1}};
    CHECK(cell_gradient(p, only_first, p.center(0)).norm() == 0.0);
    CHECK_THROWS_AS(cell_gradient(p, signature(p, vec({std::sqrt(6.0) - 2.0, 0})),
                                  vec({std::sqrt(6.0) - 2.0, 0})),
                    Error);

    Rng rng(13);
    int checked = 0;
    while (checked < 100) {
        const Dataset data = fixtures::gaussian_dataset(rng, 12, 2 + checked % 2);
        const Problem q(data, 0.6);
        const auto [lo, hi] = fixtures::padded_box(data);
        const Point c = fixtures::uniform_in_box(rng, lo, hi);
        const auto sig = signature(q, c);
        // stay away from kinks so the central difference sees one quadratic
        bool clear = true;
        for (int i = 0; i < q.size(); ++i)
            clear = clear && std::abs(q.power(i, c)) > 1e-3 * (1.0 + q.radius_sq(i));
        if (!clear || sig.i_plus.empty())
            continue;
        const Point g = cell_gradient(q, sig, c);
        const Point fd = fd_gradient(q, c);
        CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, g.norm()));
        ++checked;
    }
}
