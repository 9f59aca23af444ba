#include "fixtures.hpp"
#include "instances.hpp"

#include "sphclust/baselines.hpp"
#include "sphclust/errors.hpp"
#include "sphclust/exact_solver.hpp"

#include <doctest.h>

using namespace sphclust;
using fixtures::vec;

namespace {

void check_descent(const Trajectory& t) {
    double prev = t.start_f;
    for (const auto& s : t.steps) {
        CHECK(s.f_value <= prev + 1e-12);
        prev = s.f_value;
    }
    CHECK(t.final_f <= t.start_f + 1e-12);
}

} // namespace

TEST_CASE("two-point problem from above: one teleport") {
    const Problem p = fixtures::two_point_problem();
    SolverConfig cfg;
    cfg.start = StartKind::Point;
    cfg.start_point = vec({0.5, 1});
    const auto t = solve(p, cfg);
    REQUIRE(t.converged);
    REQUIRE(t.steps.size() == 1);
    CHECK(t.steps[0].kind == StepKind::Teleport);
    CHECK(t.count(StepKind::Teleport) == 1);
    CHECK((t.final_point - vec({0.5, 0})).norm() < 1e-12);
    CHECK(t.final_f == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(t.final_gen_grad_norm <= t.grad_tolerance);
}

TEST_CASE("default start is the mean") {
    const Problem p = fixtures::two_point_problem();
    const auto t = solve(p);
    CHECK(t.start == p.mean());
    CHECK(t.converged);
    CHECK(t.total_steps() == 0);
}

TEST_CASE("tiny eta lands at the barycenter") {
    Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5 + trial;
        const Dataset data = fixtures::gaussian_dataset(rng, n, 2 + trial % 3);
        const Problem p(data, 1e-6 * (1.0 - 1.0 / n));
        SolverConfig cfg;
        cfg.start = StartKind::Random;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto t = solve(p, cfg);
        REQUIRE(t.converged);
        CHECK((t.final_point - p.mean()).norm() <= 1e-3 * data.diameter());
    }
}

TEST_CASE("five random starts agree") {
    Rng rng(67);
    const Dataset data = fixtures::uniform_dataset(rng, 50, 2);
    const Problem p(data, 0.5);
    std::vector<Point> finals;
    for (std::uint64_t s = 0; s < 5; ++s) {
        SolverConfig cfg;
        cfg.start = StartKind::Random;
        cfg.seed = s;
        const auto t = solve(p, cfg);
        REQUIRE(t.converged);
        check_descent(t);
        finals.push_back(t.final_point);
    }
    for (const auto& a : finals)
        for (const auto& b : finals)
            CHECK((a - b).norm() <= 1e-6 * data.diameter());
}

TEST_CASE("random suite: certified, descending, consistent traces") {
    Rng rng(71);
    for (int trial = 0; trial < 120; ++trial) {
        const int d = 2 + trial % 3;
        const int n = 5 + trial % 30;
        const Dataset data = fixtures::gaussian_dataset(rng, n, d);
        const double eta = (0.1 + 0.8 * (trial % 9) / 8.0) * (1.0 - 1.0 / n);
        const Problem p(data, eta);
        SolverConfig cfg;
        cfg.start = trial % 2 ? StartKind::Random : StartKind::Mean;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto t = solve(p, cfg);
        REQUIRE(t.converged);
        check_descent(t);
        CHECK(t.final_gen_grad_norm <= t.grad_tolerance);
        const auto cert = certify(p, t.final_point, cfg);
        CHECK(cert.is_minimum);
        CHECK(cert.gen_grad_norm <= t.grad_tolerance);

        for (const auto& s : t.steps) {
            for (int i : s.signature.i_plus)
                CHECK(p.power(i, s.point) > -1e-9 * std::max(1.0, p.radius_sq(i)));
            for (int i : s.signature.i_minus)
                CHECK(p.power(i, s.point) < 1e-9 * std::max(1.0, p.radius_sq(i)));
            for (int i : s.signature.i_zero)
                CHECK(std::abs(p.power(i, s.point)) <= 1e-7 * std::max(1.0, p.radius_sq(i)));
        }
        CHECK(t.total_steps() == static_cast<int>(t.steps.size()));
    }
}

TEST_CASE("agrees with the brute force oracle in the plane") {
    Rng rng(73);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 5 + trial % 10;
        const Dataset data = fixtures::uniform_dataset(rng, n, 2);
        const Problem p(data, (0.2 + 0.6 * (trial % 4) / 3.0) * (1.0 - 1.0 / n));
        const auto t = solve(p);
        REQUIRE(t.converged);
        const auto b = brute_force_min(p, 1e-10 * data.diameter());
        CHECK((t.final_point - b.final_point).norm() <= 1e-5 * data.diameter());
        CHECK(std::abs(t.final_f - b.f_value) <= 1e-8 * (1.0 + t.final_f));
        CHECK(b.f_value >= t.final_f - 1e-8);
    }
}

TEST_CASE("certificates") {
    const Problem p = fixtures::two_point_problem();
    const auto at_opt = certify(p, vec({0.5, 0}));
    CHECK(at_opt.gen_grad_norm == 0.0);
    CHECK(at_opt.is_minimum);
    CHECK_FALSE(certify(p, vec({0.2, 0.3})).is_minimum);

    Rng rng(79);
    int moved = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 40;
        const Problem q(fixtures::skewed_dataset(rng, n, 2), 0.8 * (1.0 - 1.0 / n));
        if (!certify(q, q.mean()).is_minimum)
            ++moved;
    }
    CHECK(moved >= 8);
}

TEST_CASE("center varies continuously in eta") {
    Rng rng(83);
    const Dataset data = fixtures::skewed_dataset(rng, 30, 2);
    Point prev;
    for (double eta = 0.05; eta < 0.95; eta += 0.05) {
        const Problem p(data, eta);
        const auto t = solve(p);
        REQUIRE(t.converged);
        if (prev.size() > 0)
            CHECK((t.final_point - prev).norm() < data.diameter());
        prev = t.final_point;
    }
}

TEST_CASE("restarts near a full-dimensional optimum teleport once") {
    const auto inst = instances::optimum_on_spheres(101, 0, 1e-2);
    REQUIRE(inst);
    const Problem p(inst->data, inst->eta);
    CHECK(convergence_radius_check(p, inst->optimum, 50, 1e-4 * inst->data.diameter()) <= 1);
}

TEST_CASE("restarts near optima on one and two spheres") {
    for (int codim : {1, 2}) {
        const auto inst = instances::optimum_on_spheres(200 + codim, codim, 1e-2);
        REQUIRE(inst);
        const Problem p(inst->data, inst->eta);
        const int bound = codim == 1 ? 3 : 9;
        CHECK(convergence_radius_check(p, inst->optimum, 50, 1e-4 * inst->data.diameter()) <=
              bound);
    }
}

TEST_CASE("step limit and config validation") {
    Rng rng(89);
    const Problem p(fixtures::gaussian_dataset(rng, 40, 3), 0.6);
    SolverConfig cfg;
    cfg.start = StartKind::Point;
    cfg.start_point = Point::Constant(3, 25.0);
    cfg.max_steps = 1;
    const auto t = solve(p, cfg);
    CHECK(t.total_steps() <= 1);
    if (!t.converged)
        CHECK(t.status == SolveStatus::StepLimitExceeded);

    SolverConfig bad;
    bad.tol_grad = 0.0;
    CHECK_THROWS_AS(solve(p, bad), Error);
    SolverConfig wrong_dim;
    wrong_dim.start = StartKind::Point;
    wrong_dim.start_point = vec({1, 2});
    CHECK_THROWS_AS(solve(p, wrong_dim), Error);
    CHECK(SolverConfig{}.step_limit(40) == 1400);
}

TEST_CASE("seeded runs are reproducible") {
    Rng rng(97);
    const Problem p(fixtures::gaussian_dataset(rng, 25, 3), 0.5);
    SolverConfig cfg;
    cfg.start = StartKind::Random;
    cfg.seed = 1234;
    const auto a = solve(p, cfg);
    const auto b = solve(p, cfg);
    CHECK(a.final_point == b.final_point);
    CHECK(a.step_counts == b.step_counts);
}
