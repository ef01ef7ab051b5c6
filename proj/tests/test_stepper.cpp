#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <random>

#include "core/fields.hpp"
#include "core/operators.hpp"
#include "core/stepper.hpp"
#include "doctest.h"

using namespace plap;
using std::numbers::pi;

namespace {

VectorField sine_datum(const Grid& g, double amp = 1.0) {
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::sine;
    ic.amplitudes = {amp};
    return make_initial(ic, g, 1);
}

SimParams heat_params(int n, double dt, double t_end) {
    SimParams p;
    p.p = 2.0;
    p.mu = 0.0;
    p.nu = 0.0;
    p.delta = 0.0;
    p.dim = 1;
    p.n_cells = n;
    p.dt = dt;
    p.t_end = t_end;
    return p;
}

}  // namespace

TEST_CASE("scheme config validation") {
    SchemeConfig c;
    CHECK_NOTHROW(c.validate());
    c.cfl_safety = 1.5;
    CHECK_THROWS(c.validate());
    c.cfl_safety = 0.5;
    c.linear_solver_tol = 0.0;
    CHECK_THROWS(c.validate());
}

TEST_CASE("zero is a fixed point of both schemes") {
    Grid g(1, 31);
    VectorField zero(g);
    SimParams p = heat_params(31, 1e-4, 0.0);
    SchemeConfig cfg;
    CHECK(lp_norm(step_semi_implicit(zero, p, cfg), kInfNorm) == 0.0);
    CHECK(lp_norm(step_explicit(zero, p, cfg), kInfNorm) == 0.0);
}

TEST_CASE("semi-implicit heat step matches the discrete eigenvalue update") {
    const int n = 63;
    Grid g(1, n);
    VectorField v = sine_datum(g);
    SimParams p = heat_params(n, 1e-3, 0.0);
    SchemeConfig cfg;
    cfg.linear_solver_tol = 1e-14;
    VectorField next = step_semi_implicit(v, p, cfg);
    double lambda_h = (2.0 / (g.h * g.h)) * (1.0 - std::cos(pi * g.h));
    double factor = 1.0 / (1.0 + p.dt * lambda_h);
    for (int i = 0; i < n; ++i)
        CHECK(next.components[0][i] ==
              doctest::Approx(factor * v.components[0][i]).epsilon(1e-10));
}

TEST_CASE("semi-implicit step is dissipative for delta = 0 at any dt and p") {
    Grid g(2, 15);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    SchemeConfig cfg;
    for (double pp : {1.6, 1.8, 2.0}) {
        VectorField v(g);
        for (auto& comp : v.components)
            for (double& x : comp) x = unif(rng);
        SimParams p;
        p.p = pp;
        p.mu = 0.05;
        p.delta = 0.0;
        p.dim = 2;
        p.n_cells = 15;
        p.dt = 0.5;  // deliberately large: dissipativity is unconditional
        VectorField next = step_semi_implicit(v, p, cfg);
        CHECK(lp_norm(next, 2.0) <= lp_norm(v, 2.0) * (1.0 + 1e-12));
    }
}

TEST_CASE("CFL formula: heat value, mu-shifted value, monotone in nu") {
    Grid g(1, 63);
    VectorField zero(g);
    SimParams p = heat_params(63, 1e-4, 0.1);
    CHECK(cfl_dt(zero, p) == doctest::Approx(g.h * g.h / 2.0));

    SimParams q = p;
    q.p = 1.6;
    q.mu = 1.0;  // coefficient 1^{-0.2} = 1 at zero gradient
    CHECK(cfl_dt(zero, q) == doctest::Approx(g.h * g.h / 2.0));

    SimParams r = p;
    r.nu = 0.3;
    CHECK(cfl_dt(zero, r) < cfl_dt(zero, p));
}

TEST_CASE("explicit step refuses CFL violations and rejects NaN input") {
    Grid g(1, 63);
    VectorField v = sine_datum(g);
    SimParams p = heat_params(63, 1.0, 0.1);  // dt far beyond h^2/2
    SchemeConfig cfg;
    CHECK_THROWS_AS(step_explicit(v, p, cfg), std::runtime_error);

    VectorField bad = v;
    bad.components[0][5] = std::nan("");
    p.dt = 1e-6;
    CHECK_THROWS_AS(step_explicit(bad, p, cfg), std::runtime_error);
    CHECK_THROWS_AS(step_semi_implicit(bad, p, cfg), std::runtime_error);
}

TEST_CASE("one explicit and one implicit step agree to O(dt^2)") {
    Grid g(1, 63);
    VectorField v = sine_datum(g);
    SchemeConfig cfg;
    cfg.linear_solver_tol = 1e-14;
    auto gap = [&](double dt) {
        SimParams p;
        p.p = 1.8;
        p.mu = 0.5;
        p.delta = 1.0;
        p.dim = 1;
        p.n_cells = 63;
        p.dt = dt;
        VectorField a = step_semi_implicit(v, p, cfg);
        VectorField b = step_explicit(v, p, cfg);
        return lp_norm(a - b, 2.0);
    };
    double g1 = gap(4e-5), g2 = gap(2e-5);
    CHECK(g1 / g2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("run: t_end = 0 stores only the initial state") {
    Grid g(1, 31);
    SimParams p = heat_params(31, 1e-3, 0.0);
    Trajectory traj = run(sine_datum(g), p, SchemeConfig{});
    CHECK(traj.states.size() == 1);
    CHECK(traj.diagnostics.size() == 1);
    CHECK(traj.times[0] == 0.0);
}

TEST_CASE("run: analytic heat decay oracle") {
    SimParams p = heat_params(127, 1e-4, 0.1);
    Grid g(1, p.n_cells);
    SchemeConfig cfg;
    cfg.snapshot_stride = 100;
    Trajectory traj = run(sine_datum(g), p, cfg);
    double expected = std::exp(-pi * pi * 0.1) / std::sqrt(2.0);
    CHECK(traj.diagnostics.back().l2_norm == doctest::Approx(expected).epsilon(5e-3));
    CHECK(traj.diagnostics.back().overshoot == 0.0);
}

TEST_CASE("run: sign-flip symmetry u -> -u, delta -> -delta") {
    Grid g(1, 63);
    SimParams p;
    p.p = 1.8;
    p.mu = 0.3;
    p.delta = 0.5;
    p.dim = 1;
    p.n_cells = 63;
    p.dt = 1e-3;
    p.t_end = 0.02;
    SchemeConfig cfg;
    cfg.linear_solver_tol = 1e-13;
    VectorField u0 = sine_datum(g);
    Trajectory a = run(u0, p, cfg);
    SimParams q = p;
    q.delta = -0.5;
    Trajectory b = run(-1.0 * u0, q, cfg);
    REQUIRE(a.states.size() == b.states.size());
    VectorField diff = a.final_state() + b.final_state();
    CHECK(lp_norm(diff, kInfNorm) < 1e-10);
}

TEST_CASE("run: extinction threshold stops the integration") {
    Grid g(1, 63);
    SimParams p;
    p.p = 1.6;
    p.mu = 0.0;
    p.delta = 0.0;
    p.dim = 1;
    p.n_cells = 63;
    p.dt = 1e-3;
    p.t_end = 10.0;
    SchemeConfig cfg;
    cfg.extinction_rel_threshold = 1e-6;
    cfg.snapshot_stride = 1000;
    Trajectory traj = run(sine_datum(g, 0.05), p, cfg);
    REQUIRE(traj.extinction_time.has_value());
    CHECK(*traj.extinction_time < 10.0);
    CHECK(traj.diagnostics.back().l2_norm <= 1e-6);
    CHECK(traj.diagnostics.back().extinction_flag);
}

TEST_CASE("run preserves the partial trajectory on step failure") {
    Grid g(1, 63);
    SimParams p = heat_params(63, 1e-2, 0.1);  // violates the explicit CFL limit
    SchemeConfig cfg;
    cfg.mode = SchemeConfig::Mode::explicit_euler;
    Trajectory traj = run(sine_datum(g), p, cfg);
    CHECK(traj.aborted);
    CHECK(!traj.abort_reason.empty());
    CHECK(traj.states.size() >= 1);
}

TEST_CASE("snapshot stride thins states but diagnostics stay per step") {
    Grid g(1, 31);
    SimParams p = heat_params(31, 1e-3, 0.02);
    SchemeConfig cfg;
    cfg.snapshot_stride = 5;
    Trajectory traj = run(sine_datum(g), p, cfg);
    CHECK(traj.diagnostics.size() == 21);  // t=0 plus 20 steps
    CHECK(traj.states.size() == 5);        // t=0 plus steps 5,10,15,20
}

TEST_CASE("trajectory distance: zero on itself, positive across parameters") {
    Grid g(1, 63);
    SimParams p = heat_params(63, 1e-3, 0.02);
    SchemeConfig cfg;
    Trajectory a = run(sine_datum(g), p, cfg);
    CHECK(trajectory_l2_distance(a, a) == 0.0);
    SimParams q = p;
    q.nu = 0.5;
    Trajectory b = run(sine_datum(g), q, cfg);
    CHECK(trajectory_l2_distance(a, b) > 0.0);
}
