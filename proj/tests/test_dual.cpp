#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "core/dual.hpp"
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

Trajectory forward_run(int n, double p, double mu, double delta, double nu, double dt,
                       double t_end, double amp = 1.0) {
    Grid g(1, n);
    SimParams pr;
    pr.p = p;
    pr.mu = mu;
    pr.nu = nu;
    pr.delta = delta;
    pr.dim = 1;
    pr.n_cells = n;
    pr.dt = dt;
    pr.t_end = t_end;
    SchemeConfig cfg;
    cfg.snapshot_stride = 1;  // the dual builder needs every state
    cfg.linear_solver_tol = 1e-13;
    return run(sine_datum(g, amp), pr, cfg);
}

}  // namespace

TEST_CASE("dual coefficients of a stationary zero trajectory are constant") {
    const double mu = 0.5, p = 1.8;
    Grid g(1, 31);
    SimParams pr;
    pr.p = p;
    pr.mu = mu;
    pr.delta = 1.0;
    pr.dim = 1;
    pr.n_cells = 31;
    pr.dt = 1e-3;
    pr.t_end = 0.02;
    SchemeConfig cfg;
    cfg.snapshot_stride = 1;
    // the zero datum trips the extinction stop after one step, so the usable
    // horizon is a single dt and eta must fit inside half of it
    Trajectory traj = run(VectorField(g), pr, cfg);
    const double horizon = traj.times.back();
    const double eta = 0.4 * horizon;

    DualCoefficients dc = build_dual_coefficients(traj, horizon, eta, mu, p);
    CHECK(dc.num_samples() == traj.states.size());
    CHECK(dc.delta == 1.0);
    double expected = std::pow(mu, (p - 2.0) / 2.0);
    for (const auto& sample : dc.a_eta)
        for (double a : sample) CHECK(a == doctest::Approx(expected).epsilon(1e-12));
    for (const auto& v : dc.drift) CHECK(lp_norm(v, kInfNorm) == 0.0);

    CHECK_THROWS(build_dual_coefficients(traj, horizon, 0.0, mu, p));
    CHECK_THROWS(build_dual_coefficients(traj, horizon, eta, 0.0, p));
}

TEST_CASE("p = 2 freezes the dual diffusion coefficient at one") {
    Trajectory traj = forward_run(31, 2.0, 0.5, 0.0, 0.0, 1e-3, 0.02);
    Grid g(1, 31);
    DualCoefficients dc = build_dual_coefficients(traj, 0.02, 0.008, 0.5, 2.0);
    for (const auto& sample : dc.a_eta)
        for (double a : sample) CHECK(a == 1.0);
}

TEST_CASE("dual drift is the time-reversed mollified forward state") {
    const double mu = 0.3;
    Trajectory traj = forward_run(31, 1.8, mu, 1.0, 0.0, 1e-3, 0.05);
    Grid g(1, 31);
    DualCoefficients dc = build_dual_coefficients(traj, 0.05, 0.02, mu, 1.8);
    double r = mollifier_radius(mu, g.h);
    VectorField expect_first = mollify_space(traj.states.back(), r);
    VectorField expect_last = mollify_space(traj.states.front(), r);
    CHECK(lp_norm(dc.drift.front() - expect_first, kInfNorm) < 1e-14);
    CHECK(lp_norm(dc.drift.back() - expect_last, kInfNorm) < 1e-14);
}

TEST_CASE("dual run: zero seed stays zero and the map is linear") {
    Trajectory traj = forward_run(31, 1.8, 0.4, 1.0, 0.05, 1e-3, 0.02);
    Grid g(1, 31);
    DualCoefficients dc = build_dual_coefficients(traj, 0.02, 0.008, 0.4, 1.8);
    SchemeConfig cfg;
    cfg.linear_solver_tol = 1e-13;

    DualRun z = dual_run(VectorField(g), dc, 0.05, 1e-3, cfg);
    CHECK(!z.aborted);
    CHECK(lp_norm(z.final_phi, kInfNorm) == 0.0);

    VectorField phi1 = sine_datum(g);
    VectorField phi2 = dual_bump(g, {0.3}, 0.15);
    DualRun r1 = dual_run(phi1, dc, 0.05, 1e-3, cfg);
    DualRun r2 = dual_run(phi2, dc, 0.05, 1e-3, cfg);
    DualRun r12 = dual_run(2.0 * phi1 + (-3.0) * phi2, dc, 0.05, 1e-3, cfg);
    VectorField combo = 2.0 * r1.final_phi + (-3.0) * r2.final_phi;
    CHECK(lp_norm(r12.final_phi - combo, kInfNorm) < 1e-9);
}

TEST_CASE("drift-free p = 2 dual reproduces the forward heat scheme step for step") {
    const double nu = 0.1, dt = 1e-3, T = 0.02;
    Trajectory traj = forward_run(31, 2.0, 0.5, 0.0, nu, dt, T);
    Grid g(1, 31);
    DualCoefficients dc = build_dual_coefficients(traj, T, 0.008, 0.5, 2.0);
    SchemeConfig cfg;
    cfg.linear_solver_tol = 1e-13;

    VectorField phi0 = sine_datum(g, 0.7);
    DualRun dr = dual_run(phi0, dc, nu, dt, cfg);

    SimParams pr;
    pr.p = 2.0;
    pr.mu = 0.5;
    pr.nu = nu;
    pr.delta = 0.0;
    pr.dim = 1;
    pr.n_cells = 31;
    pr.dt = dt;
    pr.t_end = T;
    Trajectory fwd = run(phi0, pr, cfg);
    CHECK(lp_norm(dr.final_phi - fwd.final_state(), kInfNorm) < 1e-9);
}

TEST_CASE("dual L1 norm stays within its stability bound on a nonlinear run") {
    Trajectory traj = forward_run(63, 1.8, 0.5, 1.0, 0.05, 5e-4, 0.05, 0.5);
    Grid g(1, 63);
    DualCoefficients dc = build_dual_coefficients(traj, 0.05, 0.02, 0.5, 1.8);
    VectorField phi0 = dual_bump(g, {0.5}, 0.2);
    DualRun dr = dual_run(phi0, dc, 0.05, 5e-4);
    REQUIRE(!dr.aborted);
    CHECK(dr.phi0_l1 == doctest::Approx(1.0));
    CHECK(dr.sup_l1 / dr.phi0_l1 <= 1.0 + 1e-2);
}

TEST_CASE("duality residual: zero forward data and exact p = 2 adjointness") {
    Grid g(1, 31);
    SimParams pr;
    pr.p = 2.0;
    pr.mu = 0.5;
    pr.nu = 0.1;
    pr.delta = 0.0;
    pr.dim = 1;
    pr.n_cells = 31;
    pr.dt = 1e-3;
    pr.t_end = 0.02;
    SchemeConfig cfg;
    cfg.snapshot_stride = 1;
    cfg.linear_solver_tol = 1e-13;

    Trajectory heat = run(sine_datum(g), pr, cfg);
    CHECK(duality_residual(heat, 0.02, VectorField(g), 0.008, pr.nu, pr.dt, cfg) ==
          0.0);

    // p = 2, delta = 0, matched viscosity: backward Euler is self-adjoint, so the
    // pairing mismatch is pure linear-solver noise
    VectorField phi0 = dual_bump(g, {0.5}, 0.2);
    double res = duality_residual(heat, 0.02, phi0, 0.008, pr.nu, pr.dt, cfg);
    CHECK(res < 1e-8);
}

TEST_CASE("sup-norm bound check reports no overshoot for dissipative runs") {
    Grid g(1, 31);
    SimParams pr;
    pr.p = 2.0;
    pr.mu = 0.0;
    pr.delta = 0.0;
    pr.dim = 1;
    pr.n_cells = 31;
    pr.dt = 1e-3;
    pr.t_end = 0.05;
    SchemeConfig cfg;
    Trajectory z = run(VectorField(g), pr, cfg);
    CHECK(linf_bound_check(z).max_overshoot == 0.0);
    Trajectory heat = run(sine_datum(g), pr, cfg);
    MaxPrincipleReport rep = linf_bound_check(heat);
    CHECK(rep.max_overshoot == 0.0);
    CHECK(rep.overshoot.size() == heat.diagnostics.size());
}

TEST_CASE("dual bump: unit mass, compact support, argument validation") {
    Grid g(2, 31);
    VectorField b = dual_bump(g, {0.5, 0.5}, 0.2);
    CHECK(lp_norm(b, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    // support is inside the ball of radius rho
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            double dx = g.coord(i) - 0.5, dy = g.coord(j) - 0.5;
            if (dx * dx + dy * dy >= 0.04)
                CHECK(b.components[0][i * g.n + j] == 0.0);
        }
    CHECK_THROWS(dual_bump(g, {0.5}, 0.2));          // dim mismatch
    // center off the lattice with a radius below the spacing: no node in support
    CHECK_THROWS(dual_bump(g, {0.51, 0.51}, 1e-4));
}
