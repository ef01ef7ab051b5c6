#pragma once

#include <string>
#include <vector>

#include "core/fields.hpp"
#include "core/operators.hpp"

namespace plap {

struct SchemeConfig {
    enum class Mode { semi_implicit, explicit_euler };
    Mode mode = Mode::semi_implicit;
    double linear_solver_tol = 1e-10;  // relative residual of the CG solve
    int max_linear_iters = 10000;
    double cfl_safety = 0.5;
    int snapshot_stride = 1;
    // extinction detected at ||v||_2 <= threshold * max(1, ||u0||_2)
    double extinction_rel_threshold = 1e-10;

    void validate() const;
};

/// Conjugate-gradient solve of (I - dt*nu*Lap - dt*div(a grad)) x = rhs, per component.
/// The frozen coefficient makes the operator symmetric positive definite.
/// Throws on non-convergence.
VectorField solve_semi_implicit_diffusion(const VectorField& rhs,
                                          const std::vector<double>& a_nodal, double nu,
                                          double dt, double tol, int max_iters);

/// One linearly-implicit step: diffusion coefficient frozen at v_n, convection explicit.
VectorField step_semi_implicit(const VectorField& v_n, const SimParams& params,
                               const SchemeConfig& cfg);

/// One forward-Euler step with every term explicit. Refuses the step on CFL violation.
VectorField step_explicit(const VectorField& v_n, const SimParams& params,
                          const SchemeConfig& cfg);

/// Parabolic plus advective time-step restriction for the explicit scheme.
double cfl_dt(const VectorField& v, const SimParams& params);

/// Integrate to t_end, extinction, or abort; snapshots every cfg.snapshot_stride steps
/// and a DiagnosticsRecord per step. On step failure the partial trajectory is returned
/// with aborted=true.
Trajectory run(const VectorField& u0, const SimParams& params, const SchemeConfig& cfg);

/// sqrt of the time-trapezoid of ||a(t)-b(t)||_2^2 over common snapshot times.
double trajectory_l2_distance(const Trajectory& a, const Trajectory& b);

}  // namespace plap
