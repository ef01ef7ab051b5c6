#include "core/stepper.hpp"

#include <cmath>
#include <stdexcept>

namespace plap {

namespace {

// y = x - dt*(nu*Lap x + div(a grad x)) applied to a single-component field
void apply_operator(const Grid& grid, const std::vector<double>& a_nodal, double nu,
                    double dt, const std::vector<double>& x, std::vector<double>& y) {
    VectorField tmp(grid);
    tmp.components.resize(1);
    tmp.components[0] = x;
    VectorField div_a = flux_divergence(tmp, a_nodal);
    if (nu > 0.0) {
        VectorField lap = laplacian(tmp);
        for (std::size_t i = 0; i < x.size(); ++i)
            y[i] = x[i] - dt * (nu * lap.components[0][i] + div_a.components[0][i]);
    } else {
        for (std::size_t i = 0; i < x.size(); ++i)
            y[i] = x[i] - dt * div_a.components[0][i];
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> cg_solve(const Grid& grid, const std::vector<double>& a_nodal,
                             double nu, double dt, const std::vector<double>& rhs,
                             double tol, int max_iters) {
    const std::size_t m = rhs.size();
    std::vector<double> x(m, 0.0), r = rhs, p = rhs, Ap(m);
    double rhs_norm = std::sqrt(dot(rhs, rhs));
    if (rhs_norm == 0.0) return x;
    double rr = dot(r, r);
    const double stop = tol * rhs_norm;
    for (int it = 0; it < max_iters; ++it) {
        if (std::sqrt(rr) <= stop) return x;
        apply_operator(grid, a_nodal, nu, dt, p, Ap);
        double alpha = rr / dot(p, Ap);
        for (std::size_t i = 0; i < m; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        double rr_new = dot(r, r);
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < m; ++i) p[i] = r[i] + beta * p[i];
    }
    if (std::sqrt(rr) <= stop) return x;
    throw std::runtime_error("linear solve failed to converge within max_linear_iters");
}

}  // namespace

void SchemeConfig::validate() const {
    if (!(linear_solver_tol > 0.0))
        throw std::invalid_argument("linear_solver_tol must be > 0");
    if (!(cfl_safety > 0.0 && cfl_safety < 1.0))
        throw std::invalid_argument("cfl_safety must lie in (0,1)");
    if (max_linear_iters < 1) throw std::invalid_argument("max_linear_iters must be >= 1");
    if (snapshot_stride < 1) throw std::invalid_argument("snapshot_stride must be >= 1");
}

VectorField solve_semi_implicit_diffusion(const VectorField& rhs,
                                          const std::vector<double>& a_nodal, double nu,
                                          double dt, double tol, int max_iters) {
    VectorField out(rhs.grid);
    out.components.resize(rhs.ncomp());
    for (int c = 0; c < rhs.ncomp(); ++c)
        out.components[c] =
            cg_solve(rhs.grid, a_nodal, nu, dt, rhs.components[c], tol, max_iters);
    return out;
}

namespace {

VectorField explicit_convection_term(const VectorField& v_n, const SimParams& params) {
    VectorField vel = mollify_space(v_n, mollifier_radius(params.mu, v_n.grid.h));
    return convection(vel, v_n);
}

}  // namespace

VectorField step_semi_implicit(const VectorField& v_n, const SimParams& params,
                               const SchemeConfig& cfg) {
    if (!v_n.finite()) throw std::runtime_error("NaN detected in state; aborting run");
    GradientField g = gradient(v_n);
    DiffusionCoefficient a = diffusion_coefficient(g, params.mu, params.p);
    VectorField rhs = v_n;
    if (params.delta != 0.0) {
        VectorField conv = explicit_convection_term(v_n, params);
        rhs = rhs - params.dt * params.delta * conv;
    }
    VectorField next = solve_semi_implicit_diffusion(
        rhs, a.values, params.nu, params.dt, cfg.linear_solver_tol, cfg.max_linear_iters);
    next.time_tag = v_n.time_tag ? *v_n.time_tag + params.dt : params.dt;
    return next;
}

VectorField step_explicit(const VectorField& v_n, const SimParams& params,
                          const SchemeConfig& cfg) {
    if (!v_n.finite()) throw std::runtime_error("NaN detected in state; aborting run");
    double limit = cfl_dt(v_n, params) * cfg.cfl_safety;
    if (params.dt > limit)
        throw std::runtime_error("CFL violation: dt=" + std::to_string(params.dt) +
                                 " exceeds " + std::to_string(limit));
    VectorField update = p_laplacian_apply(v_n, params.mu, params.p);
    if (params.nu > 0.0) update = update + params.nu * laplacian(v_n);
    if (params.delta != 0.0)
        update = update - params.delta * explicit_convection_term(v_n, params);
    VectorField next = v_n + params.dt * update;
    next.time_tag = v_n.time_tag ? *v_n.time_tag + params.dt : params.dt;
    return next;
}

double cfl_dt(const VectorField& v, const SimParams& params) {
    const Grid& g = v.grid;
    GradientField gr = gradient(v);
    DiffusionCoefficient a = diffusion_coefficient(gr, params.mu, params.p);
    double a_max = 0.0;
    for (double x : a.values) a_max = std::max(a_max, x);
    VectorField vel = mollify_space(v, mollifier_radius(params.mu, g.h));
    double vel_max = lp_norm(vel, kInfNorm);
    double denom = 2.0 * g.dim * (params.nu + a_max) + g.h * vel_max * g.dim;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return g.h * g.h / denom;
}

namespace {

DiagnosticsRecord make_record(const VectorField& v, double t, const SimParams& params,
                              double u0_linf, double energy_residual) {
    DiagnosticsRecord r;
    r.time = t;
    r.l2_norm = lp_norm(v, 2.0);
    r.linf_norm = lp_norm(v, kInfNorm);
    GradientField g = gradient(v);
    r.grad_l2 = g.l2_norm();
    r.grad_lp = g.lp_norm(params.p);
    r.weighted_flux = g.weighted_flux_norm(params.mu, params.p);
    r.energy_residual = energy_residual;
    r.overshoot = std::max(0.0, r.linf_norm - u0_linf);
    r.b_mu = params.mu + r.grad_l2 * r.grad_l2;  // |Omega| = 1
    r.phi_weight = t > 0.0 ? std::pow(t, params.weighted_alpha()) *
                                 std::pow(r.b_mu, 0.5 * (4.0 - params.p))
                           : 0.0;
    return r;
}

// Scheme-consistent residual of the discrete energy balance for one step. The spatial
// forms are the scheme's own (face fluxes, lagged coefficient), so the residual
// isolates the O(dt) time-discretization error plus linear-solver error.
double energy_residual_step(const VectorField& v_old, const VectorField& v_new,
                            const std::vector<double>& a_old, const SimParams& params,
                            SchemeConfig::Mode mode) {
    static thread_local std::vector<double> ones;
    ones.assign(v_old.grid.num_nodes(), 1.0);
    double e_old = inner(v_old, v_old), e_new = inner(v_new, v_new);
    const VectorField& pairing = mode == SchemeConfig::Mode::semi_implicit ? v_new : v_old;
    double res = (e_new - e_old) / (2.0 * params.dt);
    if (params.nu > 0.0) res += params.nu * flux_energy(ones, pairing, pairing);
    res += flux_energy(a_old, pairing, pairing);
    if (params.delta != 0.0) {
        VectorField conv = explicit_convection_term(v_old, params);
        res += params.delta * inner(conv, pairing);
    }
    return std::abs(res);
}

}  // namespace

Trajectory run(const VectorField& u0, const SimParams& params, const SchemeConfig& cfg) {
    params.validate();
    cfg.validate();
    if (!u0.finite()) throw std::invalid_argument("run: initial state not finite");

    Trajectory traj;
    traj.params = params;
    traj.times.push_back(0.0);
    traj.states.push_back(u0);
    traj.states.back().time_tag = 0.0;

    const double u0_linf = lp_norm(u0, kInfNorm);
    const double u0_l2 = lp_norm(u0, 2.0);
    const double ext_threshold = cfg.extinction_rel_threshold * std::max(1.0, u0_l2);
    traj.diagnostics.push_back(make_record(u0, 0.0, params, u0_linf, 0.0));

    if (params.t_end <= 0.0) return traj;

    VectorField v = u0;
    v.time_tag = 0.0;
    double t = 0.0;
    long step_index = 0;
    while (t < params.t_end - 1e-15) {
        SimParams sp = params;
        sp.dt = std::min(params.dt, params.t_end - t);  // last gap may be shorter
        VectorField v_new;
        GradientField g_old = gradient(v);
        DiffusionCoefficient a_old = diffusion_coefficient(g_old, params.mu, params.p);
        try {
            v_new = cfg.mode == SchemeConfig::Mode::semi_implicit
                        ? step_semi_implicit(v, sp, cfg)
                        : step_explicit(v, sp, cfg);
            if (!v_new.finite()) throw std::runtime_error("NaN detected after step");
        } catch (const std::exception& e) {
            traj.aborted = true;
            traj.abort_reason = e.what();
            return traj;
        }
        t += sp.dt;
        ++step_index;
        double eres = energy_residual_step(v, v_new, a_old.values, sp, cfg.mode);
        v = std::move(v_new);
        v.time_tag = t;
        DiagnosticsRecord rec = make_record(v, t, params, u0_linf, eres);
        bool extinct = rec.l2_norm <= ext_threshold;
        rec.extinction_flag = extinct;
        traj.diagnostics.push_back(rec);
        bool at_end = t >= params.t_end - 1e-15;
        if (step_index % cfg.snapshot_stride == 0 || at_end || extinct) {
            traj.times.push_back(t);
            traj.states.push_back(v);
        }
        if (extinct) {
            traj.extinction_time = t;
            break;
        }
    }
    return traj;
}

double trajectory_l2_distance(const Trajectory& a, const Trajectory& b) {
    std::size_t n = std::min(a.states.size(), b.states.size());
    if (n < 2) throw std::invalid_argument("trajectory_l2_distance: too few snapshots");
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double w = a.times[k + 1] - a.times[k];
        VectorField d0 = a.states[k] - b.states[k];
        VectorField d1 = a.states[k + 1] - b.states[k + 1];
        double q0 = inner(d0, d0), q1 = inner(d1, d1);
        acc += 0.5 * w * (q0 + q1);
    }
    return std::sqrt(acc);
}

}  // namespace plap
