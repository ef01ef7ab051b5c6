#include "core/dual.hpp"

#include <cmath>
#include <stdexcept>

#include "core/operators.hpp"

namespace plap {

DualCoefficients build_dual_coefficients(const Trajectory& traj, double t, double eta,
                                         double mu, double p) {
    if (!(mu > 0.0)) throw std::invalid_argument("dual coefficients require mu > 0");
    if (!(eta > 0.0)) throw std::invalid_argument("dual coefficients require eta > 0");
    if (traj.states.size() < 2)
        throw std::invalid_argument("forward trajectory too short for a dual run");
    const double sample_dt = traj.times[1] - traj.times[0];
    for (std::size_t k = 1; k < traj.times.size(); ++k)
        if (std::abs(traj.times[k] - traj.times[k - 1] - sample_dt) > 1e-9 * sample_dt)
            throw std::invalid_argument("dual coefficients need uniform snapshot spacing");
    const auto horizon_steps = static_cast<std::size_t>(std::llround(t / sample_dt));
    if (horizon_steps < 1 || horizon_steps >= traj.times.size() ||
        std::abs(traj.times[horizon_steps] - t) > 1e-9 * std::max(t, sample_dt))
        throw std::invalid_argument("horizon t not covered by the forward trajectory");

    Trajectory window;
    window.params = traj.params;
    window.times.assign(traj.times.begin(), traj.times.begin() + horizon_steps + 1);
    window.states.assign(traj.states.begin(), traj.states.begin() + horizon_steps + 1);

    const Grid& g = traj.states.front().grid;
    DualCoefficients out;
    out.grid = g;
    out.horizon = t;
    out.sample_dt = sample_dt;
    out.delta = traj.params.delta;

    std::vector<GradientField> smoothed = mollify_spacetime(window, eta);
    const double vel_radius = mollifier_radius(mu, g.h);
    out.a_eta.resize(horizon_steps + 1);
    out.drift.resize(horizon_steps + 1);
    out.drift_div.resize(horizon_steps + 1);
    for (std::size_t k = 0; k <= horizon_steps; ++k) {
        std::size_t fwd = horizon_steps - k;  // dual time s maps to forward time t - s
        out.a_eta[k] = diffusion_coefficient(smoothed[fwd], mu, p).values;
        out.drift[k] = mollify_space(window.states[fwd], vel_radius);
        out.drift_div[k] = divergence(out.drift[k]);
    }
    return out;
}

DualRun dual_run(const VectorField& phi0, const DualCoefficients& coeffs, double nu,
                 double dt, const SchemeConfig& cfg) {
    cfg.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("dual_run: dt must be > 0");
    if (!(phi0.grid == coeffs.grid))
        throw std::invalid_argument("dual_run: phi0 grid does not match coefficients");
    if (!phi0.finite()) throw std::invalid_argument("dual_run: phi0 not finite");

    DualRun out;
    out.times.push_back(0.0);
    out.phi0_l1 = lp_norm(phi0, 1.0);
    out.sup_l1 = out.phi0_l1;

    VectorField phi = phi0;
    const std::size_t last_sample = coeffs.num_samples() - 1;
    double s = 0.0;
    while (s < coeffs.horizon - 1e-15) {
        double step = std::min(dt, coeffs.horizon - s);
        auto sample = static_cast<std::size_t>(std::llround(s / coeffs.sample_dt));
        sample = std::min(sample, last_sample);

        VectorField rhs = phi;
        if (coeffs.delta != 0.0) {
            VectorField adv = convection(coeffs.drift[sample], phi);
            const auto& div_v = coeffs.drift_div[sample];
            for (int c = 0; c < phi.ncomp(); ++c)
                for (std::size_t i = 0; i < div_v.size(); ++i)
                    rhs.components[c][i] +=
                        step * coeffs.delta *
                        (phi.components[c][i] * div_v[i] + adv.components[c][i]);
        }
        try {
            phi = solve_semi_implicit_diffusion(rhs, coeffs.a_eta[sample], nu, step,
                                                cfg.linear_solver_tol,
                                                cfg.max_linear_iters);
            if (!phi.finite()) throw std::runtime_error("NaN detected in dual state");
        } catch (const std::exception& e) {
            out.aborted = true;
            out.abort_reason = e.what();
            out.final_phi = phi;
            return out;
        }
        s += step;
        out.times.push_back(s);
        out.sup_l1 = std::max(out.sup_l1, lp_norm(phi, 1.0));
    }
    out.final_phi = std::move(phi);
    return out;
}

double duality_residual(const Trajectory& forward, double t, const VectorField& phi0,
                        double eta, double nu_dual, double dt, const SchemeConfig& cfg) {
    DualCoefficients coeffs = build_dual_coefficients(
        forward, t, eta, forward.params.mu, forward.params.p);
    DualRun dual = dual_run(phi0, coeffs, nu_dual, dt, cfg);
    if (dual.aborted)
        throw std::runtime_error("duality_residual: dual run aborted: " +
                                 dual.abort_reason);
    const auto idx = static_cast<std::size_t>(std::llround(t / coeffs.sample_dt));
    double pairing_end = inner(forward.states[idx], phi0);
    double pairing_start = inner(forward.states.front(), dual.final_phi);
    return std::abs(pairing_end - pairing_start);
}

MaxPrincipleReport linf_bound_check(const Trajectory& forward) {
    MaxPrincipleReport rep;
    if (forward.diagnostics.empty()) return rep;
    rep.overshoot.reserve(forward.diagnostics.size());
    for (const auto& d : forward.diagnostics) {
        rep.overshoot.push_back(d.overshoot);
        rep.max_overshoot = std::max(rep.max_overshoot, d.overshoot);
    }
    return rep;
}

VectorField dual_bump(const Grid& grid, const std::vector<double>& center, double rho) {
    if (static_cast<int>(center.size()) != grid.dim)
        throw std::invalid_argument("dual_bump: center dimension mismatch");
    if (!(rho > 0.0)) throw std::invalid_argument("dual_bump: rho must be > 0");

    VectorField out(grid);
    out.components.assign(1, std::vector<double>(grid.num_nodes(), 0.0));
    std::vector<int> q(grid.dim, 0);
    for (std::size_t idx = 0; idx < grid.num_nodes(); ++idx) {
        double r2 = 0.0;
        for (int b = 0; b < grid.dim; ++b) {
            double dx = grid.coord(q[b]) - center[b];
            r2 += dx * dx;
        }
        double rho2 = r2 / (rho * rho);
        if (rho2 < 1.0) out.components[0][idx] = std::exp(-1.0 / (1.0 - rho2));
        for (int b = grid.dim - 1; b >= 0; --b) {
            if (++q[b] < grid.n) break;
            q[b] = 0;
        }
    }
    double mass = lp_norm(out, 1.0);
    if (mass <= 0.0)
        throw std::invalid_argument("dual_bump: support contains no grid node");
    for (double& x : out.components[0]) x /= mass;
    return out;
}

}  // namespace plap
