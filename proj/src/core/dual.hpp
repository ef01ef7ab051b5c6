#pragma once

#include <string>
#include <vector>

#include "core/fields.hpp"
#include "core/stepper.hpp"

namespace plap {

/// Frozen coefficients of the linear dual system on [0, horizon], indexed by dual
/// time s: sample k holds the forward trajectory's values at time horizon - k*sample_dt.
struct DualCoefficients {
    Grid grid;
    double horizon = 0.0;
    double sample_dt = 0.0;
    double delta = 0.0;                         // drift strength, from the forward run
    std::vector<std::vector<double>> a_eta;     // [s_index][node], > 0 everywhere
    std::vector<VectorField> drift;             // mollified transport velocity
    std::vector<std::vector<double>> drift_div; // centered-difference divergence

    std::size_t num_samples() const { return a_eta.size(); }
};

/// Space-time mollified gradient coefficients of a stride-1 forward trajectory,
/// time-reversed about the horizon t. Requires mu > 0 and eta > 0; the trajectory
/// must cover [0, t] with uniform snapshot spacing.
DualCoefficients build_dual_coefficients(const Trajectory& traj, double t, double eta,
                                         double mu, double p);

/// Result of integrating the dual system forward in dual time.
struct DualRun {
    std::vector<double> times;
    VectorField final_phi;
    double phi0_l1 = 0.0;
    double sup_l1 = 0.0;        // sup over steps of ||phi(s)||_1
    bool aborted = false;
    std::string abort_reason;
};

/// Semi-implicit integration of phi_s - nu Lap phi - div(a_eta grad phi) =
/// delta (phi div(drift) + drift . grad phi) over [0, horizon]. Diffusion implicit
/// with the coefficient sample at the start of each step, drift terms explicit.
DualRun dual_run(const VectorField& phi0, const DualCoefficients& coeffs, double nu,
                 double dt, const SchemeConfig& cfg = {});

/// |(v(t), phi0) - (v0, phi(t))| for the dual run seeded at phi0 with coefficients
/// built from the forward trajectory at mollification radius eta.
double duality_residual(const Trajectory& forward, double t, const VectorField& phi0,
                        double eta, double nu_dual, double dt,
                        const SchemeConfig& cfg = {});

struct MaxPrincipleReport {
    double max_overshoot = 0.0;
    std::vector<double> overshoot;  // per diagnostics sample
};

/// Per-sample max(0, ||v(t)||_inf - ||v0||_inf) along a forward run.
MaxPrincipleReport linf_bound_check(const Trajectory& forward);

/// Smooth bump exp(-1/(1-|x-center|^2/rho^2)) restricted to its support and
/// normalized to unit discrete L1 mass; a compactly supported dual seed.
VectorField dual_bump(const Grid& grid, const std::vector<double>& center, double rho);

}  // namespace plap
