#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/fields.hpp"
#include "core/stepper.hpp"

namespace plap {

/// Residual of the discrete energy balance across snapshots n and n+1 of a stride-1
/// trajectory (recomputed from the stored states; run() also records it per step).
double energy_residual(const Trajectory& traj, std::size_t n,
                       SchemeConfig::Mode mode = SchemeConfig::Mode::semi_implicit);

/// Best (smallest) discrete Rayleigh quotient ||grad u||_p^p / ||u||_2^p found by
/// normalized gradient descent from `seeds` random starts; a certified upper estimate
/// of the discrete Sobolev constant gamma_h. Uses face-difference gradients, matching
/// the dissipation form of the implicit scheme.
double gamma_estimate(const Grid& grid, double p, int seeds, std::uint64_t rng_seed);

struct ExtinctionReport {
    double gamma = 0.0;             // Sobolev constant estimate used
    double hypothesis_lhs = 0.0;    // |delta| ||u0||_inf^{2/(p-1)} ||u0||_2^{2-p}
    std::optional<double> t_star_bound;  // defined only when hypothesis_lhs < gamma
    std::optional<double> measured_extinction;
    std::optional<double> monotone_from;  // time after which ||u||_2 is nonincreasing
};

/// T* <= p' ||u0||_2^{2-p} / ((gamma - hypothesis_lhs)(2-p)); nullopt when the
/// smallness hypothesis fails.
std::optional<double> t_star_bound(double u0_l2, double u0_linf, double p, double delta,
                                   double gamma);

double extinction_hypothesis_lhs(double u0_l2, double u0_linf, double p, double delta);

/// First sample time with ||u(t)||_2 <= threshold, from the per-step diagnostics.
std::optional<double> extinction_time(const Trajectory& traj, double threshold);

ExtinctionReport extinction_report(const Trajectory& traj, double gamma,
                                   double threshold);

struct EnvelopeViolation {
    double max_violation = 0.0;   // max positive (d/dt||u||_2 - rhs), raw units
    double normalized = 0.0;      // relative to the rhs scale (gamma/p') ||u0||_2^{p-1}
};

/// Forward-difference check of d/dt||u||_2 <= (1/p')||u||_2^{p-1}
/// (|delta| ||u||_2^{2-p} ||u0||_inf^{2/(p-1)} - gamma) at every sample.
EnvelopeViolation ode_envelope_check(const Trajectory& traj, double p, double delta,
                                     double gamma, double u0_linf);

struct WeightedHessianReport {
    double lhs = 0.0;          // ||(mu+|grad v|^2)^{(p-2)/4} D^2 v||_2
    double c1 = 0.0;           // (p/(p(p-1)^2 - zeta))^{1/2}
    double c1_term = 0.0;      // c1 * ||(mu+|grad v|^2)^{(p-2)/4} Lap v||_2
    double residual = 0.0;     // lhs - c1_term
    double implied_c2 = 0.0;   // residual * zeta / (||grad v||_p^p + mu^{p/2}|Omega|)^{1/2}
};

/// Weighted second-derivative inequality diagnostic; zeta defaults to p(2p-3)/2.
WeightedHessianReport weighted_hessian_ratio(const VectorField& v, double mu, double p,
                                    double zeta = 0.0);

/// Nonlinear Gronwall envelope {C^{1-theta} exp[(1-theta) int A] + ...}^{1/(1-theta)}
/// evaluated by trapezoid quadrature on the sampled coefficients A and B.
double gronwall_envelope(double C, const std::vector<double>& times,
                         const std::vector<double>& A, const std::vector<double>& B,
                         double theta);

}  // namespace plap
