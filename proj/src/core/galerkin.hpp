#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/fields.hpp"

namespace plap {

/// Sine products a_j(x) = prod_beta sqrt(2) sin(j_beta pi x_beta), the Dirichlet
/// eigenbasis of -Lap on (0,1)^d, tabulated on a collocation grid. The grid nodes
/// x_q = q/(Q+1) make the basis exactly orthonormal under h^d nodal quadrature as
/// long as every mode index stays below (Q+1)/2.
struct SpectralBasis {
    int dim = 1;
    int modes_per_axis = 1;
    Grid quad_grid;                            // interior collocation nodes
    std::vector<std::array<int, 3>> modes;     // multi-index per scalar mode
    std::vector<double> eigenvalues;           // pi^2 |k|^2
    std::vector<std::vector<double>> values;   // [mode][node]
    std::vector<std::vector<double>> grads;    // [mode][node*dim + beta]

    int num_modes() const { return static_cast<int>(modes.size()); }
};

/// quad_points is per axis; 0 selects the default 4 * modes_per_axis. Throws when the
/// grid is too coarse to resolve the requested modes without aliasing.
SpectralBasis build_basis(int dim, int modes_per_axis, int quad_points = 0);

/// Basis plus parameters plus the tensors that do not change along a trajectory:
/// the mollified basis values (transport velocity factors) and the dense convection
/// tensor B[axis][(j*K+i)*K+l] = (J(a_i) d_axis a_l, a_j). Sized for small mode
/// counts; this module is an oracle, not a production path.
struct GalerkinSystem {
    SpectralBasis basis;
    SimParams params;
    std::vector<std::vector<double>> mollified;  // [mode][node]
    std::vector<std::vector<double>> B;          // per axis, dense K^3

    int num_modes() const { return basis.num_modes(); }
};

/// Requires params.mu > 0: the coefficient ODE is locally Lipschitz only then.
GalerkinSystem make_system(SpectralBasis basis, const SimParams& params);

/// Coefficient state c[comp][mode] at one time.
struct GalerkinState {
    std::vector<std::vector<double>> coeffs;
    double time = 0.0;

    double norm_sq() const;  // Parseval: ||v||_2^2 = sum of squared coefficients
};

/// Quadrature projection of nodal data sampled on the basis collocation grid.
/// The field's grid must equal basis.quad_grid.
GalerkinState project(const VectorField& u0, const SpectralBasis& basis);

/// Projection of a closed-form datum (sampled on the collocation grid first).
GalerkinState project(const InitialCondition& spec, const SpectralBasis& basis,
                      int ncomp);

/// Coefficient time derivative: viscosity (diagonal), the frozen-coefficient
/// diffusion form reassembled pseudo-spectrally, and the precomputed convection
/// tensor scaled by delta.
std::vector<std::vector<double>> galerkin_rhs(const GalerkinSystem& sys,
                                              const std::vector<std::vector<double>>& c);

struct GalerkinTrajectory {
    std::vector<GalerkinState> states;          // every step endpoint
    std::vector<double> energy_integrand;       // dissipation sample per endpoint
    double identity_residual = 0.0;             // time-integrated energy-identity defect
    bool aborted = false;
    std::string abort_reason;

    const GalerkinState& final_state() const { return states.back(); }
};

/// Classical RK4 on the coefficient ODE. Aborts when |c| exceeds 1e6 |c0|.
GalerkinTrajectory integrate(const GalerkinSystem& sys, const GalerkinState& c0,
                             double dt, double t_end);

/// Evaluate the truncated series at the nodes of an arbitrary grid.
VectorField reconstruct(const SpectralBasis& basis,
                        const std::vector<std::vector<double>>& coeffs,
                        const Grid& grid);

}  // namespace plap
