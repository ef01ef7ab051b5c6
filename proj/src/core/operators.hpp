#pragma once

#include <array>
#include <vector>

#include "core/fields.hpp"

namespace plap {

/// Per-node gradient tensor d_beta v_i (centered differences, zero ghost values).
struct GradientField {
    Grid grid;
    int ncomp = 0;
    std::vector<double> tensor;        // [node*ncomp*dim + i*dim + beta]
    std::vector<double> magnitude_sq;  // per node, sum_{i,beta} (d_beta v_i)^2

    double entry(std::size_t node, int comp, int axis) const {
        return tensor[(node * ncomp + comp) * grid.dim + axis];
    }
    double l2_norm() const;
    double lp_norm(double q) const;
    /// ||(mu+|grad v|^2)^{(p-2)/4} grad v||_2
    double weighted_flux_norm(double mu, double p) const;
};

GradientField gradient(const VectorField& v);

/// Normalized smooth bump sampled on grid offsets; weights sum to 1 exactly.
struct MollifierKernel {
    double radius = 0.0;
    std::vector<std::array<int, 3>> offsets;
    std::vector<double> weights;

    /// Degenerate kernel (radius < h): single unit tap at the origin.
    bool is_identity() const { return offsets.size() == 1; }
};

MollifierKernel make_mollifier(const Grid& grid, double radius);

/// Mollification radius law for the transport velocity J_mu(v).
inline double mollifier_radius(double mu, double h) { return std::max(mu, 2.0 * h); }

/// Nodal values of (mu+|grad v|^2)^{(p-2)/2} plus the count of exactly-degenerate
/// nodes that needed the epsilon floor (only possible at mu = 0).
struct DiffusionCoefficient {
    std::vector<double> values;
    long clamp_events = 0;
};

DiffusionCoefficient diffusion_coefficient(const GradientField& g, double mu, double p);

/// Divergence of a*grad(v) in conservative flux form; face coefficients are the
/// arithmetic mean of the adjacent nodal values (boundary faces use the interior node).
VectorField flux_divergence(const VectorField& v, const std::vector<double>& a_nodal);

/// Standard second-order Dirichlet Laplacian.
VectorField laplacian(const VectorField& v);

/// +div((mu+|grad v|^2)^{(p-2)/2} grad v)
VectorField p_laplacian_apply(const VectorField& v, double mu, double p);

/// Nodal (w . grad) v with centered differences on v.
VectorField convection(const VectorField& w, const VectorField& v);

/// Discrete convolution with a space mollifier of the given radius, with v extended
/// by zero outside the domain. radius < h returns v unchanged.
VectorField mollify_space(const VectorField& v, double radius);
VectorField mollify_with(const VectorField& v, const MollifierKernel& kernel);

/// Centered-difference divergence of a vector field (ncomp must equal dim).
std::vector<double> divergence(const VectorField& v);

/// h^d * sum over faces of a_face * (Dv . Dw); the summation-by-parts dual of
/// flux_divergence: <flux_divergence(v,a), w> = -flux_energy(a, v, w) exactly.
double flux_energy(const std::vector<double>& a_nodal, const VectorField& v,
                   const VectorField& w);

/// Gradients of the trajectory's states convolved with a separable time x space
/// bump of radius eta (time axis reflected at the endpoints).
std::vector<GradientField> mollify_spacetime(const Trajectory& traj, double eta);

}  // namespace plap
