#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace plap {

/// All continuum and scheme parameters for one solver run.
struct SimParams {
    double p = 1.8;       ///< growth exponent, 3/2 < p <= 2 (p=2 is the heat reduction)
    double mu = 0.0;      ///< regularization shift inside the diffusion coefficient
    double nu = 0.0;      ///< viscosity regularization (extra Laplacian)
    double delta = 1.0;   ///< convection strength, signed
    double alpha = 0.0;   ///< weight exponent for t^{alpha/(4-p)} monitors; 0 = derive default
    int dim = 1;          ///< spatial dimension, 1..3
    int n_cells = 63;     ///< interior nodes per axis
    double dt = 1e-3;
    double t_end = 0.1;
    double eta = 0.0;     ///< dual space-time mollification radius

    void validate() const;               // throws std::invalid_argument on violation
    double weighted_alpha() const;       // alpha if set, else 1.1*(4-p)/p
};

/// Uniform box grid on (0,1)^d, interior nodes only; the boundary carries zero.
/// A staggered grid puts nodes at cell midpoints (i+1/2)/n instead; it is used
/// as a collocation grid (its midpoint rule integrates trig polynomials with
/// harmonics below 2n exactly), never for difference stencils.
struct Grid {
    int dim = 1;
    int n = 0;        ///< nodes per axis
    double h = 0.0;   ///< spacing: 1/(n+1), or 1/n when staggered
    bool staggered = false;

    Grid() = default;
    Grid(int dim_, int n_, bool staggered_ = false);

    std::size_t num_nodes() const;
    double coord(int i) const { return staggered ? (i + 0.5) * h : (i + 1) * h; }

    bool operator==(const Grid&) const = default;
};

/// Nodal values of an R^d-valued field; components[c] is row-major over interior nodes.
struct VectorField {
    Grid grid;
    std::vector<std::vector<double>> components;
    std::optional<double> time_tag;

    VectorField() = default;
    explicit VectorField(const Grid& g);

    int ncomp() const { return static_cast<int>(components.size()); }
    bool finite() const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double c, const VectorField& f);

/// Per-step scalar monitors stored along a trajectory.
struct DiagnosticsRecord {
    double time = 0.0;
    double l2_norm = 0.0;
    double linf_norm = 0.0;
    double grad_l2 = 0.0;
    double grad_lp = 0.0;
    double weighted_flux = 0.0;    // ||(mu+|grad v|^2)^{(p-2)/4} grad v||_2
    double energy_residual = 0.0;
    double overshoot = 0.0;        // max(0, ||v||_inf - ||u0||_inf)
    double b_mu = 0.0;             // mu*|Omega| + ||grad v||_2^2
    double phi_weight = 0.0;       // t^alpha * b_mu^{(4-p)/2}
    bool extinction_flag = false;
};

/// Time-indexed sequence of fields plus per-step diagnostics; the unit of verification.
struct Trajectory {
    SimParams params;
    std::vector<double> times;            // snapshot times, times[0] == 0
    std::vector<VectorField> states;      // one per snapshot time
    std::vector<DiagnosticsRecord> diagnostics;  // one per completed step (plus t=0 entry)
    std::optional<double> extinction_time;
    bool aborted = false;
    std::string abort_reason;

    const VectorField& initial() const { return states.front(); }
    const VectorField& final_state() const { return states.back(); }
};

/// Descriptor for initial data: smooth sine products, rough indicators, or raw nodes.
struct InitialCondition {
    enum class Kind { zero, sine, indicator, nodal };
    Kind kind = Kind::zero;
    std::vector<int> mode;            // sine: per-axis mode indices (defaults to all 1)
    std::vector<double> amplitudes;   // per-component amplitudes (missing -> 0)
    double box_lo = 0.25;             // indicator support [box_lo, box_hi]^d
    double box_hi = 0.75;
    std::vector<std::vector<double>> nodal;  // kind==nodal: verbatim components
};

VectorField make_initial(const InitialCondition& spec, const Grid& grid, int ncomp);

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// Discrete L^q norm (midpoint quadrature h^d per node) of the Euclidean magnitude;
/// q = kInfNorm gives the nodal max.
double lp_norm(const VectorField& f, double q);

/// Inner product h^d * sum_i a_i . b_i over interior nodes.
double inner(const VectorField& a, const VectorField& b);

/// sup over stored samples t>0 of t^{alpha/(4-p)} ||grad u(t)||_2.
/// alpha <= (4-p)/p is out of the theory's range; the value is still computed and
/// out_of_theory (if non-null) is set.
double weighted_sup_monitor(const Trajectory& traj, double alpha, double p,
                            bool* out_of_theory = nullptr);

}  // namespace plap
