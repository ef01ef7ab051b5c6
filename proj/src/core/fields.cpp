#include "core/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "core/operators.hpp"

namespace plap {

void SimParams::validate() const {
    if (!(p > 1.5 && p <= 2.0))
        throw std::invalid_argument("p must lie in (3/2, 2], got " + std::to_string(p));
    if (mu < 0.0) throw std::invalid_argument("mu must be >= 0");
    if (nu < 0.0) throw std::invalid_argument("nu must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (t_end < 0.0) throw std::invalid_argument("t_end must be >= 0");
    if (n_cells < 3) throw std::invalid_argument("n_cells must be >= 3");
    if (dim < 1 || dim > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
    if (eta < 0.0) throw std::invalid_argument("eta must be >= 0");
}

double SimParams::weighted_alpha() const {
    return alpha > 0.0 ? alpha : 1.1 * (4.0 - p) / p;
}

Grid::Grid(int dim_, int n_, bool staggered_)
    : dim(dim_), n(n_), h(staggered_ ? 1.0 / n_ : 1.0 / (n_ + 1)), staggered(staggered_) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("Grid: dim must be 1..3");
    if (n_ < 3) throw std::invalid_argument("Grid: n must be >= 3");
}

std::size_t Grid::num_nodes() const {
    std::size_t m = 1;
    for (int k = 0; k < dim; ++k) m *= static_cast<std::size_t>(n);
    return m;
}

VectorField::VectorField(const Grid& g)
    : grid(g), components(g.dim, std::vector<double>(g.num_nodes(), 0.0)) {}

bool VectorField::finite() const {
    for (const auto& c : components)
        for (double v : c)
            if (!std::isfinite(v)) return false;
    return true;
}

static void check_same_shape(const VectorField& a, const VectorField& b) {
    if (!(a.grid == b.grid) || a.ncomp() != b.ncomp())
        throw std::invalid_argument("VectorField shape mismatch");
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    check_same_shape(a, b);
    VectorField r = a;
    for (int c = 0; c < r.ncomp(); ++c)
        for (std::size_t i = 0; i < r.components[c].size(); ++i)
            r.components[c][i] += b.components[c][i];
    return r;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    check_same_shape(a, b);
    VectorField r = a;
    for (int c = 0; c < r.ncomp(); ++c)
        for (std::size_t i = 0; i < r.components[c].size(); ++i)
            r.components[c][i] -= b.components[c][i];
    return r;
}

VectorField operator*(double c, const VectorField& f) {
    VectorField r = f;
    for (auto& comp : r.components)
        for (double& v : comp) v *= c;
    return r;
}

VectorField make_initial(const InitialCondition& spec, const Grid& grid, int ncomp) {
    using std::numbers::pi;
    VectorField f(grid);
    f.components.resize(ncomp, std::vector<double>(grid.num_nodes(), 0.0));

    auto node_coords = [&](std::size_t idx, double* x) {
        for (int k = grid.dim - 1; k >= 0; --k) {
            x[k] = grid.coord(static_cast<int>(idx % grid.n));
            idx /= grid.n;
        }
    };

    switch (spec.kind) {
        case InitialCondition::Kind::zero:
            break;
        case InitialCondition::Kind::sine: {
            std::vector<int> mode(grid.dim, 1);
            for (int k = 0; k < grid.dim && k < static_cast<int>(spec.mode.size()); ++k)
                mode[k] = spec.mode[k];
            for (int c = 0; c < ncomp; ++c) {
                double amp = c < static_cast<int>(spec.amplitudes.size()) ? spec.amplitudes[c] : 0.0;
                if (!std::isfinite(amp)) throw std::invalid_argument("initial amplitude non-finite");
                if (amp == 0.0) continue;
                for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
                    double x[3];
                    node_coords(i, x);
                    double v = amp;
                    for (int k = 0; k < grid.dim; ++k) v *= std::sin(mode[k] * pi * x[k]);
                    f.components[c][i] = v;
                }
            }
            break;
        }
        case InitialCondition::Kind::indicator: {
            for (int c = 0; c < ncomp; ++c) {
                double amp = c < static_cast<int>(spec.amplitudes.size()) ? spec.amplitudes[c] : 0.0;
                if (!std::isfinite(amp)) throw std::invalid_argument("initial amplitude non-finite");
                if (amp == 0.0) continue;
                for (std::size_t i = 0; i < grid.num_nodes(); ++i) {
                    double x[3];
                    node_coords(i, x);
                    bool inside = true;
                    for (int k = 0; k < grid.dim; ++k)
                        inside = inside && x[k] >= spec.box_lo && x[k] <= spec.box_hi;
                    if (inside) f.components[c][i] = amp;
                }
            }
            break;
        }
        case InitialCondition::Kind::nodal: {
            if (static_cast<int>(spec.nodal.size()) != ncomp)
                throw std::invalid_argument("nodal initial data: wrong component count");
            for (int c = 0; c < ncomp; ++c) {
                if (spec.nodal[c].size() != grid.num_nodes())
                    throw std::invalid_argument("nodal initial data: wrong node count");
                f.components[c] = spec.nodal[c];
            }
            break;
        }
        default:
            throw std::invalid_argument("unknown initial condition kind");
    }
    if (!f.finite()) throw std::invalid_argument("initial data contains non-finite values");
    return f;
}

double lp_norm(const VectorField& f, double q) {
    const std::size_t m = f.grid.num_nodes();
    if (q == kInfNorm) {
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (const auto& c : f.components) s += c[i] * c[i];
            best = std::max(best, s);
        }
        return std::sqrt(best);
    }
    if (q < 1.0) throw std::invalid_argument("lp_norm: q must be >= 1");
    const double hd = std::pow(f.grid.h, f.grid.dim);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (const auto& c : f.components) s += c[i] * c[i];
        acc += std::pow(s, 0.5 * q);
    }
    return std::pow(acc * hd, 1.0 / q);
}

double inner(const VectorField& a, const VectorField& b) {
    check_same_shape(a, b);
    const double hd = std::pow(a.grid.h, a.grid.dim);
    double acc = 0.0;
    for (int c = 0; c < a.ncomp(); ++c)
        for (std::size_t i = 0; i < a.components[c].size(); ++i)
            acc += a.components[c][i] * b.components[c][i];
    return acc * hd;
}

double weighted_sup_monitor(const Trajectory& traj, double alpha, double p,
                            bool* out_of_theory) {
    if (out_of_theory) *out_of_theory = alpha <= (4.0 - p) / p;
    const double ex = alpha / (4.0 - p);
    double best = 0.0;
    if (!traj.diagnostics.empty()) {
        for (const auto& d : traj.diagnostics) {
            if (d.time <= 0.0) continue;
            best = std::max(best, std::pow(d.time, ex) * d.grad_l2);
        }
    } else {
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            double t = traj.times[k];
            if (t <= 0.0) continue;
            GradientField g = gradient(traj.states[k]);
            best = std::max(best, std::pow(t, ex) * g.l2_norm());
        }
    }
    return best;
}

}  // namespace plap
