#include "core/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plap {

namespace {

struct Idx {
    int n, dim;
    std::size_t stride[3];

    explicit Idx(const Grid& g) : n(g.n), dim(g.dim) {
        std::size_t s = 1;
        for (int k = dim - 1; k >= 0; --k) {
            stride[k] = s;
            s *= static_cast<std::size_t>(n);
        }
    }
    int coord(std::size_t idx, int axis) const {
        return static_cast<int>((idx / stride[axis]) % n);
    }
    // Value at idx shifted by `off` along `axis`; zero outside the interior.
    double shifted(const std::vector<double>& f, std::size_t idx, int axis, int off) const {
        int c = coord(idx, axis) + off;
        if (c < 0 || c >= n) return 0.0;
        return f[idx + static_cast<std::size_t>(off) * stride[axis]];
    }
};

double bump(double rho_sq) {
    if (rho_sq >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - rho_sq));
}

std::vector<double> convolve_scalar(const Grid& grid, const std::vector<double>& f,
                                    const MollifierKernel& kernel) {
    const Idx ix(grid);
    const std::size_t m = grid.num_nodes();
    std::vector<double> out(m, 0.0);
    const std::size_t taps = kernel.offsets.size();
    for (std::size_t i = 0; i < m; ++i) {
        int c[3];
        for (int k = 0; k < grid.dim; ++k) c[k] = ix.coord(i, k);
        double acc = 0.0;
        for (std::size_t t = 0; t < taps; ++t) {
            std::size_t j = 0;
            bool inside = true;
            for (int k = 0; k < grid.dim; ++k) {
                int ck = c[k] + kernel.offsets[t][k];
                if (ck < 0 || ck >= grid.n) { inside = false; break; }
                j += static_cast<std::size_t>(ck) * ix.stride[k];
            }
            if (inside) acc += kernel.weights[t] * f[j];
        }
        out[i] = acc;
    }
    return out;
}

}  // namespace

double GradientField::l2_norm() const {
    const double hd = std::pow(grid.h, grid.dim);
    double acc = 0.0;
    for (double s : magnitude_sq) acc += s;
    return std::sqrt(acc * hd);
}

double GradientField::lp_norm(double q) const {
    const double hd = std::pow(grid.h, grid.dim);
    double acc = 0.0;
    for (double s : magnitude_sq) acc += std::pow(s, 0.5 * q);
    return std::pow(acc * hd, 1.0 / q);
}

double GradientField::weighted_flux_norm(double mu, double p) const {
    const double hd = std::pow(grid.h, grid.dim);
    double acc = 0.0;
    for (double s : magnitude_sq) {
        if (mu + s > 0.0) acc += std::pow(mu + s, 0.5 * (p - 2.0)) * s;
    }
    return std::sqrt(acc * hd);
}

GradientField gradient(const VectorField& v) {
    const Grid& g = v.grid;
    const Idx ix(g);
    const std::size_t m = g.num_nodes();
    const int d = g.dim, nc = v.ncomp();
    GradientField out;
    out.grid = g;
    out.ncomp = nc;
    out.tensor.assign(m * nc * d, 0.0);
    out.magnitude_sq.assign(m, 0.0);
    const double inv2h = 0.5 / g.h;
    for (int i = 0; i < nc; ++i) {
        const auto& comp = v.components[i];
        for (std::size_t idx = 0; idx < m; ++idx) {
            for (int b = 0; b < d; ++b) {
                double dv = (ix.shifted(comp, idx, b, +1) - ix.shifted(comp, idx, b, -1)) * inv2h;
                out.tensor[(idx * nc + i) * d + b] = dv;
                out.magnitude_sq[idx] += dv * dv;
            }
        }
    }
    return out;
}

MollifierKernel make_mollifier(const Grid& grid, double radius) {
    MollifierKernel k;
    k.radius = radius;
    const int M = radius >= grid.h ? static_cast<int>(std::floor(radius / grid.h)) : 0;
    if (M == 0) {
        k.offsets.push_back({0, 0, 0});
        k.weights.push_back(1.0);
        return k;
    }
    double total = 0.0;
    std::array<int, 3> off = {0, 0, 0};
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int kk = 0; kk < grid.dim; ++kk) { lo[kk] = -M; hi[kk] = M; }
    for (int a = lo[0]; a <= hi[0]; ++a)
        for (int b = lo[1]; b <= hi[1]; ++b)
            for (int c = lo[2]; c <= hi[2]; ++c) {
                double rho_sq = (static_cast<double>(a) * a + static_cast<double>(b) * b +
                                 static_cast<double>(c) * c) *
                                grid.h * grid.h / (radius * radius);
                double w = bump(rho_sq);
                if (w > 0.0) {
                    off = {a, b, c};
                    k.offsets.push_back(off);
                    k.weights.push_back(w);
                    total += w;
                }
            }
    for (double& w : k.weights) w /= total;
    return k;
}

DiffusionCoefficient diffusion_coefficient(const GradientField& g, double mu, double p) {
    if (mu < 0.0) throw std::invalid_argument("diffusion_coefficient: mu must be >= 0");
    DiffusionCoefficient out;
    out.values.resize(g.magnitude_sq.size());
    if (p == 2.0) {
        std::fill(out.values.begin(), out.values.end(), 1.0);
        return out;
    }
    constexpr double kDegenerateFloor = 1e-30;
    const double e = 0.5 * (p - 2.0);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        double base = mu + g.magnitude_sq[i];
        if (base == 0.0) {
            base = kDegenerateFloor;
            ++out.clamp_events;
        }
        out.values[i] = std::pow(base, e);
    }
    return out;
}

VectorField flux_divergence(const VectorField& v, const std::vector<double>& a_nodal) {
    const Grid& g = v.grid;
    if (a_nodal.size() != g.num_nodes())
        throw std::invalid_argument("flux_divergence: coefficient size mismatch");
    const Idx ix(g);
    const std::size_t m = g.num_nodes();
    const double inv_h2 = 1.0 / (g.h * g.h);
    VectorField out(g);
    out.components.resize(v.ncomp(), std::vector<double>(m, 0.0));
    for (int i = 0; i < v.ncomp(); ++i) {
        const auto& comp = v.components[i];
        auto& res = out.components[i];
        for (std::size_t idx = 0; idx < m; ++idx) {
            const double vi = comp[idx];
            const double ai = a_nodal[idx];
            double acc = 0.0;
            for (int b = 0; b < g.dim; ++b) {
                int c = ix.coord(idx, b);
                double vp = 0.0, ap = ai;  // boundary face keeps the interior value
                if (c + 1 < g.n) {
                    vp = comp[idx + ix.stride[b]];
                    ap = 0.5 * (ai + a_nodal[idx + ix.stride[b]]);
                }
                double vm = 0.0, am = ai;
                if (c - 1 >= 0) {
                    vm = comp[idx - ix.stride[b]];
                    am = 0.5 * (ai + a_nodal[idx - ix.stride[b]]);
                }
                acc += ap * (vp - vi) - am * (vi - vm);
            }
            res[idx] = acc * inv_h2;
        }
    }
    return out;
}

VectorField laplacian(const VectorField& v) {
    static thread_local std::vector<double> ones;
    ones.assign(v.grid.num_nodes(), 1.0);
    return flux_divergence(v, ones);
}

VectorField p_laplacian_apply(const VectorField& v, double mu, double p) {
    GradientField g = gradient(v);
    DiffusionCoefficient a = diffusion_coefficient(g, mu, p);
    return flux_divergence(v, a.values);
}

VectorField convection(const VectorField& w, const VectorField& v) {
    if (!(w.grid == v.grid)) throw std::invalid_argument("convection: grid mismatch");
    if (w.ncomp() != w.grid.dim)
        throw std::invalid_argument("convection: transport field must have dim components");
    const Grid& g = v.grid;
    const Idx ix(g);
    const std::size_t m = g.num_nodes();
    const double inv2h = 0.5 / g.h;
    VectorField out(g);
    out.components.resize(v.ncomp(), std::vector<double>(m, 0.0));
    for (int i = 0; i < v.ncomp(); ++i) {
        const auto& comp = v.components[i];
        auto& res = out.components[i];
        for (std::size_t idx = 0; idx < m; ++idx) {
            double acc = 0.0;
            for (int b = 0; b < g.dim; ++b) {
                double dv = (ix.shifted(comp, idx, b, +1) - ix.shifted(comp, idx, b, -1)) * inv2h;
                acc += w.components[b][idx] * dv;
            }
            res[idx] = acc;
        }
    }
    return out;
}

VectorField mollify_with(const VectorField& v, const MollifierKernel& kernel) {
    if (kernel.is_identity()) return v;
    VectorField out(v.grid);
    out.components.resize(v.ncomp());
    out.time_tag = v.time_tag;
    for (int i = 0; i < v.ncomp(); ++i)
        out.components[i] = convolve_scalar(v.grid, v.components[i], kernel);
    return out;
}

VectorField mollify_space(const VectorField& v, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("mollify_space: radius must be > 0");
    if (radius < v.grid.h) return v;  // kernel degenerates to identity
    return mollify_with(v, make_mollifier(v.grid, radius));
}

std::vector<double> divergence(const VectorField& v) {
    if (v.ncomp() != v.grid.dim)
        throw std::invalid_argument("divergence: field must have dim components");
    const Grid& g = v.grid;
    const Idx ix(g);
    const std::size_t m = g.num_nodes();
    const double inv2h = 0.5 / g.h;
    std::vector<double> out(m, 0.0);
    for (int b = 0; b < g.dim; ++b) {
        const auto& comp = v.components[b];
        for (std::size_t idx = 0; idx < m; ++idx)
            out[idx] += (ix.shifted(comp, idx, b, +1) - ix.shifted(comp, idx, b, -1)) * inv2h;
    }
    return out;
}

double flux_energy(const std::vector<double>& a_nodal, const VectorField& v,
                   const VectorField& w) {
    const Grid& g = v.grid;
    if (!(g == w.grid) || v.ncomp() != w.ncomp())
        throw std::invalid_argument("flux_energy: shape mismatch");
    const Idx ix(g);
    const std::size_t m = g.num_nodes();
    const double hd = std::pow(g.h, g.dim);
    const double inv_h2 = 1.0 / (g.h * g.h);
    double acc = 0.0;
    for (int i = 0; i < v.ncomp(); ++i) {
        const auto& vc = v.components[i];
        const auto& wc = w.components[i];
        for (std::size_t idx = 0; idx < m; ++idx) {
            for (int b = 0; b < g.dim; ++b) {
                int c = ix.coord(idx, b);
                // upper face owned by this node (interior face or the high boundary face)
                double af, dv, dw;
                if (c + 1 < g.n) {
                    af = 0.5 * (a_nodal[idx] + a_nodal[idx + ix.stride[b]]);
                    dv = vc[idx + ix.stride[b]] - vc[idx];
                    dw = wc[idx + ix.stride[b]] - wc[idx];
                } else {
                    af = a_nodal[idx];
                    dv = -vc[idx];
                    dw = -wc[idx];
                }
                acc += af * dv * dw;
                if (c == 0) {  // low boundary face
                    acc += a_nodal[idx] * vc[idx] * wc[idx];
                }
            }
        }
    }
    return acc * hd * inv_h2;
}

std::vector<GradientField> mollify_spacetime(const Trajectory& traj, double eta) {
    if (eta <= 0.0) throw std::invalid_argument("mollify_spacetime: eta must be > 0");
    const std::size_t N = traj.states.size();
    if (N < 2) throw std::invalid_argument("mollify_spacetime: trajectory too short");
    const double span = traj.times.back() - traj.times.front();
    if (eta > 0.5 * span)
        throw std::invalid_argument("mollify_spacetime: eta exceeds half the trajectory span");
    const double dt = traj.times[1] - traj.times[0];
    const Grid& g = traj.states.front().grid;

    // raw gradients, then space mollification of every tensor entry
    std::vector<GradientField> grads(N);
    MollifierKernel sk = make_mollifier(g, std::max(eta, 0.0));
    const bool do_space = eta >= g.h;
    for (std::size_t k = 0; k < N; ++k) {
        grads[k] = gradient(traj.states[k]);
        if (do_space) {
            const int nc = grads[k].ncomp, d = g.dim;
            const std::size_t m = g.num_nodes();
            std::vector<double> entry(m);
            for (int i = 0; i < nc; ++i)
                for (int b = 0; b < d; ++b) {
                    for (std::size_t idx = 0; idx < m; ++idx)
                        entry[idx] = grads[k].tensor[(idx * nc + i) * d + b];
                    std::vector<double> sm = convolve_scalar(g, entry, sk);
                    for (std::size_t idx = 0; idx < m; ++idx)
                        grads[k].tensor[(idx * nc + i) * d + b] = sm[idx];
                }
        }
    }

    // time mollification with reflection at the endpoints
    const int Mt = eta >= dt ? static_cast<int>(std::floor(eta / dt)) : 0;
    if (Mt > 0) {
        std::vector<double> tw(2 * Mt + 1);
        double total = 0.0;
        for (int mth = -Mt; mth <= Mt; ++mth) {
            double rho = mth * dt / eta;
            tw[mth + Mt] = bump(rho * rho);
            total += tw[mth + Mt];
        }
        for (double& w : tw) w /= total;
        auto reflect = [&](long k) {
            long n = static_cast<long>(N);
            while (k < 0 || k >= n) {
                if (k < 0) k = -k;
                if (k >= n) k = 2 * n - 2 - k;
            }
            return static_cast<std::size_t>(k);
        };
        const std::size_t entries = grads[0].tensor.size();
        std::vector<std::vector<double>> smoothed(N, std::vector<double>(entries, 0.0));
        for (std::size_t k = 0; k < N; ++k)
            for (int mth = -Mt; mth <= Mt; ++mth) {
                const auto& src = grads[reflect(static_cast<long>(k) + mth)].tensor;
                const double w = tw[mth + Mt];
                for (std::size_t e = 0; e < entries; ++e) smoothed[k][e] += w * src[e];
            }
        for (std::size_t k = 0; k < N; ++k) grads[k].tensor = std::move(smoothed[k]);
    }

    // recompute magnitudes from the mollified tensors
    for (auto& gf : grads) {
        const int nc = gf.ncomp, d = g.dim;
        const std::size_t m = g.num_nodes();
        for (std::size_t idx = 0; idx < m; ++idx) {
            double s = 0.0;
            for (int i = 0; i < nc; ++i)
                for (int b = 0; b < d; ++b) {
                    double t = gf.tensor[(idx * nc + i) * d + b];
                    s += t * t;
                }
            gf.magnitude_sq[idx] = s;
        }
    }
    return grads;
}

}  // namespace plap
