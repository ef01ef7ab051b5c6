#include "core/galerkin.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "core/operators.hpp"

namespace plap {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t quad_index(const Grid& g, const std::array<int, 3>& q) {
    std::size_t idx = 0;
    for (int b = 0; b < g.dim; ++b) idx = idx * g.n + static_cast<std::size_t>(q[b]);
    return idx;
}

}  // namespace

SpectralBasis build_basis(int dim, int modes_per_axis, int quad_points) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("build_basis: dim must be 1..3");
    if (modes_per_axis < 1)
        throw std::invalid_argument("build_basis: modes_per_axis must be >= 1");
    if (quad_points == 0) quad_points = 4 * modes_per_axis;
    if (quad_points < 2 * modes_per_axis + 1)
        throw std::invalid_argument(
            "build_basis: quad_points < 2*modes_per_axis+1 would alias the top modes");

    SpectralBasis basis;
    basis.dim = dim;
    basis.modes_per_axis = modes_per_axis;
    basis.quad_grid = Grid(dim, quad_points, /*staggered=*/true);
    const Grid& g = basis.quad_grid;

    // per-axis tables of sqrt(2) sin(k pi x_q) and its derivative
    const int K1 = modes_per_axis, Q = quad_points;
    std::vector<double> sin_t(static_cast<std::size_t>(K1) * Q);
    std::vector<double> cos_t(static_cast<std::size_t>(K1) * Q);
    for (int k = 1; k <= K1; ++k)
        for (int q = 0; q < Q; ++q) {
            double x = g.coord(q);
            sin_t[(k - 1) * static_cast<std::size_t>(Q) + q] =
                std::sqrt(2.0) * std::sin(k * kPi * x);
            cos_t[(k - 1) * static_cast<std::size_t>(Q) + q] =
                std::sqrt(2.0) * k * kPi * std::cos(k * kPi * x);
        }

    // enumerate multi-indices in row-major order over [1..K1]^dim
    std::size_t K = 1;
    for (int b = 0; b < dim; ++b) K *= static_cast<std::size_t>(K1);
    const std::size_t nodes = g.num_nodes();
    basis.modes.resize(K);
    basis.eigenvalues.resize(K);
    basis.values.assign(K, std::vector<double>(nodes));
    basis.grads.assign(K, std::vector<double>(nodes * dim));

    for (std::size_t j = 0; j < K; ++j) {
        std::array<int, 3> k{1, 1, 1};
        std::size_t rem = j;
        for (int b = dim - 1; b >= 0; --b) {
            k[b] = static_cast<int>(rem % K1) + 1;
            rem /= K1;
        }
        basis.modes[j] = k;
        double lam = 0.0;
        for (int b = 0; b < dim; ++b) lam += static_cast<double>(k[b]) * k[b];
        basis.eigenvalues[j] = kPi * kPi * lam;

        std::array<int, 3> q{0, 0, 0};
        for (std::size_t idx = 0; idx < nodes; ++idx) {
            double val = 1.0;
            for (int b = 0; b < dim; ++b)
                val *= sin_t[(k[b] - 1) * static_cast<std::size_t>(Q) + q[b]];
            basis.values[j][idx] = val;
            for (int b = 0; b < dim; ++b) {
                double gv = 1.0;
                for (int e = 0; e < dim; ++e) {
                    const auto& tab = e == b ? cos_t : sin_t;
                    gv *= tab[(k[e] - 1) * static_cast<std::size_t>(Q) + q[e]];
                }
                basis.grads[j][idx * dim + b] = gv;
            }
            for (int b = dim - 1; b >= 0; --b) {
                if (++q[b] < Q) break;
                q[b] = 0;
            }
        }
    }
    return basis;
}

GalerkinSystem make_system(SpectralBasis basis, const SimParams& params) {
    params.validate();
    if (!(params.mu > 0.0))
        throw std::invalid_argument("make_system: the spectral path requires mu > 0");

    GalerkinSystem sys;
    sys.basis = std::move(basis);
    sys.params = params;
    const SpectralBasis& bs = sys.basis;
    const Grid& g = bs.quad_grid;
    const std::size_t K = static_cast<std::size_t>(bs.num_modes());
    const std::size_t nodes = g.num_nodes();
    const int d = g.dim;

    double radius = mollifier_radius(params.mu, g.h);
    MollifierKernel kernel = make_mollifier(g, radius);
    sys.mollified.resize(K);
    for (std::size_t j = 0; j < K; ++j) {
        VectorField tmp(g);
        tmp.components.assign(1, bs.values[j]);
        sys.mollified[j] = mollify_with(tmp, kernel).components[0];
    }

    if (params.delta != 0.0) {
        const double hd = std::pow(g.h, d);
        sys.B.assign(d, std::vector<double>(K * K * K, 0.0));
        std::vector<double> prod(nodes);
        for (int b = 0; b < d; ++b)
            for (std::size_t i = 0; i < K; ++i)
                for (std::size_t l = 0; l < K; ++l) {
                    for (std::size_t q = 0; q < nodes; ++q)
                        prod[q] = sys.mollified[i][q] * bs.grads[l][q * d + b];
                    for (std::size_t j = 0; j < K; ++j) {
                        double acc = 0.0;
                        for (std::size_t q = 0; q < nodes; ++q)
                            acc += prod[q] * bs.values[j][q];
                        sys.B[b][(j * K + i) * K + l] = acc * hd;
                    }
                }
    }
    return sys;
}

double GalerkinState::norm_sq() const {
    double s = 0.0;
    for (const auto& comp : coeffs)
        for (double c : comp) s += c * c;
    return s;
}

GalerkinState project(const VectorField& u0, const SpectralBasis& basis) {
    if (!(u0.grid == basis.quad_grid))
        throw std::invalid_argument("project: field grid must match the collocation grid");
    const std::size_t K = static_cast<std::size_t>(basis.num_modes());
    const std::size_t nodes = basis.quad_grid.num_nodes();
    const double hd = std::pow(basis.quad_grid.h, basis.quad_grid.dim);
    GalerkinState st;
    st.coeffs.assign(u0.ncomp(), std::vector<double>(K, 0.0));
    for (int m = 0; m < u0.ncomp(); ++m)
        for (std::size_t j = 0; j < K; ++j) {
            double acc = 0.0;
            for (std::size_t q = 0; q < nodes; ++q)
                acc += u0.components[m][q] * basis.values[j][q];
            st.coeffs[m][j] = acc * hd;
        }
    return st;
}

GalerkinState project(const InitialCondition& spec, const SpectralBasis& basis,
                      int ncomp) {
    VectorField sampled = make_initial(spec, basis.quad_grid, ncomp);
    return project(sampled, basis);
}

std::vector<std::vector<double>> galerkin_rhs(const GalerkinSystem& sys,
                                              const std::vector<std::vector<double>>& c) {
    const SpectralBasis& bs = sys.basis;
    const Grid& g = bs.quad_grid;
    const std::size_t K = static_cast<std::size_t>(bs.num_modes());
    const std::size_t nodes = g.num_nodes();
    const int d = g.dim;
    const int C = static_cast<int>(c.size());
    const double hd = std::pow(g.h, d);
    const SimParams& pr = sys.params;
    if (pr.delta != 0.0 && C != d)
        throw std::invalid_argument("galerkin_rhs: convection needs one component per axis");

    std::vector<std::vector<double>> dc(C, std::vector<double>(K, 0.0));

    // collocation values of the gradient and the nonlinear coefficient
    std::vector<std::vector<double>> grad(C, std::vector<double>(nodes * d, 0.0));
    for (int m = 0; m < C; ++m)
        for (std::size_t j = 0; j < K; ++j) {
            double cj = c[m][j];
            if (cj == 0.0) continue;
            const double* gj = bs.grads[j].data();
            double* gm = grad[m].data();
            for (std::size_t e = 0; e < nodes * static_cast<std::size_t>(d); ++e)
                gm[e] += cj * gj[e];
        }
    std::vector<double> w(nodes, 1.0);
    if (pr.p != 2.0)
        for (std::size_t q = 0; q < nodes; ++q) {
            double mag = 0.0;
            for (int m = 0; m < C; ++m)
                for (int b = 0; b < d; ++b) {
                    double gv = grad[m][q * d + b];
                    mag += gv * gv;
                }
            w[q] = std::pow(pr.mu + mag, 0.5 * (pr.p - 2.0));
        }

    std::vector<double> wg(nodes * d);
    for (int m = 0; m < C; ++m) {
        for (std::size_t q = 0; q < nodes; ++q)
            for (int b = 0; b < d; ++b) wg[q * d + b] = w[q] * grad[m][q * d + b];
        for (std::size_t j = 0; j < K; ++j) {
            double acc = 0.0;
            const double* gj = bs.grads[j].data();
            for (std::size_t e = 0; e < nodes * static_cast<std::size_t>(d); ++e)
                acc += wg[e] * gj[e];
            dc[m][j] = -acc * hd - pr.nu * bs.eigenvalues[j] * c[m][j];
        }
    }

    if (pr.delta != 0.0) {
        for (int m = 0; m < C; ++m)
            for (std::size_t j = 0; j < K; ++j) {
                double acc = 0.0;
                for (int b = 0; b < d; ++b) {
                    const double* Bb = sys.B[b].data() + j * K * K;
                    for (std::size_t i = 0; i < K; ++i) {
                        double ci = c[b][i];
                        if (ci == 0.0) continue;
                        const double* row = Bb + i * K;
                        double inner_acc = 0.0;
                        for (std::size_t l = 0; l < K; ++l)
                            inner_acc += row[l] * c[m][l];
                        acc += ci * inner_acc;
                    }
                }
                dc[m][j] -= pr.delta * acc;
            }
    }
    return dc;
}

namespace {

// nu ||grad v||^2 + weighted flux^2 + delta (J(v).grad v, v) at one coefficient state
double energy_integrand_at(const GalerkinSystem& sys,
                           const std::vector<std::vector<double>>& c) {
    const SpectralBasis& bs = sys.basis;
    const Grid& g = bs.quad_grid;
    const std::size_t K = static_cast<std::size_t>(bs.num_modes());
    const std::size_t nodes = g.num_nodes();
    const int d = g.dim;
    const int C = static_cast<int>(c.size());
    const double hd = std::pow(g.h, d);
    const SimParams& pr = sys.params;

    double acc = 0.0;
    if (pr.nu > 0.0)
        for (int m = 0; m < C; ++m)
            for (std::size_t j = 0; j < K; ++j)
                acc += pr.nu * bs.eigenvalues[j] * c[m][j] * c[m][j];

    std::vector<std::vector<double>> grad(C, std::vector<double>(nodes * d, 0.0));
    for (int m = 0; m < C; ++m)
        for (std::size_t j = 0; j < K; ++j) {
            double cj = c[m][j];
            if (cj == 0.0) continue;
            for (std::size_t e = 0; e < nodes * static_cast<std::size_t>(d); ++e)
                grad[m][e] += cj * bs.grads[j][e];
        }
    double flux = 0.0;
    for (std::size_t q = 0; q < nodes; ++q) {
        double mag = 0.0;
        for (int m = 0; m < C; ++m)
            for (int b = 0; b < d; ++b) {
                double gv = grad[m][q * d + b];
                mag += gv * gv;
            }
        flux += (pr.p == 2.0 ? 1.0 : std::pow(pr.mu + mag, 0.5 * (pr.p - 2.0))) * mag;
    }
    acc += flux * hd;

    if (pr.delta != 0.0) {
        std::vector<std::vector<double>> v(C, std::vector<double>(nodes, 0.0));
        std::vector<std::vector<double>> vel(C, std::vector<double>(nodes, 0.0));
        for (int m = 0; m < C; ++m)
            for (std::size_t j = 0; j < K; ++j) {
                double cj = c[m][j];
                if (cj == 0.0) continue;
                for (std::size_t q = 0; q < nodes; ++q) {
                    v[m][q] += cj * bs.values[j][q];
                    vel[m][q] += cj * sys.mollified[j][q];
                }
            }
        double conv = 0.0;
        for (std::size_t q = 0; q < nodes; ++q)
            for (int m = 0; m < C; ++m) {
                double adv = 0.0;
                for (int b = 0; b < d; ++b) adv += vel[b][q] * grad[m][q * d + b];
                conv += adv * v[m][q];
            }
        acc += pr.delta * conv * hd;
    }
    return acc;
}

void axpy(std::vector<std::vector<double>>& y, double a,
          const std::vector<std::vector<double>>& x) {
    for (std::size_t m = 0; m < y.size(); ++m)
        for (std::size_t j = 0; j < y[m].size(); ++j) y[m][j] += a * x[m][j];
}

// composite Simpson, 3/8 block absorbing an odd interval count; uniform spacing
double simpson(const std::vector<double>& t, const std::vector<double>& f) {
    const std::size_t n = t.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
    std::size_t intervals = n - 1;
    double acc = 0.0;
    std::size_t k = 0;
    if (intervals % 2 == 1) {
        if (intervals >= 3) {
            double h = (t[3] - t[0]) / 3.0;
            acc += 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
            k = 3;
        } else {
            return 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
        }
    }
    for (; k + 2 <= n - 1; k += 2) {
        double h = 0.5 * (t[k + 2] - t[k]);
        acc += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
    }
    return acc;
}

}  // namespace

GalerkinTrajectory integrate(const GalerkinSystem& sys, const GalerkinState& c0,
                             double dt, double t_end) {
    if (!(dt > 0.0) || !(t_end >= 0.0))
        throw std::invalid_argument("integrate: dt must be > 0 and t_end >= 0");
    GalerkinTrajectory traj;
    traj.states.push_back(c0);
    traj.states.front().time = 0.0;
    traj.energy_integrand.push_back(energy_integrand_at(sys, c0.coeffs));

    const double c0_norm = std::sqrt(c0.norm_sq());
    const double guard = 1e6 * std::max(c0_norm, 1e-300);

    auto c = c0.coeffs;
    double t = 0.0;
    while (t < t_end - 1e-15) {
        double step = std::min(dt, t_end - t);
        auto k1 = galerkin_rhs(sys, c);
        auto s = c;
        axpy(s, 0.5 * step, k1);
        auto k2 = galerkin_rhs(sys, s);
        s = c;
        axpy(s, 0.5 * step, k2);
        auto k3 = galerkin_rhs(sys, s);
        s = c;
        axpy(s, step, k3);
        auto k4 = galerkin_rhs(sys, s);
        axpy(c, step / 6.0, k1);
        axpy(c, step / 3.0, k2);
        axpy(c, step / 3.0, k3);
        axpy(c, step / 6.0, k4);
        t += step;

        GalerkinState st;
        st.coeffs = c;
        st.time = t;
        double nrm = std::sqrt(st.norm_sq());
        traj.states.push_back(std::move(st));
        traj.energy_integrand.push_back(energy_integrand_at(sys, c));
        if (nrm > guard || !std::isfinite(nrm)) {
            traj.aborted = true;
            traj.abort_reason = "coefficient blow-up guard tripped";
            break;
        }
    }

    std::vector<double> times;
    times.reserve(traj.states.size());
    for (const auto& st : traj.states) times.push_back(st.time);
    double half_delta = 0.5 * (traj.states.back().norm_sq() - traj.states.front().norm_sq());
    traj.identity_residual =
        std::abs(half_delta + simpson(times, traj.energy_integrand));
    return traj;
}

VectorField reconstruct(const SpectralBasis& basis,
                        const std::vector<std::vector<double>>& coeffs,
                        const Grid& grid) {
    const int d = basis.dim;
    if (grid.dim != d)
        throw std::invalid_argument("reconstruct: grid dimension mismatch");
    const std::size_t K = static_cast<std::size_t>(basis.num_modes());
    const std::size_t nodes = grid.num_nodes();

    // per-axis sine tables at the target nodes
    const int K1 = basis.modes_per_axis;
    std::vector<double> sin_t(static_cast<std::size_t>(K1) * grid.n);
    for (int k = 1; k <= K1; ++k)
        for (int q = 0; q < grid.n; ++q)
            sin_t[(k - 1) * static_cast<std::size_t>(grid.n) + q] =
                std::sqrt(2.0) * std::sin(k * kPi * grid.coord(q));

    VectorField out(grid);
    out.components.assign(coeffs.size(), std::vector<double>(nodes, 0.0));
    std::array<int, 3> q{0, 0, 0};
    for (std::size_t idx = 0; idx < nodes; ++idx) {
        for (std::size_t j = 0; j < K; ++j) {
            double val = 1.0;
            for (int b = 0; b < d; ++b)
                val *= sin_t[(basis.modes[j][b] - 1) * static_cast<std::size_t>(grid.n) +
                             q[b]];
            for (std::size_t m = 0; m < coeffs.size(); ++m)
                out.components[m][idx] += coeffs[m][j] * val;
        }
        for (int b = d - 1; b >= 0; --b) {
            if (++q[b] < grid.n) break;
            q[b] = 0;
        }
    }
    return out;
}

}  // namespace plap
