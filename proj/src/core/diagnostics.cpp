#include "core/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "core/operators.hpp"

namespace plap {

double energy_residual(const Trajectory& traj, std::size_t n, SchemeConfig::Mode mode) {
    if (n + 1 >= traj.states.size())
        throw std::invalid_argument("energy_residual: need snapshots n and n+1");
    const VectorField& v_old = traj.states[n];
    const VectorField& v_new = traj.states[n + 1];
    SimParams params = traj.params;
    params.dt = traj.times[n + 1] - traj.times[n];

    GradientField g_old = gradient(v_old);
    DiffusionCoefficient a_old = diffusion_coefficient(g_old, params.mu, params.p);
    std::vector<double> ones(v_old.grid.num_nodes(), 1.0);

    double e_old = inner(v_old, v_old), e_new = inner(v_new, v_new);
    const VectorField& pairing = mode == SchemeConfig::Mode::semi_implicit ? v_new : v_old;
    double res = (e_new - e_old) / (2.0 * params.dt);
    if (params.nu > 0.0) res += params.nu * flux_energy(ones, pairing, pairing);
    res += flux_energy(a_old.values, pairing, pairing);
    if (params.delta != 0.0) {
        VectorField vel = mollify_space(v_old, mollifier_radius(params.mu, v_old.grid.h));
        res += params.delta * inner(convection(vel, v_old), pairing);
    }
    return std::abs(res);
}

namespace {

struct FaceIter {
    // scalar field face loops on the interior grid with zero ghosts
    const Grid& g;
    std::size_t stride[3];
    explicit FaceIter(const Grid& grid) : g(grid) {
        std::size_t s = 1;
        for (int k = g.dim - 1; k >= 0; --k) {
            stride[k] = s;
            s *= static_cast<std::size_t>(g.n);
        }
    }
    int coord(std::size_t idx, int axis) const {
        return static_cast<int>((idx / stride[axis]) % g.n);
    }
};

constexpr double kGradFloor = 1e-30;

// E(u) = h^d sum_faces |Du|^p, with Du the face difference / h
double face_grad_energy(const Grid& g, const std::vector<double>& u, double p) {
    FaceIter fi(g);
    const double hd = std::pow(g.h, g.dim);
    const double inv_h = 1.0 / g.h;
    double acc = 0.0;
    for (std::size_t idx = 0; idx < u.size(); ++idx)
        for (int b = 0; b < g.dim; ++b) {
            int c = fi.coord(idx, b);
            double du = (c + 1 < g.n ? u[idx + fi.stride[b]] : 0.0) - u[idx];
            acc += std::pow(du * du * inv_h * inv_h + 0.0, 0.5 * p);
            if (c == 0) acc += std::pow(u[idx] * u[idx] * inv_h * inv_h, 0.5 * p);
        }
    return acc * hd;
}

void face_grad_energy_gradient(const Grid& g, const std::vector<double>& u, double p,
                               std::vector<double>& out) {
    FaceIter fi(g);
    const double hd = std::pow(g.h, g.dim);
    const double inv_h = 1.0 / g.h;
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t idx = 0; idx < u.size(); ++idx)
        for (int b = 0; b < g.dim; ++b) {
            int c = fi.coord(idx, b);
            double du = ((c + 1 < g.n ? u[idx + fi.stride[b]] : 0.0) - u[idx]) * inv_h;
            double w = p * std::pow(std::max(du * du, kGradFloor), 0.5 * (p - 2.0)) * du *
                       inv_h * hd;
            out[idx] -= w;
            if (c + 1 < g.n) out[idx + fi.stride[b]] += w;
            if (c == 0) {
                double du0 = u[idx] * inv_h;  // low boundary face
                out[idx] += p * std::pow(std::max(du0 * du0, kGradFloor), 0.5 * (p - 2.0)) *
                            du0 * inv_h * hd;
            }
        }
}

double l2_of(const Grid& g, const std::vector<double>& u) {
    double s = 0.0;
    for (double x : u) s += x * x;
    return std::sqrt(s * std::pow(g.h, g.dim));
}

}  // namespace

double gamma_estimate(const Grid& grid, double p, int seeds, std::uint64_t rng_seed) {
    if (!(p > 1.5 && p <= 2.0))
        throw std::invalid_argument("gamma_estimate: p must lie in (3/2, 2]");
    if (seeds < 1) seeds = 1;
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    const std::size_t m = grid.num_nodes();
    double best = std::numeric_limits<double>::infinity();

    for (int s = 0; s < seeds; ++s) {
        std::vector<double> u(m);
        for (double& x : u) x = unif(rng);
        double nrm = l2_of(grid, u);
        for (double& x : u) x /= nrm;

        std::vector<double> grad(m), trial(m);
        double E = face_grad_energy(grid, u, p);
        double rayleigh = E;  // ||u||_2 = 1 so R = E
        double step = 0.1;
        for (int it = 0; it < 5000 && step > 1e-14; ++it) {
            face_grad_energy_gradient(grid, u, p, grad);
            // project out the radial direction, then take a descent step on the sphere
            double hd = std::pow(grid.h, grid.dim);
            double gu = 0.0, gg = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                gu += grad[i] * u[i];
                gg += grad[i] * grad[i];
            }
            gu *= hd;
            gg *= hd;
            // dR/du on the unit sphere: grad E - p*E*u
            double tang_sq = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                trial[i] = grad[i] - p * rayleigh * u[i];
                tang_sq += trial[i] * trial[i];
            }
            tang_sq *= hd;
            if (tang_sq < 1e-24 * (1.0 + rayleigh * rayleigh)) break;
            double scale = step / std::sqrt(tang_sq);
            bool improved = false;
            for (int bt = 0; bt < 30; ++bt) {
                std::vector<double> cand(m);
                for (std::size_t i = 0; i < m; ++i) cand[i] = u[i] - scale * trial[i];
                double cn = l2_of(grid, cand);
                for (double& x : cand) x /= cn;
                double Ec = face_grad_energy(grid, cand, p);
                if (Ec < rayleigh) {
                    u.swap(cand);
                    rayleigh = Ec;
                    improved = true;
                    step = std::min(step * 1.3, 1.0);
                    break;
                }
                scale *= 0.5;
                step *= 0.5;
            }
            if (!improved) break;
        }
        best = std::min(best, rayleigh);
    }
    return best;
}

double extinction_hypothesis_lhs(double u0_l2, double u0_linf, double p, double delta) {
    if (u0_l2 <= 0.0 || u0_linf <= 0.0) return 0.0;
    return std::abs(delta) * std::pow(u0_linf, 2.0 / (p - 1.0)) *
           std::pow(u0_l2, 2.0 - p);
}

std::optional<double> t_star_bound(double u0_l2, double u0_linf, double p, double delta,
                                   double gamma) {
    if (p >= 2.0) return std::nullopt;  // no finite-time extinction at p = 2
    double lhs = extinction_hypothesis_lhs(u0_l2, u0_linf, p, delta);
    if (lhs >= gamma) return std::nullopt;
    double p_conj = p / (p - 1.0);
    return p_conj * std::pow(u0_l2, 2.0 - p) / ((gamma - lhs) * (2.0 - p));
}

std::optional<double> extinction_time(const Trajectory& traj, double threshold) {
    for (const auto& d : traj.diagnostics)
        if (d.l2_norm <= threshold) return d.time;
    return std::nullopt;
}

ExtinctionReport extinction_report(const Trajectory& traj, double gamma,
                                   double threshold) {
    ExtinctionReport rep;
    rep.gamma = gamma;
    const auto& d0 = traj.diagnostics.front();
    rep.hypothesis_lhs = extinction_hypothesis_lhs(d0.l2_norm, d0.linf_norm,
                                                   traj.params.p, traj.params.delta);
    rep.t_star_bound = t_star_bound(d0.l2_norm, d0.linf_norm, traj.params.p,
                                    traj.params.delta, gamma);
    rep.measured_extinction = extinction_time(traj, threshold);
    // last time before which the L2 norm ever increased
    double monotone_from = 0.0;
    for (std::size_t k = 1; k < traj.diagnostics.size(); ++k)
        if (traj.diagnostics[k].l2_norm > traj.diagnostics[k - 1].l2_norm)
            monotone_from = traj.diagnostics[k].time;
    rep.monotone_from = monotone_from;
    return rep;
}

EnvelopeViolation ode_envelope_check(const Trajectory& traj, double p, double delta,
                                     double gamma, double u0_linf) {
    EnvelopeViolation out;
    const double p_conj = p / (p - 1.0);
    const auto& diag = traj.diagnostics;
    double phi0 = diag.front().l2_norm;
    double scale = (gamma / p_conj) * std::pow(std::max(phi0, 1e-300), p - 1.0);
    for (std::size_t k = 0; k + 1 < diag.size(); ++k) {
        double dt = diag[k + 1].time - diag[k].time;
        if (dt <= 0.0) continue;
        double phi = diag[k].l2_norm;
        if (phi <= 0.0) continue;
        double lhs = (diag[k + 1].l2_norm - phi) / dt;
        double rhs = (1.0 / p_conj) * std::pow(phi, p - 1.0) *
                     (std::abs(delta) * std::pow(phi, 2.0 - p) *
                          std::pow(u0_linf, 2.0 / (p - 1.0)) -
                      gamma);
        out.max_violation = std::max(out.max_violation, lhs - rhs);
    }
    out.normalized = scale > 0.0 ? out.max_violation / scale : out.max_violation;
    return out;
}

namespace {

// all second differences of one component at one node, zero ghosts
void hessian_at(const Grid& g, const FaceIter& fi, const std::vector<double>& u,
                std::size_t idx, double* out /* dim*dim */) {
    const double inv_h2 = 1.0 / (g.h * g.h);
    auto val = [&](std::size_t base, int axis, int off) -> double {
        int c = fi.coord(base, axis) + off;
        if (c < 0 || c >= g.n) return 0.0;
        return u[base + static_cast<std::size_t>(off) * fi.stride[axis]];
    };
    auto val2 = [&](std::size_t base, int a1, int o1, int a2, int o2) -> double {
        int c1 = fi.coord(base, a1) + o1;
        int c2 = fi.coord(base, a2) + o2;
        if (c1 < 0 || c1 >= g.n || c2 < 0 || c2 >= g.n) return 0.0;
        return u[base + static_cast<std::size_t>(o1) * fi.stride[a1] +
                 static_cast<std::size_t>(o2) * fi.stride[a2]];
    };
    for (int b = 0; b < g.dim; ++b) {
        out[b * g.dim + b] = (val(idx, b, +1) - 2.0 * u[idx] + val(idx, b, -1)) * inv_h2;
        for (int c = b + 1; c < g.dim; ++c) {
            double mixed = (val2(idx, b, +1, c, +1) - val2(idx, b, +1, c, -1) -
                            val2(idx, b, -1, c, +1) + val2(idx, b, -1, c, -1)) *
                           0.25 * inv_h2;
            out[b * g.dim + c] = mixed;
            out[c * g.dim + b] = mixed;
        }
    }
}

}  // namespace

WeightedHessianReport weighted_hessian_ratio(const VectorField& v, double mu, double p,
                                    double zeta) {
    if (mu <= 0.0) throw std::invalid_argument("weighted_hessian_ratio: mu must be > 0");
    if (zeta <= 0.0) zeta = 0.5 * p * (2.0 * p - 3.0);
    double denom = p * (p - 1.0) * (p - 1.0) - zeta;
    if (denom <= 0.0)
        throw std::invalid_argument("weighted_hessian_ratio: zeta >= p(p-1)^2, C1 undefined");

    WeightedHessianReport rep;
    rep.c1 = std::sqrt(p / denom);

    const Grid& g = v.grid;
    FaceIter fi(g);
    GradientField grad = gradient(v);
    const double hd = std::pow(g.h, g.dim);
    const int d = g.dim;
    std::vector<double> hess(d * d);
    double lhs_acc = 0.0, lap_acc = 0.0;
    for (std::size_t idx = 0; idx < g.num_nodes(); ++idx) {
        double w = std::pow(mu + grad.magnitude_sq[idx], 0.5 * (p - 2.0));
        double h2 = 0.0, lap2 = 0.0;
        for (int c = 0; c < v.ncomp(); ++c) {
            hessian_at(g, fi, v.components[c], idx, hess.data());
            double tr = 0.0;
            for (int b = 0; b < d; ++b) {
                tr += hess[b * d + b];
                for (int e = 0; e < d; ++e) h2 += hess[b * d + e] * hess[b * d + e];
            }
            lap2 += tr * tr;
        }
        lhs_acc += w * h2;
        lap_acc += w * lap2;
    }
    rep.lhs = std::sqrt(lhs_acc * hd);
    rep.c1_term = rep.c1 * std::sqrt(lap_acc * hd);
    rep.residual = rep.lhs - rep.c1_term;
    double grad_lp = grad.lp_norm(p);
    double denom2 = std::sqrt(std::pow(grad_lp, p) + std::pow(mu, 0.5 * p));  // |Omega|=1
    rep.implied_c2 = denom2 > 0.0 ? rep.residual * zeta / denom2 : 0.0;
    return rep;
}

double gronwall_envelope(double C, const std::vector<double>& times,
                         const std::vector<double>& A, const std::vector<double>& B,
                         double theta) {
    if (!(theta >= 0.0 && theta < 1.0))
        throw std::invalid_argument("gronwall_envelope: theta must lie in [0,1)");
    const std::size_t n = times.size();
    if (A.size() != n || B.size() != n || n < 2)
        throw std::invalid_argument("gronwall_envelope: inconsistent sampling");
    const double om = 1.0 - theta;
    // cumulative integral of A from t0 to each sample
    std::vector<double> intA(n, 0.0);
    for (std::size_t k = 1; k < n; ++k)
        intA[k] = intA[k - 1] + 0.5 * (times[k] - times[k - 1]) * (A[k] + A[k - 1]);
    double term1 = std::pow(C, om) * std::exp(om * intA.back());
    double term2 = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        double f0 = B[k - 1] * std::exp(om * (intA.back() - intA[k - 1]));
        double f1 = B[k] * std::exp(om * (intA.back() - intA[k]));
        term2 += 0.5 * (times[k] - times[k - 1]) * (f0 + f1);
    }
    return std::pow(term1 + om * term2, 1.0 / om);
}

}  // namespace plap
