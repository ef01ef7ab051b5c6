#include "core/experiment.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "core/diagnostics.hpp"
#include "core/dual.hpp"
#include "core/galerkin.hpp"
#include "core/operators.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian");

namespace plap {

namespace fs = std::filesystem;

bool ExperimentResult::all_ok() const {
    for (const auto& j : jobs)
        if (!j.ok) return false;
    return !jobs.empty();
}

void write_snapshot(const std::string& path, const VectorField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path);
    out.write("PLAP1", 5);
    std::uint32_t hdr[3] = {static_cast<std::uint32_t>(field.grid.dim),
                            static_cast<std::uint32_t>(field.grid.n),
                            static_cast<std::uint32_t>(field.ncomp())};
    out.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    for (const auto& comp : field.components)
        out.write(reinterpret_cast<const char*>(comp.data()),
                  static_cast<std::streamsize>(comp.size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write on snapshot: " + path);
}

VectorField read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    char magic[5];
    in.read(magic, 5);
    if (!in || std::string(magic, 5) != "PLAP1")
        throw std::runtime_error("bad snapshot magic in " + path);
    std::uint32_t hdr[3];
    in.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    if (!in) throw std::runtime_error("truncated snapshot header in " + path);
    Grid g(static_cast<int>(hdr[0]), static_cast<int>(hdr[1]));
    VectorField f(g);
    f.components.assign(hdr[2], std::vector<double>(g.num_nodes()));
    for (auto& comp : f.components) {
        in.read(reinterpret_cast<char*>(comp.data()),
                static_cast<std::streamsize>(comp.size() * sizeof(double)));
        if (!in) throw std::runtime_error("truncated snapshot payload in " + path);
    }
    return f;
}

void write_series_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open series for writing: " + path);
    out << "time,l2,linf,grad_l2,grad_lp,weighted_flux,energy_residual,overshoot,"
           "B_mu,phi_weight\n";
    out.precision(17);
    for (const auto& d : traj.diagnostics)
        out << d.time << ',' << d.l2_norm << ',' << d.linf_norm << ',' << d.grad_l2
            << ',' << d.grad_lp << ',' << d.weighted_flux << ',' << d.energy_residual
            << ',' << d.overshoot << ',' << d.b_mu << ',' << d.phi_weight << '\n';
    if (!out) throw std::runtime_error("short write on series: " + path);
}

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
}

unsigned thread_cap() {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PLAP_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) cap = static_cast<unsigned>(v);
    }
    return cap;
}

void parallel_jobs(std::vector<std::function<void()>>& jobs) {
    unsigned cap = std::min<std::size_t>(thread_cap(), jobs.size());
    if (cap <= 1) {
        for (auto& j : jobs) j();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(cap);
    for (unsigned t = 0; t < cap; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < jobs.size();
                 i = next.fetch_add(1))
                jobs[i]();
        });
    for (auto& th : pool) th.join();
}

/// Run one solver job into its own directory; partial outputs survive failures.
Trajectory solve_job(JobResult& jr, const SimParams& params, const SchemeConfig& scheme,
                     const VectorField& u0) {
    fs::create_directories(jr.directory);
    write_snapshot(jr.directory + "/initial.bin", u0);
    Trajectory traj = run(u0, params, scheme);
    write_series_csv(jr.directory + "/series.csv", traj);
    write_snapshot(jr.directory + "/final.bin", traj.final_state());
    if (traj.aborted) {
        jr.ok = false;
        jr.message = traj.abort_reason;
        write_text(jr.directory + "/ERROR", traj.abort_reason + "\n");
    } else {
        jr.ok = true;
    }
    return traj;
}

std::string format_optional(const std::optional<double>& v) {
    if (!v) return "undefined";
    std::ostringstream os;
    os.precision(12);
    os << *v;
    return os.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    write_text(cfg.output_dir + "/config.echo", cfg.echo());

    ExperimentResult result;
    std::ostringstream summary;
    summary.precision(12);
    summary << "experiment: " << to_string(cfg.kind) << "\n";

    Grid grid(cfg.params.dim, cfg.params.n_cells);
    VectorField u0 = make_initial(cfg.initial, grid, cfg.effective_ncomp());

    auto guarded = [&](JobResult& jr, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            jr.ok = false;
            jr.message = e.what();
            fs::create_directories(jr.directory);
            write_text(jr.directory + "/ERROR", std::string(e.what()) + "\n");
        }
    };

    switch (cfg.kind) {
        case ExperimentKind::run: {
            JobResult jr{"run", cfg.output_dir + "/run", false, ""};
            guarded(jr, [&] {
                Trajectory traj = solve_job(jr, cfg.params, cfg.scheme, u0);
                summary << "final_time = " << traj.diagnostics.back().time << "\n"
                        << "final_l2 = " << traj.diagnostics.back().l2_norm << "\n"
                        << "final_linf = " << traj.diagnostics.back().linf_norm << "\n"
                        << "max_overshoot = " << linf_bound_check(traj).max_overshoot
                        << "\n"
                        << "extinction_time = "
                        << format_optional(traj.extinction_time) << "\n";
            });
            result.jobs.push_back(jr);
            break;
        }
        case ExperimentKind::ladder: {
            struct Stage {
                const char* tag;
                const std::vector<double>& values;
            };
            std::vector<double> nu_vals = cfg.nu_values;
            std::vector<double> mu_vals = cfg.mu_values;
            Stage stages[2] = {{"nu", nu_vals}, {"mu", mu_vals}};
            for (const Stage& stage : stages) {
                if (stage.values.empty()) continue;
                std::vector<JobResult> jrs(stage.values.size());
                std::vector<Trajectory> trajs(stage.values.size());
                std::vector<std::function<void()>> jobs;
                for (std::size_t i = 0; i < stage.values.size(); ++i) {
                    std::ostringstream name;
                    name << stage.tag << "_" << stage.values[i];
                    jrs[i] = {name.str(), cfg.output_dir + "/" + name.str(), false, ""};
                    jobs.push_back([&, i, &stage = stage] {
                        guarded(jrs[i], [&] {
                            SimParams p = cfg.params;
                            if (std::string(stage.tag) == "nu") p.nu = stage.values[i];
                            else {
                                p.mu = stage.values[i];
                                if (!nu_vals.empty()) p.nu = nu_vals.back();
                            }
                            trajs[i] = solve_job(jrs[i], p, cfg.scheme, u0);
                        });
                    });
                }
                parallel_jobs(jobs);
                summary << "[" << stage.tag << " ladder]\n";
                for (std::size_t i = 0; i + 1 < stage.values.size(); ++i) {
                    if (!jrs[i].ok || !jrs[i + 1].ok) continue;
                    double dist = trajectory_l2_distance(trajs[i], trajs[i + 1]);
                    summary << "distance " << stage.tag << "=" << stage.values[i]
                            << " -> " << stage.values[i + 1] << " : " << dist << "\n";
                }
                for (auto& jr : jrs) result.jobs.push_back(std::move(jr));
            }
            break;
        }
        case ExperimentKind::extinction_sweep: {
            double gamma_h =
                gamma_estimate(grid, cfg.params.p, cfg.gamma_seeds, cfg.seed);
            std::vector<JobResult> jrs(cfg.delta_values.size());
            std::vector<ExtinctionReport> reps(cfg.delta_values.size());
            std::vector<std::function<void()>> jobs;
            for (std::size_t i = 0; i < cfg.delta_values.size(); ++i) {
                std::ostringstream name;
                name << "delta_" << cfg.delta_values[i];
                jrs[i] = {name.str(), cfg.output_dir + "/" + name.str(), false, ""};
                jobs.push_back([&, i] {
                    guarded(jrs[i], [&] {
                        SimParams p = cfg.params;
                        p.delta = cfg.delta_values[i];
                        Trajectory traj = solve_job(jrs[i], p, cfg.scheme, u0);
                        reps[i] = extinction_report(traj, gamma_h,
                                                    cfg.extinction_threshold);
                    });
                });
            }
            parallel_jobs(jobs);
            std::ostringstream csv;
            csv.precision(12);
            csv << "delta,hypothesis_lhs,gamma_h,t_star_bound,measured\n";
            summary << "gamma_h = " << gamma_h << "\n";
            for (std::size_t i = 0; i < cfg.delta_values.size(); ++i) {
                if (!jrs[i].ok) continue;
                csv << cfg.delta_values[i] << ',' << reps[i].hypothesis_lhs << ','
                    << gamma_h << ',' << format_optional(reps[i].t_star_bound) << ','
                    << format_optional(reps[i].measured_extinction) << '\n';
                summary << "delta=" << cfg.delta_values[i]
                        << " lhs=" << reps[i].hypothesis_lhs
                        << " t_star=" << format_optional(reps[i].t_star_bound)
                        << " measured=" << format_optional(reps[i].measured_extinction)
                        << "\n";
            }
            write_text(cfg.output_dir + "/sweep.csv", csv.str());
            for (auto& jr : jrs) result.jobs.push_back(std::move(jr));
            break;
        }
        case ExperimentKind::dual_check: {
            JobResult jr{"dual_check", cfg.output_dir + "/dual_check", false, ""};
            guarded(jr, [&] {
                SchemeConfig fwd_scheme = cfg.scheme;
                fwd_scheme.snapshot_stride = 1;  // coefficients need every step
                Trajectory traj = solve_job(jr, cfg.params, fwd_scheme, u0);
                if (!jr.ok) return;
                double horizon = cfg.horizon > 0.0 ? cfg.horizon : cfg.params.t_end;
                double nu_dual = cfg.nu_dual >= 0.0 ? cfg.nu_dual : cfg.params.nu;
                std::vector<double> center(grid.dim, 0.5);
                VectorField phi0 = dual_bump(grid, center, cfg.phi_rho);
                summary << "horizon = " << horizon << "\n";
                for (double eta : cfg.eta_values) {
                    double res = duality_residual(traj, horizon, phi0, eta, nu_dual,
                                                  cfg.params.dt, cfg.scheme);
                    DualCoefficients coeffs = build_dual_coefficients(
                        traj, horizon, eta, cfg.params.mu, cfg.params.p);
                    DualRun dr =
                        dual_run(phi0, coeffs, nu_dual, cfg.params.dt, cfg.scheme);
                    summary << "eta=" << eta << " residual=" << res
                            << " sup_l1_ratio=" << dr.sup_l1 / dr.phi0_l1 << "\n";
                }
                std::mt19937_64 rng(cfg.seed);
                std::uniform_real_distribution<double> pos(0.35, 0.65);
                for (int trial = 0; trial < cfg.dual_trials; ++trial) {
                    std::vector<double> c(grid.dim);
                    for (double& x : c) x = pos(rng);
                    VectorField psi0 = dual_bump(grid, c, cfg.phi_rho);
                    DualCoefficients coeffs = build_dual_coefficients(
                        traj, horizon, cfg.eta_values.front(), cfg.params.mu,
                        cfg.params.p);
                    DualRun dr =
                        dual_run(psi0, coeffs, nu_dual, cfg.params.dt, cfg.scheme);
                    summary << "trial=" << trial
                            << " sup_l1_ratio=" << dr.sup_l1 / dr.phi0_l1 << "\n";
                }
            });
            result.jobs.push_back(jr);
            break;
        }
        case ExperimentKind::galerkin_compare: {
            JobResult jr{"galerkin", cfg.output_dir + "/galerkin", false, ""};
            guarded(jr, [&] {
                Trajectory traj = solve_job(jr, cfg.params, cfg.scheme, u0);
                if (!jr.ok) return;
                SpectralBasis basis =
                    build_basis(cfg.params.dim, cfg.modes, cfg.quad_points);
                GalerkinSystem sys = make_system(std::move(basis), cfg.params);
                GalerkinState c0 =
                    project(cfg.initial, sys.basis, cfg.effective_ncomp());
                GalerkinTrajectory spec =
                    integrate(sys, c0, cfg.rk_dt, cfg.params.t_end);
                if (spec.aborted)
                    throw std::runtime_error("spectral run aborted: " +
                                             spec.abort_reason);
                VectorField recon =
                    reconstruct(sys.basis, spec.final_state().coeffs, grid);
                write_snapshot(jr.directory + "/spectral_final.bin", recon);
                VectorField diff = traj.final_state() - recon;
                double dist = lp_norm(diff, 2.0);
                double u0_l2 = lp_norm(u0, 2.0);
                summary << "l2_distance = " << dist << "\n"
                        << "relative = " << (u0_l2 > 0 ? dist / u0_l2 : 0.0) << "\n"
                        << "identity_residual = " << spec.identity_residual << "\n";
            });
            result.jobs.push_back(jr);
            break;
        }
        case ExperimentKind::gamma: {
            JobResult jr{"gamma", cfg.output_dir + "/gamma", false, ""};
            guarded(jr, [&] {
                fs::create_directories(jr.directory);
                double g = gamma_estimate(grid, cfg.params.p, cfg.gamma_seeds, cfg.seed);
                summary << "gamma_h = " << g << "\n";
                write_text(jr.directory + "/gamma.txt", summary.str());
                jr.ok = true;
            });
            result.jobs.push_back(jr);
            break;
        }
    }

    for (const auto& jr : result.jobs)
        summary << "job " << jr.name << " : " << (jr.ok ? "ok" : "FAILED " + jr.message)
                << "\n";
    result.summary_path = cfg.output_dir + "/summary.txt";
    write_text(result.summary_path, summary.str());
    if (!result.all_ok()) write_text(cfg.output_dir + "/ERROR", "one or more jobs failed\n");
    return result;
}

}  // namespace plap
