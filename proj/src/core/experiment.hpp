#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"

namespace plap {

/// One orchestrated job's outcome; the artifact set lives under `directory`.
struct JobResult {
    std::string name;
    std::string directory;
    bool ok = false;
    std::string message;
};

struct ExperimentResult {
    std::vector<JobResult> jobs;
    std::string summary_path;
    bool all_ok() const;
};

/// Execute the configured experiment, writing per-job CSV series, binary field
/// snapshots, an effective-config echo, and a summary file under cfg.output_dir.
/// Failed jobs keep their partial outputs plus an ERROR marker file. Independent
/// jobs run in parallel, capped by the PLAP_THREADS environment variable.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Binary field snapshot: magic "PLAP1", uint32 dim, n, components, then each
/// component's nodal doubles row-major, little-endian.
void write_snapshot(const std::string& path, const VectorField& field);
VectorField read_snapshot(const std::string& path);

/// One row per diagnostics record with the frozen column order:
/// time, l2, linf, grad_l2, grad_lp, weighted_flux, energy_residual, overshoot,
/// B_mu, phi_weight.
void write_series_csv(const std::string& path, const Trajectory& traj);

}  // namespace plap
