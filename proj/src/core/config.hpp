#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/fields.hpp"
#include "core/stepper.hpp"

namespace plap {

enum class ExperimentKind {
    run,
    ladder,
    extinction_sweep,
    dual_check,
    galerkin_compare,
    gamma,
};

std::string to_string(ExperimentKind kind);

/// Everything a job needs, parsed from the line-based config format. A run is fully
/// reproducible from (config, seed).
struct ExperimentConfig {
    SimParams params;
    SchemeConfig scheme;
    InitialCondition initial;
    int ncomp = 0;  // 0 = one component per spatial axis

    ExperimentKind kind = ExperimentKind::run;
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    std::vector<double> nu_values;     // ladder stage 1
    std::vector<double> mu_values;     // ladder stage 2
    std::vector<double> delta_values;  // extinction sweep axis
    std::vector<double> eta_values;    // dual-check mollification radii

    double horizon = 0.0;              // dual-check pairing time; 0 = t_end
    double nu_dual = -1.0;             // -1 = matched to params.nu
    double phi_rho = 0.2;              // dual seed bump radius
    int dual_trials = 0;               // extra randomized L1-bound trials

    int modes = 16;                    // spectral comparison
    int quad_points = 0;               // 0 = module default
    double rk_dt = 1e-4;

    int gamma_seeds = 4;
    double extinction_threshold = 1e-10;

    int effective_ncomp() const { return ncomp > 0 ? ncomp : params.dim; }
    void validate() const;
    /// Re-parseable echo of every effective setting.
    std::string echo() const;
};

/// Strict parser for `key = value` lines under `[section]` headers; `#` starts a
/// comment. Unknown sections or keys, duplicate keys, and malformed values all
/// throw std::runtime_error naming the key and line number(s).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace plap
