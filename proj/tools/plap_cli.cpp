// Command-line front end over the shared-library C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plap/plap.h"

namespace {

struct SubcommandSpec {
    const char* name;
    const char* help;
    std::vector<int> allowed_kinds;
};

int run_config(const std::string& path, const std::string& output_dir,
               const std::vector<int>& allowed_kinds) {
    char err[512] = {0};
    plap_config* cfg = nullptr;
    if (plap_config_parse_file(path.c_str(), &cfg, err, sizeof err) != PLAP_OK) {
        std::fprintf(stderr, "error: %s\n", err);
        return 2;
    }
    int kind = -1;
    plap_config_kind(cfg, &kind);
    bool kind_ok = false;
    for (int k : allowed_kinds) kind_ok = kind_ok || k == kind;
    if (!kind_ok) {
        std::fprintf(stderr,
                     "error: config experiment kind does not match this subcommand\n");
        plap_config_free(cfg);
        return 2;
    }
    if (!output_dir.empty() &&
        plap_config_set_output_dir(cfg, output_dir.c_str()) != PLAP_OK) {
        std::fprintf(stderr, "error: invalid output directory override\n");
        plap_config_free(cfg);
        return 2;
    }
    int all_ok = 0;
    plap_status st = plap_run_experiment(cfg, &all_ok, err, sizeof err);
    plap_config_free(cfg);
    if (st != PLAP_OK) {
        std::fprintf(stderr, "error: %s\n", err);
        return 1;
    }
    if (!all_ok) {
        std::fprintf(stderr, "one or more jobs failed: %s\n", err);
        return 1;
    }
    std::printf("ok\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-Laplacian solver and verification harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(plap_version()));

    const SubcommandSpec specs[] = {
        {"run", "single solver run from a config file", {PLAP_KIND_RUN}},
        {"sweep",
         "parameter sweep (ladder or extinction_sweep config)",
         {PLAP_KIND_LADDER, PLAP_KIND_EXTINCTION_SWEEP}},
        {"dual-check", "duality identity and L1 bound checks", {PLAP_KIND_DUAL_CHECK}},
        {"galerkin", "spectral cross-validation run", {PLAP_KIND_GALERKIN_COMPARE}},
        {"gamma", "discrete Sobolev constant estimate", {PLAP_KIND_GAMMA}},
    };

    struct Parsed {
        std::string config_path;
        std::string output_dir;
        std::vector<int> kinds;
    };
    std::vector<Parsed> parsed(std::size(specs));
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(specs); ++i) {
        CLI::App* sub = app.add_subcommand(specs[i].name, specs[i].help);
        sub->add_option("config", parsed[i].config_path, "config file path")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("-o,--output-dir", parsed[i].output_dir,
                        "override the config's output_dir");
        parsed[i].kinds = specs[i].allowed_kinds;
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed())
            return run_config(parsed[i].config_path, parsed[i].output_dir,
                              parsed[i].kinds);
    return 2;
}
