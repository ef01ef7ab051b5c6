#include "plap/plap.h"

#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "core/config.hpp"
#include "core/diagnostics.hpp"
#include "core/experiment.hpp"

struct plap_config {
    plap::ExperimentConfig cfg;
};

namespace {

void copy_error(char* errbuf, size_t errlen, const std::string& msg) {
    if (!errbuf || errlen == 0) return;
    size_t n = std::min(errlen - 1, msg.size());
    std::memcpy(errbuf, msg.data(), n);
    errbuf[n] = '\0';
}

template <typename Fn>
plap_status guarded(char* errbuf, size_t errlen, Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        copy_error(errbuf, errlen, e.what());
        return PLAP_ERR_INVALID_ARGUMENT;
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        copy_error(errbuf, errlen, msg);
        if (msg.rfind("config error", 0) == 0) return PLAP_ERR_PARSE;
        if (msg.find("cannot open") != std::string::npos ||
            msg.find("write") != std::string::npos)
            return PLAP_ERR_IO;
        return PLAP_ERR_RUNTIME;
    } catch (const std::bad_alloc&) {
        copy_error(errbuf, errlen, "out of memory");
        return PLAP_ERR_RUNTIME;
    } catch (const std::exception& e) {
        copy_error(errbuf, errlen, e.what());
        return PLAP_ERR_RUNTIME;
    }
}

}  // namespace

extern "C" {

const char* plap_version(void) { return "1.0.0"; }

plap_status plap_config_parse_string(const char* text, plap_config** out, char* errbuf,
                                     size_t errlen) {
    if (!text || !out) {
        copy_error(errbuf, errlen, "text and out must be non-null");
        return PLAP_ERR_INVALID_ARGUMENT;
    }
    return guarded(errbuf, errlen, [&] {
        auto handle = new plap_config{plap::parse_config(text)};
        *out = handle;
        return PLAP_OK;
    });
}

plap_status plap_config_parse_file(const char* path, plap_config** out, char* errbuf,
                                   size_t errlen) {
    if (!path || !out) {
        copy_error(errbuf, errlen, "path and out must be non-null");
        return PLAP_ERR_INVALID_ARGUMENT;
    }
    return guarded(errbuf, errlen, [&] {
        auto handle = new plap_config{plap::parse_config_file(path)};
        *out = handle;
        return PLAP_OK;
    });
}

void plap_config_free(plap_config* cfg) { delete cfg; }

plap_status plap_config_kind(const plap_config* cfg, int* kind) {
    if (!cfg || !kind) return PLAP_ERR_INVALID_ARGUMENT;
    *kind = static_cast<int>(cfg->cfg.kind);
    return PLAP_OK;
}

plap_status plap_config_set_output_dir(plap_config* cfg, const char* dir) {
    if (!cfg || !dir || !*dir) return PLAP_ERR_INVALID_ARGUMENT;
    cfg->cfg.output_dir = dir;
    return PLAP_OK;
}

plap_status plap_run_experiment(const plap_config* cfg, int* all_ok, char* errbuf,
                                size_t errlen) {
    if (!cfg || !all_ok) {
        copy_error(errbuf, errlen, "cfg and all_ok must be non-null");
        return PLAP_ERR_INVALID_ARGUMENT;
    }
    return guarded(errbuf, errlen, [&] {
        plap::ExperimentResult res = plap::run_experiment(cfg->cfg);
        *all_ok = res.all_ok() ? 1 : 0;
        if (!res.all_ok()) {
            std::string msg = "failed jobs:";
            for (const auto& j : res.jobs)
                if (!j.ok) msg += " " + j.name + " (" + j.message + ")";
            copy_error(errbuf, errlen, msg);
        }
        return PLAP_OK;
    });
}

plap_status plap_gamma_estimate(int dim, int n, double p, int seeds, uint64_t rng_seed,
                                double* out, char* errbuf, size_t errlen) {
    if (!out) {
        copy_error(errbuf, errlen, "out must be non-null");
        return PLAP_ERR_INVALID_ARGUMENT;
    }
    return guarded(errbuf, errlen, [&] {
        plap::Grid grid(dim, n);
        *out = plap::gamma_estimate(grid, p, seeds, rng_seed);
        return PLAP_OK;
    });
}

plap_status plap_t_star_bound(double u0_l2, double u0_linf, double p, double delta,
                              double gamma, double* out, int* defined, char* errbuf,
                              size_t errlen) {
    if (!out || !defined) {
        copy_error(errbuf, errlen, "out and defined must be non-null");
        return PLAP_ERR_INVALID_ARGUMENT;
    }
    return guarded(errbuf, errlen, [&] {
        auto bound = plap::t_star_bound(u0_l2, u0_linf, p, delta, gamma);
        *defined = bound.has_value() ? 1 : 0;
        if (bound) *out = *bound;
        return PLAP_OK;
    });
}

}  // extern "C"
