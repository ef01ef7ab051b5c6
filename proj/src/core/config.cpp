#include "core/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace plap {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::run: return "run";
        case ExperimentKind::ladder: return "ladder";
        case ExperimentKind::extinction_sweep: return "extinction_sweep";
        case ExperimentKind::dual_check: return "dual_check";
        case ExperimentKind::galerkin_compare: return "galerkin_compare";
        case ExperimentKind::gamma: return "gamma";
    }
    return "run";
}

namespace {

[[noreturn]] void fail(const std::string& what, int line) {
    throw std::runtime_error("config error at line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        fail("key '" + key + "' expects a number, got '" + v + "'", line);
    }
}

int to_int(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return static_cast<int>(x);
    } catch (...) {
        fail("key '" + key + "' expects an integer, got '" + v + "'", line);
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        fail("key '" + key + "' expects an unsigned integer, got '" + v + "'", line);
    }
}

std::vector<double> to_double_list(const std::string& key, const std::string& v,
                                   int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail("key '" + key + "' has an empty list element", line);
        out.push_back(to_double(key, item, line));
    }
    if (out.empty()) fail("key '" + key + "' expects a comma-separated list", line);
    return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& v, int line) {
    std::vector<int> out;
    for (double x : to_double_list(key, v, line)) out.push_back(static_cast<int>(x));
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::map<std::string, int> seen;  // "section.key" -> first line
    std::string section;
    bool kind_set = false;

    std::stringstream stream(text);
    std::string raw;
    int line = 0;
    while (std::getline(stream, raw)) {
        ++line;
        std::string s = raw;
        if (auto hash = s.find('#'); hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail("unterminated section header '" + s + "'", line);
            section = trim(s.substr(1, s.size() - 2));
            if (section != "params" && section != "scheme" && section != "initial" &&
                section != "experiment")
                fail("unknown section '" + section + "'", line);
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) fail("expected 'key = value', got '" + s + "'", line);
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty() || val.empty()) fail("empty key or value", line);
        if (section.empty()) fail("key '" + key + "' appears before any section", line);

        std::string qual = section + "." + key;
        if (auto it = seen.find(qual); it != seen.end())
            fail("duplicate key '" + key + "' (first set at line " +
                     std::to_string(it->second) + ")",
                 line);
        seen[qual] = line;

        if (section == "params") {
            if (key == "p") cfg.params.p = to_double(key, val, line);
            else if (key == "mu") cfg.params.mu = to_double(key, val, line);
            else if (key == "nu") cfg.params.nu = to_double(key, val, line);
            else if (key == "delta") cfg.params.delta = to_double(key, val, line);
            else if (key == "alpha") cfg.params.alpha = to_double(key, val, line);
            else if (key == "dim") cfg.params.dim = to_int(key, val, line);
            else if (key == "n") cfg.params.n_cells = to_int(key, val, line);
            else if (key == "dt") cfg.params.dt = to_double(key, val, line);
            else if (key == "t_end") cfg.params.t_end = to_double(key, val, line);
            else if (key == "eta") cfg.params.eta = to_double(key, val, line);
            else fail("unknown key '" + key + "' in [params]", line);
        } else if (section == "scheme") {
            if (key == "mode") {
                if (val == "semi_implicit") cfg.scheme.mode = SchemeConfig::Mode::semi_implicit;
                else if (val == "explicit") cfg.scheme.mode = SchemeConfig::Mode::explicit_euler;
                else fail("mode must be 'semi_implicit' or 'explicit'", line);
            } else if (key == "linear_solver_tol")
                cfg.scheme.linear_solver_tol = to_double(key, val, line);
            else if (key == "max_linear_iters")
                cfg.scheme.max_linear_iters = to_int(key, val, line);
            else if (key == "cfl_safety") cfg.scheme.cfl_safety = to_double(key, val, line);
            else if (key == "snapshot_stride")
                cfg.scheme.snapshot_stride = to_int(key, val, line);
            else if (key == "extinction_rel_threshold")
                cfg.scheme.extinction_rel_threshold = to_double(key, val, line);
            else fail("unknown key '" + key + "' in [scheme]", line);
        } else if (section == "initial") {
            if (key == "kind") {
                if (val == "zero") cfg.initial.kind = InitialCondition::Kind::zero;
                else if (val == "sine") cfg.initial.kind = InitialCondition::Kind::sine;
                else if (val == "indicator")
                    cfg.initial.kind = InitialCondition::Kind::indicator;
                else fail("initial kind must be zero, sine, or indicator", line);
            } else if (key == "mode") cfg.initial.mode = to_int_list(key, val, line);
            else if (key == "amplitudes")
                cfg.initial.amplitudes = to_double_list(key, val, line);
            else if (key == "box_lo") cfg.initial.box_lo = to_double(key, val, line);
            else if (key == "box_hi") cfg.initial.box_hi = to_double(key, val, line);
            else if (key == "components") cfg.ncomp = to_int(key, val, line);
            else fail("unknown key '" + key + "' in [initial]", line);
        } else {  // experiment
            if (key == "kind") {
                kind_set = true;
                if (val == "run") cfg.kind = ExperimentKind::run;
                else if (val == "ladder") cfg.kind = ExperimentKind::ladder;
                else if (val == "extinction_sweep") cfg.kind = ExperimentKind::extinction_sweep;
                else if (val == "dual_check") cfg.kind = ExperimentKind::dual_check;
                else if (val == "galerkin_compare") cfg.kind = ExperimentKind::galerkin_compare;
                else if (val == "gamma") cfg.kind = ExperimentKind::gamma;
                else fail("unknown experiment kind '" + val + "'", line);
            } else if (key == "output_dir") cfg.output_dir = val;
            else if (key == "seed") cfg.seed = to_u64(key, val, line);
            else if (key == "nu_values") cfg.nu_values = to_double_list(key, val, line);
            else if (key == "mu_values") cfg.mu_values = to_double_list(key, val, line);
            else if (key == "delta_values") cfg.delta_values = to_double_list(key, val, line);
            else if (key == "eta_values") cfg.eta_values = to_double_list(key, val, line);
            else if (key == "horizon") cfg.horizon = to_double(key, val, line);
            else if (key == "nu_dual") cfg.nu_dual = to_double(key, val, line);
            else if (key == "phi_rho") cfg.phi_rho = to_double(key, val, line);
            else if (key == "dual_trials") cfg.dual_trials = to_int(key, val, line);
            else if (key == "modes") cfg.modes = to_int(key, val, line);
            else if (key == "quad_points") cfg.quad_points = to_int(key, val, line);
            else if (key == "rk_dt") cfg.rk_dt = to_double(key, val, line);
            else if (key == "gamma_seeds") cfg.gamma_seeds = to_int(key, val, line);
            else if (key == "extinction_threshold")
                cfg.extinction_threshold = to_double(key, val, line);
            else fail("unknown key '" + key + "' in [experiment]", line);
        }
    }
    if (!kind_set) throw std::runtime_error("config error: experiment kind required");
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void ExperimentConfig::validate() const {
    params.validate();
    scheme.validate();
    if (ncomp < 0) throw std::runtime_error("initial components must be >= 0");
    if (initial.box_lo >= initial.box_hi)
        throw std::runtime_error("initial box_lo must be < box_hi");
    if (output_dir.empty()) throw std::runtime_error("output_dir must be nonempty");
    switch (kind) {
        case ExperimentKind::ladder:
            if (nu_values.empty() && mu_values.empty())
                throw std::runtime_error("ladder requires nu_values and/or mu_values");
            break;
        case ExperimentKind::extinction_sweep:
            if (delta_values.empty())
                throw std::runtime_error("extinction_sweep requires delta_values");
            break;
        case ExperimentKind::dual_check:
            if (eta_values.empty())
                throw std::runtime_error("dual_check requires eta_values");
            if (!(phi_rho > 0.0)) throw std::runtime_error("phi_rho must be > 0");
            break;
        case ExperimentKind::galerkin_compare:
            if (modes < 1) throw std::runtime_error("modes must be >= 1");
            if (!(rk_dt > 0.0)) throw std::runtime_error("rk_dt must be > 0");
            break;
        case ExperimentKind::gamma:
            if (gamma_seeds < 1) throw std::runtime_error("gamma_seeds must be >= 1");
            break;
        case ExperimentKind::run:
            break;
    }
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    os.precision(17);
    os << "[params]\n"
       << "p = " << params.p << "\nmu = " << params.mu << "\nnu = " << params.nu
       << "\ndelta = " << params.delta << "\nalpha = " << params.alpha
       << "\ndim = " << params.dim << "\nn = " << params.n_cells
       << "\ndt = " << params.dt << "\nt_end = " << params.t_end
       << "\neta = " << params.eta << "\n\n[scheme]\nmode = "
       << (scheme.mode == SchemeConfig::Mode::semi_implicit ? "semi_implicit"
                                                            : "explicit")
       << "\nlinear_solver_tol = " << scheme.linear_solver_tol
       << "\nmax_linear_iters = " << scheme.max_linear_iters
       << "\ncfl_safety = " << scheme.cfl_safety
       << "\nsnapshot_stride = " << scheme.snapshot_stride
       << "\nextinction_rel_threshold = " << scheme.extinction_rel_threshold
       << "\n\n[initial]\nkind = ";
    switch (initial.kind) {
        case InitialCondition::Kind::zero: os << "zero"; break;
        case InitialCondition::Kind::sine: os << "sine"; break;
        case InitialCondition::Kind::indicator: os << "indicator"; break;
        case InitialCondition::Kind::nodal: os << "zero"; break;  // not expressible
    }
    os << "\n";
    auto list = [&os](const char* key, const auto& values) {
        if (values.empty()) return;
        os << key << " = ";
        for (std::size_t i = 0; i < values.size(); ++i)
            os << (i ? ", " : "") << values[i];
        os << "\n";
    };
    list("mode", initial.mode);
    list("amplitudes", initial.amplitudes);
    os << "box_lo = " << initial.box_lo << "\nbox_hi = " << initial.box_hi << "\n";
    if (ncomp > 0) os << "components = " << ncomp << "\n";
    os << "\n[experiment]\nkind = " << to_string(kind)
       << "\noutput_dir = " << output_dir << "\nseed = " << seed << "\n";
    list("nu_values", nu_values);
    list("mu_values", mu_values);
    list("delta_values", delta_values);
    list("eta_values", eta_values);
    os << "horizon = " << horizon << "\nnu_dual = " << nu_dual
       << "\nphi_rho = " << phi_rho << "\ndual_trials = " << dual_trials
       << "\nmodes = " << modes << "\nquad_points = " << quad_points
       << "\nrk_dt = " << rk_dt << "\ngamma_seeds = " << gamma_seeds
       << "\nextinction_threshold = " << extinction_threshold << "\n";
    return os.str();
}

}  // namespace plap
