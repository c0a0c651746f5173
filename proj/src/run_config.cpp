#include "fbtumor/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "fbtumor/errors.hpp"

namespace fbtumor::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("config key '" + key + "': malformed number '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("config key '" + key + "': malformed integer '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': malformed boolean '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty range");
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1]))
            throw ConfigError("config key '" + key + "': range must be strictly increasing");
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_int(key, item));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty range");
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1]))
            throw ConfigError("config key '" + key + "': range must be strictly increasing");
    return out;
}

}  // namespace

void RunConfig::validate() const {
    try {
        params.validate();
        series.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (output_format != "csv" && output_format != "json")
        throw ConfigError("config: output.format must be csv or json");
    if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
    if (stationary_grid_size < 128 || stationary_grid_size % 2 != 0)
        throw ConfigError("config: stationary.grid_size must be even and >= 128");
    if (!(stationary_tol > 0.0)) throw ConfigError("config: stationary.tol must be positive");
    if (stationary_max_iter < 1) throw ConfigError("config: stationary.max_iter must be >= 1");
    if (stationary_substeps < 8) throw ConfigError("config: stationary.substeps must be >= 8");
    if (bvp_grid_size < 64) throw ConfigError("config: bvp.grid_size must be >= 64");
    if (!(modes_t_end > 0.0)) throw ConfigError("config: modes.t_end must be positive");
    if (modes_dt < 0.0) throw ConfigError("config: modes.dt must be >= 0");
    if (!(evolve_dt > 0.0)) throw ConfigError("config: evolve.dt must be positive");
    if (!(evolve_t_end > 0.0)) throw ConfigError("config: evolve.t_end must be positive");
    if (evolve_variant != "full" && evolve_variant != "dropped")
        throw ConfigError("config: evolve.variant must be full or dropped");
    if (evolve_profile_nodes < 64) throw ConfigError("config: evolve.profile_nodes must be >= 64");
    if (evolve_substeps < 8) throw ConfigError("config: evolve.substeps must be >= 8");
    if (stability_n_max < 2) throw ConfigError("config: stability.n_max must be >= 2");
    if (verify_n_max < 2) throw ConfigError("config: verify.n_max must be >= 2");
    for (double t : sweep_tau)
        if (t < 0.0) throw ConfigError("config: sweep.tau entries must be >= 0");
    for (double m : sweep_mu)
        if (!(m > 0.0)) throw ConfigError("config: sweep.mu entries must be positive");
    for (double s : sweep_sigma_tilde)
        if (!(s > 0.0 && s < 1.0))
            throw ConfigError("config: sweep.sigma_tilde entries must lie in (0,1)");
    for (int n : sweep_n)
        if (n < 0) throw ConfigError("config: sweep.n entries must be >= 0");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (value.empty()) throw ConfigError("config key '" + key + "': empty value");

        if (key == "params.mu") cfg.params.mu = parse_double(key, value);
        else if (key == "params.sigma_tilde") cfg.params.sigma_tilde = parse_double(key, value);
        else if (key == "params.tau") cfg.params.tau = parse_double(key, value);
        else if (key == "bessel.max_terms") cfg.series.max_terms = parse_int(key, value);
        else if (key == "bessel.term_tolerance") cfg.series.term_tolerance = parse_double(key, value);
        else if (key == "bessel.argument_cap") cfg.series.argument_cap = parse_double(key, value);
        else if (key == "sweep.mu") cfg.sweep_mu = parse_double_list(key, value);
        else if (key == "sweep.sigma_tilde") cfg.sweep_sigma_tilde = parse_double_list(key, value);
        else if (key == "sweep.tau") cfg.sweep_tau = parse_double_list(key, value);
        else if (key == "sweep.n") cfg.sweep_n = parse_int_list(key, value);
        else if (key == "output.dir") cfg.output_dir = value;
        else if (key == "output.format") cfg.output_format = value;
        else if (key == "jobs") cfg.jobs = parse_int(key, value);
        else if (key == "stationary.grid_size") cfg.stationary_grid_size = parse_int(key, value);
        else if (key == "stationary.max_iter") cfg.stationary_max_iter = parse_int(key, value);
        else if (key == "stationary.tol") cfg.stationary_tol = parse_double(key, value);
        else if (key == "stationary.substeps") cfg.stationary_substeps = parse_int(key, value);
        else if (key == "bvp.grid_size") cfg.bvp_grid_size = parse_int(key, value);
        else if (key == "modes.t_end") cfg.modes_t_end = parse_double(key, value);
        else if (key == "modes.dt") cfg.modes_dt = parse_double(key, value);
        else if (key == "modes.rho0_init") cfg.modes_rho0_init = parse_double(key, value);
        else if (key == "modes.rho1_init") cfg.modes_rho1_init = parse_double(key, value);
        else if (key == "evolve.r_init") cfg.evolve_r_init = parse_double(key, value);
        else if (key == "evolve.dt") cfg.evolve_dt = parse_double(key, value);
        else if (key == "evolve.t_end") cfg.evolve_t_end = parse_double(key, value);
        else if (key == "evolve.variant") cfg.evolve_variant = value;
        else if (key == "evolve.profile_nodes") cfg.evolve_profile_nodes = parse_int(key, value);
        else if (key == "evolve.substeps") cfg.evolve_substeps = parse_int(key, value);
        else if (key == "stability.n_max") cfg.stability_n_max = parse_int(key, value);
        else if (key == "verify.x_grid") cfg.verify_x_grid = parse_double_list(key, value);
        else if (key == "verify.n_max") cfg.verify_n_max = parse_int(key, value);
        else if (key == "verify.flip_a_sign") cfg.verify_flip_a_sign = parse_bool(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace fbtumor::config
