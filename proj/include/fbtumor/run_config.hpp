#pragma once

#include <string>
#include <vector>

#include "fbtumor/bessel.hpp"
#include "fbtumor/model.hpp"

namespace fbtumor::config {

// Flat `key = value` run configuration with dotted section prefixes.
// Unknown keys are rejected; ranges are comma-separated lists that must be
// non-empty and strictly increasing.  Everything is deterministic.
struct RunConfig {
    ModelParams params;
    bessel::SeriesConfig series;

    std::vector<double> sweep_mu;
    std::vector<double> sweep_sigma_tilde;
    std::vector<double> sweep_tau;
    std::vector<int> sweep_n;

    std::string output_dir = ".";
    std::string output_format = "csv";  // csv|json
    int jobs = 1;

    int stationary_grid_size = 256;
    int stationary_max_iter = 80;
    double stationary_tol = 1e-12;
    int stationary_substeps = 16;

    int bvp_grid_size = 2048;

    double modes_t_end = 40.0;
    double modes_dt = 0.0;  // 0 = auto
    double modes_rho0_init = 1.0;
    double modes_rho1_init = 0.0;

    double evolve_r_init = 0.0;  // 0 = start from 1.2 x delay-free radius
    double evolve_dt = 0.0025;
    double evolve_t_end = 50.0;
    std::string evolve_variant = "full";  // full|dropped
    int evolve_profile_nodes = 128;
    int evolve_substeps = 16;

    int stability_n_max = 8;

    std::vector<double> verify_x_grid;
    int verify_n_max = 8;
    bool verify_flip_a_sign = false;  // fault injection for self-tests

    void validate() const;  // throws ConfigError
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace fbtumor::config
