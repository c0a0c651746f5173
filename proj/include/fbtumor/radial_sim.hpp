#pragma once

#include <algorithm>
#include <deque>
#include <vector>

#include "fbtumor/bessel.hpp"
#include "fbtumor/model.hpp"

namespace fbtumor::sim {

enum class Variant { full_delay, dropped_otau };

struct SimConfig {
    double dt = 0.0025;
    double t_end = 50.0;
    Variant variant = Variant::full_delay;
    int characteristic_substeps = 16;  // >= 8
    int profile_nodes = 128;           // intervals per stored gradient profile
    double steady_drift_tol = 1e-8;    // |R'| threshold in run_to_steady
    double blowup_radius = 0.0;        // 0 = auto (10 x delay-free radius)

    void validate(const ModelParams& params) const;
};

// Radially symmetric evolution with genuine delay: the pressure gradient
// profile is rebuilt each stage from backward characteristics through the
// buffered history (method of steps), and R'(t) = -dp/dr(R(t), t).
class DelayTrajectory {
public:
    DelayTrajectory(double R_init, const ModelParams& params, const SimConfig& cfg,
                    const bessel::SeriesConfig& bessel_cfg = {});

    void advance();

    double time() const { return times_.back(); }
    double radius() const { return radii_.back(); }
    double radius_rate() const { return rates_.back(); }

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& radii() const { return radii_; }
    const std::vector<double>& rates() const { return rates_; }

    // Dense radius history; exact R_init for s <= 0.
    double radius_at(double s) const;

    // |xi(t - tau; R(t), t) - R(t - tau)| at the current time (full variant).
    double characteristic_endpoint_error() const;

    // Nutrient-excess integral driving R' at the current time, equal to
    // R R'/mu; vanishes at the stationary state.
    double mass_balance() const;

    // d xi / d r of the backward map at the current time, sampled at mid
    // radius by differencing neighbouring characteristics.
    double characteristic_jacobian() const;

    const ModelParams& params() const { return params_; }
    const SimConfig& config() const { return cfg_; }

private:
    struct Profile {
        long step = 0;  // time = step * dt
        double R = 0.0;
        double r_max = 0.0;      // grid edge, a few cells past R
        std::vector<double> v;   // dp/dr samples on [0, r_max], node at R exact
        std::vector<double> vp;  // d2p/dr2 samples
    };

    ModelParams params_;
    SimConfig cfg_;
    bessel::SeriesConfig bcfg_;
    long steps_per_tau_ = 0;
    long current_step_ = 0;
    std::deque<Profile> buffer_;
    std::vector<double> times_, radii_, rates_;

    int pad_cells() const { return std::max(4, cfg_.profile_nodes / 16); }
    double eval_v(double x, double s) const;
    const Profile& profile_at_step(long j) const;
    std::vector<double> trace_back(const std::vector<double>& r_nodes, double t_star,
                                   double bound_factor) const;
    Profile build_profile(double t_star, double R_star) const;
    double stage_rate(double t_star, double R_star) const;
};

DelayTrajectory run_to_steady(double R_init, const ModelParams& params, const SimConfig& cfg,
                              const bessel::SeriesConfig& bessel_cfg = {});

struct VariantComparison {
    double sup_distance = 0.0;
    double terminal_full = 0.0;
    double terminal_dropped = 0.0;
};

VariantComparison compare_variants(double R_init, const ModelParams& params,
                                   const SimConfig& cfg,
                                   const bessel::SeriesConfig& bessel_cfg = {});

}  // namespace fbtumor::sim
