#pragma once

#include <functional>
#include <vector>

#include "fbtumor/model.hpp"
#include "fbtumor/radial_grid.hpp"
#include "fbtumor/stationary.hpp"

namespace fbtumor::perturbation {

using stationary::TauExpansion;
using stationary::ZerothOrderSolution;

// State of one angular mode cos(n theta).
struct ModeState {
    int n = 0;
    double rho0_init = 0.0;  // zeroth-order amplitude at t = 0
    double rho1_init = 0.0;  // first-order-in-tau amplitude at t = 0
};

// g_n = mu (1 - 2I_1/(R0 I_0) - I_1 I_{n+1}/(I_0 I_n)) - n(n^2-1)/R0^3,
// all Bessel factors at R0.
double growth_rate(int n, const ModelParams& params, double R0,
                   const bessel::SeriesConfig& cfg = {});

// mu_n^0: the aggressiveness at which mode n turns neutral.  +infinity for
// n in {0, 1}; for n >= 2 the positive ratio n(n^2-1)/R0^3 over the
// spectral bracket, whose positivity is asserted.
double mode_threshold(int n, double R0, const bessel::SeriesConfig& cfg = {});

// mu_* = min_n mu_n^0 = mu_2^0; the minimum is re-checked over n = 2..32.
double mu_star(double R0, const bessel::SeriesConfig& cfg = {});

// rho_n^0(t) = rho_n^0(0) exp(g_n t).
double rho0_trajectory(const ModeState& mode, const ModelParams& params, double R0, double t,
                       const bessel::SeriesConfig& cfg = {});

// Closed-form zeroth-order mode fields, scaled by the supplied amplitude.
struct ModeZerothFields {
    int n = 0;
    double rho = 1.0;
    std::function<double(double)> w0;        // nutrient perturbation profile
    std::function<double(double)> q0;        // pressure perturbation profile
    std::function<double(double)> q0_prime;
    double C1 = 0.0;
    double q0_prime_at_R0 = 0.0;
    double q0_second_at_R0 = 0.0;
};

ModeZerothFields mode_zeroth_fields(int n, const ModelParams& params,
                                    const ZerothOrderSolution& zeroth, double rho = 1.0);

// Solution of L_n u = b on [0, R0] with u(R0) prescribed; second-order
// finite differences, regularity at the origin (u(0) = 0 for n >= 1,
// u'(0) = 0 for n = 0).
struct ModeBvpResult {
    RadialGridFunction solution;
    double boundary_derivative = 0.0;  // one-sided second-order du/dr at R0
    double residual = 0.0;             // discrete interior residual, relative
};

ModeBvpResult solve_Ln_bvp(int n, const RadialGridFunction& rhs, double boundary_value,
                           double R0);

ModeBvpResult solve_Ln_bvp(int n, const std::function<double(double)>& rhs,
                           double boundary_value, double R0, int grid_size = 2048);

// First-order mode ODE d rho_n^1/dt = h_n rho_n^1 + f_n rho_n^0(t).
// The homogeneous rate h_n is assembled from the same boundary data as the
// zeroth-order rate and must reproduce g_n; f_n collects the R1-driven
// forcing (four elliptic solves for general n, explicit Bessel
// antiderivatives for n = 1, the closed-form coefficient for n = 0).
struct FirstOrderModeOde {
    int n = 0;
    double g_n = 0.0;
    double homogeneous_rate = 0.0;
    double forcing_coefficient = 0.0;
    // boundary value of the first-order nutrient mode w_n^1(R0), split by
    // the amplitude it multiplies
    double w1_boundary_rho0 = 0.0;
    double w1_boundary_rho1 = 0.0;

    double rhs(double rho1, double rho0_at_t) const {
        return homogeneous_rate * rho1 + forcing_coefficient * rho0_at_t;
    }
};

FirstOrderModeOde first_order_mode_ode(int n, const ModelParams& params,
                                       const ZerothOrderSolution& zeroth,
                                       const TauExpansion& tauexp, int bvp_grid_size = 2048);

// Same assembly routed through the elliptic solves even when a closed form
// exists (n = 1); used to cross-check the explicit path.
FirstOrderModeOde first_order_mode_ode_generic(int n, const ModelParams& params,
                                               const ZerothOrderSolution& zeroth,
                                               const TauExpansion& tauexp,
                                               int bvp_grid_size = 2048);

double rho1_rhs(int n, double t, const ModeState& mode, const ModelParams& params,
                const ZerothOrderSolution& zeroth, const TauExpansion& tauexp,
                int bvp_grid_size = 2048);

// Time series of the first-order amplitude.
struct ModeTrajectory {
    std::vector<double> times;
    std::vector<double> rho0;
    std::vector<double> rho1;
};

struct TrajectoryOptions {
    double dt = 0.0;          // 0 = auto: min(0.01, 0.1/|g_n|)
    bool zero_forcing = false;
    double stability_tol = 1e-6;  // step-doubling guard
};

ModeTrajectory rho1_trajectory(int n, const ModeState& mode, const ModelParams& params,
                               const ZerothOrderSolution& zeroth, const TauExpansion& tauexp,
                               double t_end, const TrajectoryOptions& opts = {});

// Least-squares decay rate of ln|y| over the trailing fraction of the
// series; returns the positive rate d in |y| ~ e^{-d t}.
double fitted_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                         double tail_fraction = 0.3);

}  // namespace fbtumor::perturbation
