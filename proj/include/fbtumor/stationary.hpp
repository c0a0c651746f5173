#pragma once

#include "fbtumor/bessel.hpp"
#include "fbtumor/model.hpp"
#include "fbtumor/radial_grid.hpp"

namespace fbtumor::stationary {

// Radius of the delay-free stationary disk: the unique R with
// I_1(R)/(R I_0(R)) = sigma_tilde/2, found by bracketing bisection.
double solve_R0(double sigma_tilde, double tol = 1e-13,
                const bessel::SeriesConfig& cfg = {});

// P_0(R) = I_1(R)/(R I_0(R)), strictly decreasing with range (0, 1/2].
double P0(double R, const bessel::SeriesConfig& cfg = {});

// Closed-form stationary solution at zeroth order in the delay.
class ZerothOrderSolution {
public:
    ZerothOrderSolution(const ModelParams& params, double R0, bessel::SeriesConfig cfg);

    double R0() const { return R0_; }
    double mu() const { return mu_; }
    double sigma_tilde() const { return sigma_tilde_; }
    const bessel::SeriesConfig& series_config() const { return cfg_; }

    double sigma0(double r) const;         // I_0(r)/I_0(R0)
    double sigma0_prime(double r) const;   // I_1(r)/I_0(R0)
    double sigma0_second(double r) const;

    double p0(double r) const;
    double p0_prime(double r) const;
    double p0_second(double r) const;

    double p0_second_at_R0() const { return p0_second_at_R0_; }
    double p0_third_at_R0() const { return p0_third_at_R0_; }

    // Bessel values at R0, reused throughout the mode analysis.
    double I0_at_R0() const { return i0_; }
    double I1_at_R0() const { return i1_; }

private:
    double mu_, sigma_tilde_, R0_;
    bessel::SeriesConfig cfg_;
    double i0_, i1_;
    double p0_offset_;  // 1/R0 + mu - (mu sigma_tilde/4) R0^2
    double p0_second_at_R0_, p0_third_at_R0_;
};

ZerothOrderSolution build_zeroth(const ModelParams& params,
                                 const bessel::SeriesConfig& cfg = {});

// First-order-in-tau correction: R1 = mu B(R0)/A(R0) plus the sigma1/p1
// evaluators feeding the first-order mode dynamics.
class TauExpansion {
public:
    TauExpansion(const ZerothOrderSolution& zeroth);

    double R1() const { return R1_; }
    double A_value() const { return A_; }
    double B_value() const { return B_; }
    double R_of_tau(double tau) const { return R0_ + tau * R1_; }

    double sigma1(double r) const;
    double p1_prime(double r) const;
    double p1_second_at_R0() const { return p1_second_at_R0_; }

private:
    double mu_, sigma_tilde_, R0_;
    bessel::SeriesConfig cfg_;
    double i0_, i1_;
    double A_, B_, R1_;
    double p1_second_at_R0_;
};

TauExpansion compute_tau_expansion(const ModelParams& params,
                                   const ZerothOrderSolution& zeroth);

// Left side of the integral identity that determines R1 (adaptive
// quadrature of (sigma0' p0' + sigma1) r dr plus the boundary terms).
// Vanishes when zeroth/tauexp form a consistent pair.
double residual_integral(const ZerothOrderSolution& zeroth, const TauExpansion& tauexp,
                         double quad_tol = 1e-12);

// Same identity evaluated at an arbitrary trial R1 (sensitivity checks).
double residual_integral_at(const ZerothOrderSolution& zeroth, double R1,
                            double quad_tol = 1e-12);

// Full stationary solve with delay, in rescaled coordinates (radius 1 maps
// to the physical boundary; profiles extended linearly to [0, 2]).
struct FixedPointOptions {
    int grid_size = 256;   // intervals on [0, 2]; must be even, >= 128
    int max_iter = 80;
    double tol = 1e-12;          // sup-norm stopping distance for the inner map
    int characteristic_substeps = 16;
    double outer_tol = 1e-12;    // |F| target for the outer root find
    double initial_pressure = 1.0;  // constant initial iterate
};

struct FixedPointSolution {
    double R_star = 0.0;
    RadialGridFunction p_grid;        // rescaled pressure on [0, 2], p(1) = 1
    RadialGridFunction p_prime_grid;  // its radial derivative
    int iterations = 0;               // inner iterations of the final solve
    double contraction_estimate = 0.0;
};

FixedPointSolution fixed_point_solve(const ModelParams& params,
                                     const FixedPointOptions& opts = {},
                                     const bessel::SeriesConfig& cfg = {});

// Inner stage of the solve: relax the pressure map at a fixed (rescaled)
// radius R.  Exposed for the simulator start-up and for uniqueness tests.
struct PressureRelaxation {
    RadialGridFunction p;        // on [0, 2]
    RadialGridFunction p_prime;  // on [0, 2]
    int iterations = 0;
    double contraction_estimate = 0.0;
};

PressureRelaxation relax_pressure(double R, const ModelParams& params,
                                  const FixedPointOptions& opts = {},
                                  const bessel::SeriesConfig& cfg = {});

// F(R, tau): the averaged nutrient excess at radius R with the relaxed
// pressure field; strictly decreasing in R, F(R_*) = 0.
double stationarity_mismatch(double R, const ModelParams& params,
                             const PressureRelaxation& relaxed,
                             const FixedPointOptions& opts = {},
                             const bessel::SeriesConfig& cfg = {});

}  // namespace fbtumor::stationary
