#include "fbtumor/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fbtumor/errors.hpp"
#include "fbtumor/quadrature.hpp"

namespace fbtumor {

void ModelParams::validate() const {
    if (!(mu >= 0.0)) throw std::invalid_argument("ModelParams: mu must be >= 0");
    if (!(sigma_tilde > 0.0 && sigma_tilde < 1.0))
        throw std::invalid_argument("ModelParams: sigma_tilde must lie in (0,1)");
    if (!(tau >= 0.0)) throw std::invalid_argument("ModelParams: tau must be >= 0");
    if (lambda != 0.0)
        throw std::invalid_argument("ModelParams: only the quasi-steady case lambda = 0 is supported");
}

}  // namespace fbtumor

namespace fbtumor::stationary {

double P0(double R, const bessel::SeriesConfig& cfg) {
    return bessel::besseli(1, R, cfg) / (R * bessel::besseli(0, R, cfg));
}

double solve_R0(double sigma_tilde, double tol, const bessel::SeriesConfig& cfg) {
    if (!(sigma_tilde > 0.0 && sigma_tilde < 1.0))
        throw std::domain_error("solve_R0: sigma_tilde must lie in (0,1)");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_R0: tol must be positive");

    const double target = 0.5 * sigma_tilde;
    // P0 decreases from 1/2 at 0+; expand the right bracket edge until P0 < target
    double lo = 1e-8, hi = 1.0;
    while (P0(hi, cfg) > target) {
        if (hi >= cfg.argument_cap)
            throw std::range_error("solve_R0: no bracket below argument_cap");
        hi = std::min(2.0 * hi, cfg.argument_cap);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double res = P0(mid, cfg) - target;
        if (std::fabs(res) < tol && (hi - lo) < 1e-14 * hi) return mid;
        (res > 0.0 ? lo : hi) = mid;
    }
    const double mid = 0.5 * (lo + hi);
    if (std::fabs(P0(mid, cfg) - target) >= tol)
        throw ConvergenceError("solve_R0: bisection stalled above tolerance");
    return mid;
}

ZerothOrderSolution::ZerothOrderSolution(const ModelParams& params, double R0,
                                         bessel::SeriesConfig cfg)
    : mu_(params.mu), sigma_tilde_(params.sigma_tilde), R0_(R0), cfg_(cfg) {
    i0_ = bessel::besseli(0, R0_, cfg_);
    i1_ = bessel::besseli(1, R0_, cfg_);
    p0_offset_ = 1.0 / R0_ + mu_ - 0.25 * mu_ * sigma_tilde_ * R0_ * R0_;
    p0_second_at_R0_ = mu_ * (2.0 * i1_ / (R0_ * i0_) - 1.0);
    p0_third_at_R0_ = mu_ * (1.0 / R0_ - 2.0 * i1_ / (R0_ * R0_ * i0_) - i1_ / i0_);
}

double ZerothOrderSolution::sigma0(double r) const {
    return bessel::besseli(0, r, cfg_) / i0_;
}

double ZerothOrderSolution::sigma0_prime(double r) const {
    return bessel::besseli(1, r, cfg_) / i0_;
}

double ZerothOrderSolution::sigma0_second(double r) const {
    return bessel::besseli_prime(1, r, cfg_) / i0_;
}

double ZerothOrderSolution::p0(double r) const {
    return 0.25 * mu_ * sigma_tilde_ * r * r - mu_ * bessel::besseli(0, r, cfg_) / i0_ +
           p0_offset_;
}

double ZerothOrderSolution::p0_prime(double r) const {
    return 0.5 * mu_ * sigma_tilde_ * r - mu_ * bessel::besseli(1, r, cfg_) / i0_;
}

double ZerothOrderSolution::p0_second(double r) const {
    return 0.5 * mu_ * sigma_tilde_ - mu_ * bessel::besseli_prime(1, r, cfg_) / i0_;
}

ZerothOrderSolution build_zeroth(const ModelParams& params, const bessel::SeriesConfig& cfg) {
    params.validate();
    const double R0 = solve_R0(params.sigma_tilde, 1e-13, cfg);
    return ZerothOrderSolution(params, R0, cfg);
}

TauExpansion::TauExpansion(const ZerothOrderSolution& zeroth)
    : mu_(zeroth.mu()),
      sigma_tilde_(zeroth.sigma_tilde()),
      R0_(zeroth.R0()),
      cfg_(zeroth.series_config()),
      i0_(zeroth.I0_at_R0()),
      i1_(zeroth.I1_at_R0()) {
    const double i2 = bessel::besseli(2, R0_, cfg_);
    A_ = 2.0 * (-i1_ * i1_ + i0_ * i2);
    B_ = -2.0 * i1_ * i2 + R0_ * i1_ * i1_ - R0_ * i2 * i0_;
    if (!(A_ < 0.0)) throw InvariantViolation("TauExpansion: A(R0) must be negative");
    if (!(B_ < 0.0)) throw InvariantViolation("TauExpansion: B(R0) must be negative");
    R1_ = mu_ * (B_ / A_);

    const double t1 = mu_ * mu_ * i1_ / (R0_ * i0_ * i0_) * (-R0_ * i1_ + i2);
    const double t2 =
        mu_ * mu_ / (2.0 * i0_ * i0_) * (i0_ * i0_ - 2.0 * i0_ * i1_ / R0_ + i1_ * i1_);
    const double t3 = mu_ * R1_ * i1_ / (i0_ * i0_) * (i0_ - i1_ / R0_);
    p1_second_at_R0_ = t1 + t2 + t3;
}

double TauExpansion::sigma1(double r) const {
    return -bessel::besseli(0, r, cfg_) * i1_ / (i0_ * i0_) * R1_;
}

double TauExpansion::p1_prime(double r) const {
    const double b0 = bessel::besseli(0, r, cfg_);
    const double b1 = bessel::besseli(1, r, cfg_);
    return mu_ * mu_ * sigma_tilde_ / (2.0 * i0_) * (2.0 * b1 - r * b0) +
           mu_ * mu_ / (i0_ * i0_) * (0.5 * r * (b1 * b1 - b0 * b0) + b0 * b1) +
           mu_ * i1_ / (i0_ * i0_) * R1_ * b1;
}

TauExpansion compute_tau_expansion(const ModelParams& params, const ZerothOrderSolution& zeroth) {
    params.validate();
    if (params.mu != zeroth.mu() || params.sigma_tilde != zeroth.sigma_tilde())
        throw std::invalid_argument("compute_tau_expansion: params/zeroth mismatch");
    return TauExpansion(zeroth);
}

double residual_integral_at(const ZerothOrderSolution& zeroth, double R1, double quad_tol) {
    const double R0 = zeroth.R0();
    const double i0 = zeroth.I0_at_R0();
    const double i1 = zeroth.I1_at_R0();
    const double i2 = bessel::besseli(2, R0, zeroth.series_config());
    const bessel::SeriesConfig cfg = zeroth.series_config();

    const double integral = adaptive_simpson(
        [&](double r) {
            const double sigma1 = -bessel::besseli(0, r, cfg) * i1 / (i0 * i0) * R1;
            return (zeroth.sigma0_prime(r) * zeroth.p0_prime(r) + sigma1) * r;
        },
        0.0, R0, quad_tol);

    return R1 * i1 / i0 + 0.5 * R0 * (i0 + i2) / i0 * R1 - zeroth.sigma_tilde() * R0 * R1 +
           integral;
}

double residual_integral(const ZerothOrderSolution& zeroth, const TauExpansion& tauexp,
                         double quad_tol) {
    return residual_integral_at(zeroth, tauexp.R1(), quad_tol);
}

namespace {

// Backward characteristic through a static rescaled pressure field:
// dxi/ds = -(1/R^3) p'(xi) over a window of length tau, starting at r.
// Classical four-stage steps; returns xi(-tau).
double trace_characteristic(double r, double R, double tau, const RadialGridFunction& p_prime,
                            int substeps) {
    if (tau == 0.0) return r;
    const double inv_R3 = 1.0 / (R * R * R);
    const double ds = -tau / substeps;
    double xi = r;
    auto rhs = [&](double x) { return -inv_R3 * p_prime(x); };
    for (int k = 0; k < substeps; ++k) {
        const double k1 = rhs(xi);
        const double k2 = rhs(xi + 0.5 * ds * k1);
        const double k3 = rhs(xi + 0.5 * ds * k2);
        const double k4 = rhs(xi + ds * k3);
        xi += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(xi >= -1e-9 && xi <= 2.0 + 1e-9))
            throw ConvergenceError(
                "relax_pressure: characteristic left [0,2]; delay too large for this mu");
    }
    return std::clamp(xi, 0.0, 2.0);
}

struct IterationGrids {
    std::vector<double> p, pp, ppp;  // values, first and second derivatives
};

// One application of the pressure map at fixed R: trace characteristics on
// [0, 1], assemble the source, recover the new pressure by double radial
// integration, extend linearly to [0, 2].
IterationGrids apply_pressure_map(double R, const ModelParams& params, int N, int substeps,
                                  const RadialGridFunction& p_prime,
                                  const bessel::SeriesConfig& cfg) {
    const int half = N / 2;        // node index of r = 1
    const double h = 2.0 / N;
    const double i0R = bessel::besseli(0, R, cfg);
    const double R3 = R * R * R;

    std::vector<double> f(half + 1);
    for (int i = 0; i <= half; ++i) {
        const double r = i * h;
        const double a = trace_characteristic(r, R, params.tau, p_prime, substeps);
        f[i] = params.mu * R3 * (bessel::besseli(0, R * a, cfg) / i0R - params.sigma_tilde);
    }

    // p'(r) = -(1/r) \int_0^r f(y) y dy, p'(0) = 0
    std::vector<double> fy(half + 1);
    for (int i = 0; i <= half; ++i) fy[i] = f[i] * (i * h);
    const std::vector<double> mom = cumulative_integral(fy, h);
    std::vector<double> pp(half + 1);
    pp[0] = 0.0;
    for (int i = 1; i <= half; ++i) pp[i] = -mom[i] / (i * h);

    // p(1) = 1, p(r) = 1 - \int_r^1 p'
    const std::vector<double> cum = cumulative_integral(pp, h);
    std::vector<double> p(half + 1);
    for (int i = 0; i <= half; ++i) p[i] = 1.0 - (cum[half] - cum[i]);

    std::vector<double> ppp(half + 1);
    ppp[0] = -0.5 * f[0];
    for (int i = 1; i <= half; ++i) ppp[i] = -f[i] - pp[i] / (i * h);

    IterationGrids out;
    out.p.resize(N + 1);
    out.pp.resize(N + 1);
    out.ppp.resize(N + 1);
    for (int i = 0; i <= half; ++i) {
        out.p[i] = p[i];
        out.pp[i] = pp[i];
        out.ppp[i] = ppp[i];
    }
    for (int i = half + 1; i <= N; ++i) {
        out.p[i] = p[half] + pp[half] * (i * h - 1.0);
        out.pp[i] = pp[half];
        out.ppp[i] = 0.0;
    }
    return out;
}

void check_options(const FixedPointOptions& opts) {
    if (opts.grid_size < 128 || opts.grid_size % 2 != 0)
        throw std::invalid_argument("FixedPointOptions: grid_size must be even and >= 128");
    if (opts.characteristic_substeps < 8)
        throw std::invalid_argument("FixedPointOptions: characteristic_substeps must be >= 8");
    if (!(opts.tol > 0.0) || !(opts.outer_tol > 0.0))
        throw std::invalid_argument("FixedPointOptions: tolerances must be positive");
}

}  // namespace

PressureRelaxation relax_pressure(double R, const ModelParams& params,
                                  const FixedPointOptions& opts,
                                  const bessel::SeriesConfig& cfg) {
    params.validate();
    check_options(opts);
    const int N = opts.grid_size;

    IterationGrids cur;
    cur.p.assign(N + 1, opts.initial_pressure);
    cur.pp.assign(N + 1, 0.0);
    cur.ppp.assign(N + 1, 0.0);

    double prev_dist = -1.0;
    double ratio = 0.0;
    int iter = 0;
    const double ratio_floor = 1e3 * opts.tol;  // below this, ratios are roundoff noise
    for (; iter < opts.max_iter; ++iter) {
        RadialGridFunction p_prime(2.0, cur.pp, cur.ppp);
        IterationGrids next = apply_pressure_map(R, params, N, opts.characteristic_substeps,
                                                 p_prime, cfg);
        double dist = 0.0;
        for (int i = 0; i <= N; ++i) dist = std::max(dist, std::fabs(next.p[i] - cur.p[i]));
        cur = std::move(next);
        if (prev_dist > ratio_floor && dist > 0.0) {
            ratio = std::max(ratio, dist / prev_dist);
            if (dist / prev_dist >= 1.0)
                throw ConvergenceError("relax_pressure: map is not contracting (ratio " +
                                       std::to_string(dist / prev_dist) +
                                       "); delay too large");
        }
        prev_dist = dist;
        if (dist < opts.tol) {
            ++iter;
            break;
        }
    }
    if (prev_dist >= opts.tol)
        throw ConvergenceError("relax_pressure: no convergence in max_iter iterations");

    PressureRelaxation out;
    out.p = RadialGridFunction(2.0, cur.p, cur.pp);
    out.p_prime = RadialGridFunction(2.0, cur.pp, cur.ppp);
    out.iterations = iter;
    out.contraction_estimate = ratio;
    return out;
}

double stationarity_mismatch(double R, const ModelParams& params,
                             const PressureRelaxation& relaxed, const FixedPointOptions& opts,
                             const bessel::SeriesConfig& cfg) {
    const double i0R = bessel::besseli(0, R, cfg);
    return adaptive_simpson(
        [&](double r) {
            const double a = trace_characteristic(r, R, params.tau, relaxed.p_prime,
                                                  opts.characteristic_substeps);
            return (bessel::besseli(0, R * a, cfg) / i0R - params.sigma_tilde) * r;
        },
        0.0, 1.0, opts.outer_tol * 0.1);
}

FixedPointSolution fixed_point_solve(const ModelParams& params, const FixedPointOptions& opts,
                                     const bessel::SeriesConfig& cfg) {
    params.validate();
    check_options(opts);

    const double RS = solve_R0(params.sigma_tilde, 1e-13, cfg);
    double lo = 0.5 * RS, hi = 1.5 * RS;

    PressureRelaxation relaxed;
    auto F = [&](double R) {
        relaxed = relax_pressure(R, params, opts, cfg);
        return stationarity_mismatch(R, params, relaxed, opts, cfg);
    };

    double Flo = F(lo);
    double Fhi = F(hi);
    if (!(Flo > 0.0) || !(Fhi < 0.0))
        throw std::range_error("fixed_point_solve: bracket [R_S/2, 3R_S/2] failed to straddle");

    double mid = 0.5 * (lo + hi), Fmid = 0.0;
    for (int it = 0; it < 64; ++it) {
        mid = 0.5 * (lo + hi);
        Fmid = F(mid);
        if (std::fabs(Fmid) < opts.outer_tol && (hi - lo) < 1e-12 * RS) break;
        (Fmid > 0.0 ? lo : hi) = mid;
    }

    // final relaxation at the root, twice for the contraction data
    PressureRelaxation final_relax = relax_pressure(mid, params, opts, cfg);
    FixedPointSolution sol;
    sol.R_star = mid;
    sol.p_grid = final_relax.p;
    sol.p_prime_grid = final_relax.p_prime;
    sol.iterations = final_relax.iterations;
    sol.contraction_estimate = final_relax.contraction_estimate;
    return sol;
}

}  // namespace fbtumor::stationary
