#include "fbtumor/radial_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fbtumor/errors.hpp"
#include "fbtumor/quadrature.hpp"
#include "fbtumor/stationary.hpp"

namespace fbtumor::sim {

void SimConfig::validate(const ModelParams& params) const {
    if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("SimConfig: t_end must be positive");
    if (characteristic_substeps < 8)
        throw std::invalid_argument("SimConfig: characteristic_substeps must be >= 8");
    if (profile_nodes < 64)
        throw std::invalid_argument("SimConfig: profile_nodes must be >= 64");
    if (variant == Variant::full_delay && params.tau > 0.0 && dt > params.tau / 4.0 + 1e-15)
        throw std::invalid_argument("SimConfig: dt must be <= tau/4 for the full-delay variant");
}

namespace {

// Hermite evaluation on raw uniform samples over [0, r_max]; the cubic of
// the last cell extends past r_max, covering tiny characteristic overshoot.
double hermite_eval(const std::vector<double>& y, const std::vector<double>& d, double r_max,
                    double x) {
    const std::size_t m = y.size() - 1;
    const double h = r_max / double(m);
    double u = x / h;
    std::size_t i = (u <= 0.0) ? 0 : std::min<std::size_t>(std::size_t(u), m - 1);
    const double t = u - double(i);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * d[i] * h +
           (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * d[i + 1] * h;
}

}  // namespace

DelayTrajectory::DelayTrajectory(double R_init, const ModelParams& params, const SimConfig& cfg,
                                 const bessel::SeriesConfig& bessel_cfg)
    : params_(params), cfg_(cfg), bcfg_(bessel_cfg) {
    params_.validate();
    cfg_.validate(params_);
    if (!(R_init > 0.0)) throw std::invalid_argument("DelayTrajectory: R_init must be positive");

    // align the step with the delay window so derivative breaks fall on nodes
    if (params_.tau > 0.0) {
        steps_per_tau_ = std::max<long>(4, std::lround(params_.tau / cfg_.dt));
        cfg_.dt = params_.tau / double(steps_per_tau_);
    } else {
        steps_per_tau_ = 0;
    }

    times_.push_back(0.0);
    radii_.push_back(R_init);

    if (cfg_.variant == Variant::full_delay) {
        // constant-in-time history: the pressure field on [-tau, 0] is the
        // self-consistent delayed profile at fixed radius R_init
        Profile hist;
        hist.R = R_init;
        const int K = cfg_.profile_nodes;
        const int KT = K + pad_cells();
        hist.r_max = R_init * double(KT) / double(K);
        hist.v.assign(KT + 1, 0.0);
        hist.vp.assign(KT + 1, 0.0);
        if (params_.mu > 0.0) {
            stationary::FixedPointOptions fp;
            fp.grid_size = std::max(256, 2 * K);
            if (fp.grid_size % 2 != 0) ++fp.grid_size;
            fp.characteristic_substeps = std::max(8, cfg_.characteristic_substeps);
            const stationary::PressureRelaxation relaxed =
                stationary::relax_pressure(R_init, params_, fp, bcfg_);
            const double R2 = R_init * R_init;
            for (int j = 0; j <= KT; ++j) {
                const double rhat = double(j) / double(K);  // physical r = rhat * R_init
                hist.v[j] = relaxed.p_prime(rhat) / R2;
                hist.vp[j] = relaxed.p_prime.derivative(rhat) / (R2 * R_init);
            }
        }
        const long prefill = steps_per_tau_ + 3;
        for (long j = -prefill; j <= 0; ++j) {
            Profile p = hist;
            p.step = j;
            buffer_.push_back(std::move(p));
        }
    }
    current_step_ = 0;
    rates_.push_back(stage_rate(0.0, R_init));
}

const DelayTrajectory::Profile& DelayTrajectory::profile_at_step(long j) const {
    const long first = buffer_.front().step;
    const long idx = j - first;
    if (idx < 0 || idx >= long(buffer_.size()))
        throw InvariantViolation("DelayTrajectory: history buffer underrun");
    return buffer_[std::size_t(idx)];
}

double DelayTrajectory::radius_at(double s) const {
    if (s <= 0.0 || radii_.size() < 2) return radii_.front();
    const double u = s / cfg_.dt;
    std::size_t i = std::min<std::size_t>(std::size_t(u), radii_.size() - 2);
    const double t = u - double(i);
    const double h = cfg_.dt;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * radii_[i] + (t3 - 2 * t2 + t) * rates_[i] * h +
           (-2 * t3 + 3 * t2) * radii_[i + 1] + (t3 - t2) * rates_[i + 1] * h;
}

double DelayTrajectory::eval_v(double x, double s) const {
    // four-point Lagrange in time over the stored profiles (extrapolating
    // past the newest sample during stage evaluations).  Solutions of the
    // delay equation inherit derivative kinks at multiples of tau, which the
    // step size divides exactly; stencils are kept inside one smoothness
    // window so they never interpolate across a kink.
    const long first = buffer_.front().step;
    const long last = buffer_.back().step;
    const long i = long(std::floor(s / cfg_.dt));
    long b = i - 1;
    if (steps_per_tau_ > 0 && i >= 0) {
        const long wstart = (i / steps_per_tau_) * steps_per_tau_;
        b = std::clamp(b, wstart, wstart + steps_per_tau_ - 3);
    }
    b = std::clamp(b, first, last - 3);
    double total = 0.0;
    for (long j = b; j <= b + 3; ++j) {
        double w = 1.0;
        for (long k = b; k <= b + 3; ++k)
            if (k != j) w *= (s / cfg_.dt - double(k)) / double(j - k);
        const Profile& p = profile_at_step(j);
        total += w * hermite_eval(p.v, p.vp, p.r_max, x);
    }
    return total;
}

std::vector<double> DelayTrajectory::trace_back(const std::vector<double>& r_nodes,
                                                double t_star, double bound_factor) const {
    std::vector<double> xi = r_nodes;
    if (params_.tau == 0.0) return xi;
    const int substeps = cfg_.characteristic_substeps;
    const double ds = -params_.tau / substeps;
    double s = t_star;
    for (int m = 0; m < substeps; ++m) {
        const double bound = bound_factor * radius_at(s + ds) + 1e-12;
        for (double& x : xi) {
            const double k1 = -eval_v(x, s);
            const double k2 = -eval_v(x + 0.5 * ds * k1, s + 0.5 * ds);
            const double k3 = -eval_v(x + 0.5 * ds * k2, s + 0.5 * ds);
            const double k4 = -eval_v(x + ds * k3, s + ds);
            x += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!(x >= -1e-9 && x <= bound))
                throw ConvergenceError(
                    "DelayTrajectory: characteristic exited [0, R] beyond tolerance at t=" +
                    std::to_string(t_star));
            x = std::max(x, 0.0);
        }
        s += ds;
    }
    return xi;
}

DelayTrajectory::Profile DelayTrajectory::build_profile(double t_star, double R_star) const {
    const int K = cfg_.profile_nodes;
    const int KT = K + pad_cells();  // padded past R: time stencils may probe there
    const double h = R_star / K;
    Profile p;
    p.R = R_star;
    p.r_max = KT * h;
    p.v.assign(KT + 1, 0.0);
    p.vp.assign(KT + 1, 0.0);

    std::vector<double> nodes(KT + 1);
    for (int j = 0; j <= KT; ++j) nodes[j] = j * h;
    const std::vector<double> xi =
        trace_back(nodes, t_star, 1.02 * double(KT) / double(K));
    const double R_del = params_.tau == 0.0 ? R_star : radius_at(t_star - params_.tau);
    const double i0del = bessel::besseli(0, R_del, bcfg_);
    std::vector<double> f(KT + 1);
    for (int j = 0; j <= KT; ++j)
        f[j] = params_.mu * (bessel::besseli(0, xi[j], bcfg_) / i0del - params_.sigma_tilde);

    std::vector<double> fy(KT + 1);
    for (int j = 0; j <= KT; ++j) fy[j] = f[j] * (j * h);
    const std::vector<double> mom = cumulative_integral(fy, h);
    p.v[0] = 0.0;
    for (int j = 1; j <= KT; ++j) p.v[j] = -mom[j] / (j * h);
    p.vp[0] = -0.5 * f[0];
    for (int j = 1; j <= KT; ++j) p.vp[j] = -f[j] - p.v[j] / (j * h);
    return p;
}

double DelayTrajectory::stage_rate(double t_star, double R_star) const {
    if (cfg_.variant == Variant::dropped_otau) {
        // R' = (mu/R) [ R_d I_1(R_d)/I_0(R_d) - sigma_tilde R^2/2 ], R_d = R(t - tau)
        const double R_del = params_.tau == 0.0 ? R_star : radius_at(t_star - params_.tau);
        const double ratio =
            bessel::besseli(1, R_del, bcfg_) / bessel::besseli(0, R_del, bcfg_);
        return params_.mu / R_star *
               (R_del * ratio - 0.5 * params_.sigma_tilde * R_star * R_star);
    }
    return -build_profile(t_star, R_star).v[std::size_t(cfg_.profile_nodes)];
}

void DelayTrajectory::advance() {
    const double t = double(current_step_) * cfg_.dt;
    const double dt = cfg_.dt;
    const double R = radii_.back();

    const double k1 = rates_.back();
    const double k2 = stage_rate(t + 0.5 * dt, R + 0.5 * dt * k1);
    const double k3 = stage_rate(t + 0.5 * dt, R + 0.5 * dt * k2);
    const double k4 = stage_rate(t + dt, R + dt * k3);
    const double R_next = R + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(R_next > 0.0))
        throw ConvergenceError("DelayTrajectory: radius collapsed to zero");

    double rate_next;
    if (cfg_.variant == Variant::full_delay) {
        // predictor profile extrapolates the field over (t, t+dt]; a single
        // corrector rebuild interpolates through the provisional profile,
        // which matters where the delay kinks cross that segment
        Profile accepted = build_profile(t + dt, R_next);
        accepted.step = current_step_ + 1;
        buffer_.push_back(std::move(accepted));
        Profile corrected = build_profile(t + dt, R_next);
        corrected.step = current_step_ + 1;
        rate_next = -corrected.v[std::size_t(cfg_.profile_nodes)];
        buffer_.back() = std::move(corrected);
        while (buffer_.front().step < current_step_ + 1 - steps_per_tau_ - 3)
            buffer_.pop_front();
    } else {
        rate_next = stage_rate(t + dt, R_next);
    }

    ++current_step_;
    times_.push_back(double(current_step_) * cfg_.dt);
    radii_.push_back(R_next);
    rates_.push_back(rate_next);
}

double DelayTrajectory::characteristic_endpoint_error() const {
    if (cfg_.variant != Variant::full_delay || params_.tau == 0.0) return 0.0;
    const double t = time();
    const std::vector<double> xi = trace_back({radius()}, t, 1.02);
    return std::fabs(xi[0] - radius_at(t - params_.tau));
}

double DelayTrajectory::mass_balance() const {
    return radius() * radius_rate() / std::max(params_.mu, 1e-300);
}

double DelayTrajectory::characteristic_jacobian() const {
    if (params_.tau == 0.0 || cfg_.variant != Variant::full_delay) return 1.0;
    const double R = radius();
    const double dr = 1e-4 * R;
    const std::vector<double> xi = trace_back({0.5 * R - dr, 0.5 * R + dr}, time(), 1.02);
    return (xi[1] - xi[0]) / (2.0 * dr);
}

DelayTrajectory run_to_steady(double R_init, const ModelParams& params, const SimConfig& cfg,
                              const bessel::SeriesConfig& bessel_cfg) {
    DelayTrajectory traj(R_init, params, cfg, bessel_cfg);
    double blowup = cfg.blowup_radius;
    if (blowup <= 0.0)
        blowup = 10.0 * stationary::solve_R0(params.sigma_tilde, 1e-10, bessel_cfg);
    while (traj.time() < cfg.t_end) {
        traj.advance();
        if (traj.radius() > blowup)
            throw ConvergenceError(
                "run_to_steady: radius diverged past the blow-up bound (contradicts radial "
                "stability; investigate)");
        if (std::fabs(traj.radius_rate()) < cfg.steady_drift_tol) break;
    }
    return traj;
}

VariantComparison compare_variants(double R_init, const ModelParams& params,
                                   const SimConfig& cfg,
                                   const bessel::SeriesConfig& bessel_cfg) {
    if (!(params.tau > 0.0))
        throw std::invalid_argument("compare_variants: requires tau > 0");
    SimConfig full_cfg = cfg;
    full_cfg.variant = Variant::full_delay;
    SimConfig drop_cfg = cfg;
    drop_cfg.variant = Variant::dropped_otau;

    DelayTrajectory full(R_init, params, full_cfg, bessel_cfg);
    DelayTrajectory dropped(R_init, params, drop_cfg, bessel_cfg);
    VariantComparison out;
    while (full.time() < cfg.t_end) {
        full.advance();
        dropped.advance();
        out.sup_distance = std::max(out.sup_distance, std::fabs(full.radius() - dropped.radius()));
    }
    out.terminal_full = full.radius();
    out.terminal_dropped = dropped.radius();
    return out;
}

}  // namespace fbtumor::sim
