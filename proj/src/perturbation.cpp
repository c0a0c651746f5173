#include "fbtumor/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fbtumor/errors.hpp"

namespace fbtumor::perturbation {

namespace {

// I_n(r)/r with the series limit at r = 0 (1/2 for n = 1, 0 for n >= 2).
double in_over_r(int n, double r, const bessel::SeriesConfig& cfg) {
    if (r == 0.0) return n == 1 ? 0.5 : 0.0;
    return bessel::besseli(n, r, cfg) / r;
}

// I_n'(r) without the route cross-check (hot path).
double in_prime(int n, double r, const bessel::SeriesConfig& cfg) {
    return bessel::besseli(n + 1, r, cfg) + n * in_over_r(n, r, cfg);
}

double spectral_bracket(int n, double R0, const bessel::SeriesConfig& cfg) {
    const double i0 = bessel::besseli(0, R0, cfg);
    const double i1 = bessel::besseli(1, R0, cfg);
    const double in = bessel::besseli(n, R0, cfg);
    const double in1 = bessel::besseli(n + 1, R0, cfg);
    return 1.0 - 2.0 * i1 / (R0 * i0) - i1 * in1 / (i0 * in);
}

}  // namespace

double growth_rate(int n, const ModelParams& params, double R0,
                   const bessel::SeriesConfig& cfg) {
    if (n < 0) throw std::invalid_argument("growth_rate: n must be >= 0");
    if (!(R0 > 0.0)) throw std::invalid_argument("growth_rate: R0 must be positive");
    return params.mu * spectral_bracket(n, R0, cfg) -
           double(n) * double(n * n - 1) / (R0 * R0 * R0);
}

double mode_threshold(int n, double R0, const bessel::SeriesConfig& cfg) {
    if (n < 0) throw std::invalid_argument("mode_threshold: n must be >= 0");
    if (n <= 1) return std::numeric_limits<double>::infinity();
    const double bracket = spectral_bracket(n, R0, cfg);
    if (!(bracket > 0.0))
        throw InvariantViolation("mode_threshold: spectral bracket must be positive for n >= 2");
    return double(n) * double(n * n - 1) / (R0 * R0 * R0) / bracket;
}

double mu_star(double R0, const bessel::SeriesConfig& cfg) {
    const double mu2 = mode_threshold(2, R0, cfg);
    for (int n = 3; n <= 32; ++n)
        if (mode_threshold(n, R0, cfg) < mu2)
            throw InvariantViolation("mu_star: minimum threshold not attained at n = 2");
    return mu2;
}

double rho0_trajectory(const ModeState& mode, const ModelParams& params, double R0, double t,
                       const bessel::SeriesConfig& cfg) {
    return mode.rho0_init * std::exp(growth_rate(mode.n, params, R0, cfg) * t);
}

ModeZerothFields mode_zeroth_fields(int n, const ModelParams& params,
                                    const ZerothOrderSolution& zeroth, double rho) {
    if (n < 0) throw std::invalid_argument("mode_zeroth_fields: n must be >= 0");
    const bessel::SeriesConfig cfg = zeroth.series_config();
    const double R0 = zeroth.R0();
    const double mu = params.mu;
    const double i0 = zeroth.I0_at_R0();
    const double i1 = zeroth.I1_at_R0();
    const double inR0 = bessel::besseli(n, R0, cfg);

    ModeZerothFields f;
    f.n = n;
    f.rho = rho;
    const double wscale = -i1 / (i0 * inR0) * rho;
    f.C1 = (double(n * n - 1) / (R0 * R0) - mu * i1 / i0) / std::pow(R0, n) * rho;
    const double C1 = f.C1;

    f.w0 = [n, wscale, cfg](double r) { return wscale * bessel::besseli(n, r, cfg); };
    f.q0 = [n, C1, mu, wscale, cfg](double r) {
        return C1 * std::pow(r, n) - mu * wscale * bessel::besseli(n, r, cfg);
    };
    f.q0_prime = [n, C1, mu, wscale, cfg](double r) {
        const double rn1 = n == 0 ? 0.0 : double(n) * std::pow(r, n - 1);
        return C1 * rn1 - mu * wscale * in_prime(n, r, cfg);
    };

    f.q0_prime_at_R0 = f.q0_prime(R0);
    // I_n'' from the modified Bessel equation
    const double inp = in_prime(n, R0, cfg);
    const double inpp = (1.0 + double(n) * double(n) / (R0 * R0)) * inR0 - inp / R0;
    const double rn2 = n < 2 ? 0.0 : double(n) * double(n - 1) * std::pow(R0, n - 2);
    f.q0_second_at_R0 = C1 * rn2 - mu * wscale * inpp;
    return f;
}

namespace {

struct Tridiagonal {
    std::vector<double> lower, diag, upper, rhs;

    std::vector<double> solve() const {
        const std::size_t m = diag.size();
        std::vector<double> c(m), d(m), x(m);
        c[0] = upper[0] / diag[0];
        d[0] = rhs[0] / diag[0];
        for (std::size_t i = 1; i < m; ++i) {
            const double denom = diag[i] - lower[i] * c[i - 1];
            if (denom == 0.0) throw ConvergenceError("solve_Ln_bvp: singular discrete system");
            c[i] = upper[i] / denom;
            d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
        }
        x[m - 1] = d[m - 1];
        for (std::size_t i = m - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
        return x;
    }
};

}  // namespace

ModeBvpResult solve_Ln_bvp(int n, const std::function<double(double)>& rhs,
                           double boundary_value, double R0, int grid_size) {
    if (n < 0) throw std::invalid_argument("solve_Ln_bvp: n must be >= 0");
    if (!(R0 > 0.0)) throw std::invalid_argument("solve_Ln_bvp: R0 must be positive");
    if (grid_size < 64) throw std::invalid_argument("solve_Ln_bvp: grid_size must be >= 64");

    const int M = grid_size;
    const double h = R0 / M;
    Tridiagonal sys;
    sys.lower.assign(M + 1, 0.0);
    sys.diag.assign(M + 1, 0.0);
    sys.upper.assign(M + 1, 0.0);
    sys.rhs.assign(M + 1, 0.0);

    if (n == 0) {
        // -2u''(0) = b(0) with the symmetry condition u'(0) = 0
        sys.diag[0] = 4.0 / (h * h);
        sys.upper[0] = -4.0 / (h * h);
        sys.rhs[0] = rhs(0.0);
    } else {
        sys.diag[0] = 1.0;
        sys.rhs[0] = 0.0;
    }
    for (int i = 1; i < M; ++i) {
        const double r = i * h;
        sys.lower[i] = -1.0 / (h * h) + 1.0 / (2.0 * h * r);
        sys.diag[i] = 2.0 / (h * h) + double(n) * double(n) / (r * r);
        sys.upper[i] = -1.0 / (h * h) - 1.0 / (2.0 * h * r);
        sys.rhs[i] = rhs(r);
    }
    sys.diag[M] = 1.0;
    sys.rhs[M] = boundary_value;

    const std::vector<double> u = sys.solve();

    double scale = std::fabs(boundary_value);
    for (int i = 0; i <= M; ++i) scale = std::max(scale, std::fabs(sys.rhs[i]));
    double residual = 0.0;
    for (int i = 1; i < M; ++i) {
        const double res =
            sys.lower[i] * u[i - 1] + sys.diag[i] * u[i] + sys.upper[i] * u[i + 1] - sys.rhs[i];
        residual = std::max(residual, std::fabs(res));
    }
    residual /= std::max(scale, 1e-300);

    ModeBvpResult out;
    out.solution = RadialGridFunction(R0, u);
    out.boundary_derivative = (3.0 * u[M] - 4.0 * u[M - 1] + u[M - 2]) / (2.0 * h);
    out.residual = residual;
    return out;
}

ModeBvpResult solve_Ln_bvp(int n, const RadialGridFunction& rhs, double boundary_value,
                           double R0) {
    if (std::fabs(rhs.r_max() - R0) > 1e-12 * std::max(1.0, R0))
        throw std::invalid_argument("solve_Ln_bvp: rhs grid must cover [0, R0]");
    return solve_Ln_bvp(
        n, [&rhs](double r) { return rhs(r); }, boundary_value, R0,
        int(rhs.size()) - 1);
}

namespace {

FirstOrderModeOde assemble_generic(int n, const ModelParams& params,
                                   const ZerothOrderSolution& zeroth,
                                   const TauExpansion& tauexp, int M) {
    const bessel::SeriesConfig cfg = zeroth.series_config();
    const double R0 = zeroth.R0();
    const double mu = params.mu;
    const double i0 = zeroth.I0_at_R0();
    const double i1 = zeroth.I1_at_R0();
    const double inR0 = bessel::besseli(n, R0, cfg);
    const double in1R0 = bessel::besseli(n + 1, R0, cfg);
    const double R1 = tauexp.R1();
    const double g = growth_rate(n, params, R0, cfg);

    const ModeZerothFields fields = mode_zeroth_fields(n, params, zeroth, 1.0);
    const double wscale = -i1 / (i0 * inR0);
    auto w0 = [&](double r) { return wscale * bessel::besseli(n, r, cfg); };
    auto w0_prime = [&](double r) { return wscale * in_prime(n, r, cfg); };

    const double beta1 = solve_Ln_bvp(
        n, [&](double r) { return mu * zeroth.sigma0_prime(r) * fields.q0_prime(r); }, 0.0, R0,
        M).boundary_derivative;
    const double beta2 = solve_Ln_bvp(
        n, [&](double r) { return mu * w0_prime(r) * zeroth.p0_prime(r); }, 0.0, R0,
        M).boundary_derivative;
    const double beta3 = solve_Ln_bvp(
        n, [&](double r) { return -mu * g * w0(r); }, 0.0, R0, M).boundary_derivative;

    // nutrient first-order correction w_n^1 = C_3 I_n(r), split by amplitude
    const double c31 = -i1 / (i0 * inR0);
    const double c30 = (i1 * in1R0 / (i0 * inR0) + double(n + 1) * i1 / (R0 * i0) - 1.0 +
                        i1 * i1 / (i0 * i0)) *
                       R1 / inR0;

    // u^(4) carries the first-order boundary condition q_n^1 + mu w_n^1 at R0
    const double u4_rho1 = double(n * n - 1) / (R0 * R0) + mu * c31 * inR0;
    const double u4_rho0 = -fields.q0_prime_at_R0 * R1 -
                           2.0 * double(n * n - 1) * R1 / (R0 * R0 * R0) + mu * c30 * inR0;
    const double u4p_rho1 = double(n) / R0 * u4_rho1;
    const double u4p_rho0 = double(n) / R0 * u4_rho0;

    const double inpR0 = in_prime(n, R0, cfg);
    const double q1p_rho1 = u4p_rho1 - mu * c31 * inpR0;
    const double q1p_rho0 = beta1 + beta2 + beta3 + u4p_rho0 - mu * c30 * inpR0;

    FirstOrderModeOde ode;
    ode.n = n;
    ode.g_n = g;
    ode.homogeneous_rate = -zeroth.p0_second_at_R0() - q1p_rho1;
    ode.forcing_coefficient = -zeroth.p0_third_at_R0() * R1 - tauexp.p1_second_at_R0() -
                              fields.q0_second_at_R0 * R1 - q1p_rho0;
    ode.w1_boundary_rho0 = c30 * inR0;
    ode.w1_boundary_rho1 = c31 * inR0;
    return ode;
}

FirstOrderModeOde assemble_n1_explicit(const ModelParams& params,
                                       const ZerothOrderSolution& zeroth,
                                       const TauExpansion& tauexp) {
    const bessel::SeriesConfig cfg = zeroth.series_config();
    const double R0 = zeroth.R0();
    const double mu = params.mu;
    const double i0 = zeroth.I0_at_R0();
    const double i1 = zeroth.I1_at_R0();
    const double i2 = bessel::besseli(2, R0, cfg);
    const double R1 = tauexp.R1();

    // particular solutions y1 = (r/2)(1 - 2 I_2), y2 = (r/4)(I_0 I_2 - I_1^2),
    // y3 = -I_1, differentiated at R0
    const double y1p = 0.5 + i2 - R0 * i1;
    const double y2p = -0.25 * i0 * i0 + 0.5 * i0 * i1 / R0 - 0.25 * i1 * i1;
    const double y3p = -i0 + i1 / R0;

    const double u1p_rho0 = -mu * mu * i1 / (R0 * i0 * i0) * y1p;
    const double u2p_rho0 = mu * mu * 2.0 / (i0 * i0) * y2p;
    const double u3p_rho0 = mu * R1 * i1 / (i0 * i0) * y3p;
    const double u3p_rho1 = -mu / i0 * y3p;

    const double C5_rho1 = -mu * i1 / (R0 * i0);
    const double C5_rho0 = mu * mu * i1 / (2.0 * R0 * i0 * i0) -
                           mu * mu * i1 * i2 / (R0 * i0 * i0) +
                           mu * mu * i1 * i1 / (2.0 * i0 * i0) - mu * mu * i2 / (2.0 * i0) +
                           mu * R1 * i1 * i1 / (R0 * i0 * i0) - mu * R1 * i2 / (R0 * i0);

    const double q1p_rho1 = C5_rho1 + u3p_rho1;
    const double q1p_rho0 = C5_rho0 + u1p_rho0 + u2p_rho0 + u3p_rho0;

    // second boundary derivative of the n = 1 zeroth-order pressure mode
    const double q10_second = mu * (-1.0 / R0 + 2.0 * i1 / (R0 * R0 * i0) + i1 / i0);

    FirstOrderModeOde ode;
    ode.n = 1;
    ode.g_n = growth_rate(1, params, R0, cfg);
    ode.homogeneous_rate = -zeroth.p0_second_at_R0() - q1p_rho1;
    ode.forcing_coefficient = -zeroth.p0_third_at_R0() * R1 - tauexp.p1_second_at_R0() -
                              q10_second * R1 - q1p_rho0;
    ode.w1_boundary_rho0 = i1 * i1 / (i0 * i0) * R1;
    ode.w1_boundary_rho1 = -i1 / i0;
    return ode;
}

}  // namespace

FirstOrderModeOde first_order_mode_ode_generic(int n, const ModelParams& params,
                                               const ZerothOrderSolution& zeroth,
                                               const TauExpansion& tauexp, int bvp_grid_size) {
    if (n < 0) throw std::invalid_argument("first_order_mode_ode: n must be >= 0");
    return assemble_generic(n, params, zeroth, tauexp, bvp_grid_size);
}

FirstOrderModeOde first_order_mode_ode(int n, const ModelParams& params,
                                       const ZerothOrderSolution& zeroth,
                                       const TauExpansion& tauexp, int bvp_grid_size) {
    if (n < 0) throw std::invalid_argument("first_order_mode_ode: n must be >= 0");
    if (n == 1) return assemble_n1_explicit(params, zeroth, tauexp);
    FirstOrderModeOde ode = assemble_generic(n, params, zeroth, tauexp, bvp_grid_size);
    if (n == 0) {
        // closed-form homogeneous coefficient for the radial mode
        const double R0 = zeroth.R0();
        const double i0 = zeroth.I0_at_R0();
        const double i1 = zeroth.I1_at_R0();
        ode.homogeneous_rate =
            -params.mu * (-1.0 + 2.0 * i1 / (R0 * i0) + i1 * i1 / (i0 * i0));
    }
    return ode;
}

double rho1_rhs(int n, double t, const ModeState& mode, const ModelParams& params,
                const ZerothOrderSolution& zeroth, const TauExpansion& tauexp,
                int bvp_grid_size) {
    const FirstOrderModeOde ode = first_order_mode_ode(n, params, zeroth, tauexp, bvp_grid_size);
    const ModeState m{n, mode.rho0_init, mode.rho1_init};
    const double rho0_t = rho0_trajectory(m, params, zeroth.R0(), t, zeroth.series_config());
    return ode.rhs(mode.rho1_init, rho0_t);
}

ModeTrajectory rho1_trajectory(int n, const ModeState& mode, const ModelParams& params,
                               const ZerothOrderSolution& zeroth, const TauExpansion& tauexp,
                               double t_end, const TrajectoryOptions& opts) {
    if (!(t_end > 0.0)) throw std::invalid_argument("rho1_trajectory: t_end must be positive");
    FirstOrderModeOde ode = first_order_mode_ode(n, params, zeroth, tauexp);
    if (opts.zero_forcing) ode.forcing_coefficient = 0.0;

    const double g = ode.g_n;
    double dt = opts.dt;
    if (dt == 0.0) dt = std::min(0.01, 0.1 / std::max(std::fabs(g), 1e-12));
    const std::size_t steps = std::size_t(std::ceil(t_end / dt));
    dt = t_end / double(steps);

    auto rho0_at = [&](double t) { return mode.rho0_init * std::exp(g * t); };
    auto rhs = [&](double t, double y) { return ode.rhs(y, rho0_at(t)); };
    auto rk4 = [&](double t, double y, double step) {
        const double k1 = rhs(t, y);
        const double k2 = rhs(t + 0.5 * step, y + 0.5 * step * k1);
        const double k3 = rhs(t + 0.5 * step, y + 0.5 * step * k2);
        const double k4 = rhs(t + step, y + step * k3);
        return y + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    ModeTrajectory traj;
    traj.times.reserve(steps + 1);
    traj.rho0.reserve(steps + 1);
    traj.rho1.reserve(steps + 1);
    double y = mode.rho1_init;
    traj.times.push_back(0.0);
    traj.rho0.push_back(mode.rho0_init);
    traj.rho1.push_back(y);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = double(k) * dt;
        const double full = rk4(t, y, dt);
        const double half = rk4(t + 0.5 * dt, rk4(t, y, 0.5 * dt), 0.5 * dt);
        if (std::fabs(full - half) > opts.stability_tol * std::max(1.0, std::fabs(half)))
            throw ConvergenceError("rho1_trajectory: step-doubling check failed; dt too large");
        y = half;
        traj.times.push_back(double(k + 1) * dt);
        traj.rho0.push_back(rho0_at(double(k + 1) * dt));
        traj.rho1.push_back(y);
    }
    return traj;
}

double fitted_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                         double tail_fraction) {
    if (times.size() != values.size() || times.size() < 4)
        throw std::invalid_argument("fitted_decay_rate: need matching series, length >= 4");
    const std::size_t start = std::size_t(double(times.size()) * (1.0 - tail_fraction));
    double st = 0, sy = 0, stt = 0, sty = 0;
    std::size_t count = 0;
    for (std::size_t i = start; i < times.size(); ++i) {
        const double a = std::fabs(values[i]);
        if (a < 1e-300) continue;
        const double ly = std::log(a);
        st += times[i];
        sy += ly;
        stt += times[i] * times[i];
        sty += times[i] * ly;
        ++count;
    }
    if (count < 3) throw ConvergenceError("fitted_decay_rate: series vanished in the fit window");
    const double denom = double(count) * stt - st * st;
    const double slope = (double(count) * sty - st * sy) / denom;
    return -slope;
}

}  // namespace fbtumor::perturbation
