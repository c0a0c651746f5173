#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fbtumor/errors.hpp"
#include "fbtumor/quadrature.hpp"
#include "fbtumor/stationary.hpp"

using namespace fbtumor;
using namespace fbtumor::stationary;

namespace {

// golden values frozen from an independent 40-digit evaluation
constexpr double kR0_half = 3.325848099017027883;      // sigma_tilde = 0.5
constexpr double kR0_03 = 6.091745996097796452;        // sigma_tilde = 0.3
constexpr double kR0_07 = 1.987967922781459643;        // sigma_tilde = 0.7
constexpr double kA_half = -15.566702148827109116;     // A(R0) at sigma_tilde = 0.5
constexpr double kB_half = -7.9379939773297298386;     // B(R0)
constexpr double kR1_half_mu1 = 0.5099342109483238893; // R1 at mu = 1
constexpr double kP1pp_half_mu1 = 0.34732864934069401441;

// five-point second derivative, h tuned so truncation and roundoff are
// both far below 1e-9
template <typename F>
double second_derivative(F&& f, double x, double h = 1e-2) {
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) /
           (12 * h * h);
}

template <typename F>
double first_derivative(F&& f, double x, double h = 1e-2) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

}  // namespace

TEST_CASE("solve_R0 golden values and monotonicity") {
    CHECK(solve_R0(0.5) == doctest::Approx(kR0_half).epsilon(1e-12));
    CHECK(solve_R0(0.3) == doctest::Approx(kR0_03).epsilon(1e-12));
    CHECK(solve_R0(0.7) == doctest::Approx(kR0_07).epsilon(1e-12));
    CHECK(solve_R0(0.3) > solve_R0(0.7));
    CHECK(solve_R0(0.999) < 0.1);

    for (double s : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        const double R = solve_R0(s);
        CHECK(std::fabs(P0(R) - 0.5 * s) < 1e-12);
    }

    CHECK_THROWS_AS(solve_R0(0.0), std::domain_error);
    CHECK_THROWS_AS(solve_R0(1.0), std::domain_error);
    // so small a threshold that the root lies beyond argument_cap
    CHECK_THROWS_AS(solve_R0(1e-4), std::range_error);
}

TEST_CASE("zeroth order closed forms") {
    ModelParams params{1.0, 0.5, 0.0, 0.0};
    const ZerothOrderSolution z = build_zeroth(params);
    const double R0 = z.R0();

    CHECK(z.sigma0(R0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(z.p0(R0) == doctest::Approx(1.0 / R0).epsilon(1e-13));

    // p0''(R0) = mu (2 I1/(R0 I0) - 1) = mu (sigma_tilde - 1)
    CHECK(z.p0_second_at_R0() == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(z.p0_third_at_R0() == doctest::Approx(-0.68112443111978591279).epsilon(1e-12));

    // radial equation residuals by finite differences, away from the axis
    for (double r : {0.5 * R0, 0.7 * R0, 0.9 * R0}) {
        const double lhs_p =
            -second_derivative([&](double x) { return z.p0(x); }, r) -
            first_derivative([&](double x) { return z.p0(x); }, r) / r;
        CHECK(std::fabs(lhs_p - params.mu * (z.sigma0(r) - params.sigma_tilde)) < 1e-9);

        const double lhs_s =
            -second_derivative([&](double x) { return z.sigma0(x); }, r) -
            first_derivative([&](double x) { return z.sigma0(x); }, r) / r;
        CHECK(std::fabs(lhs_s + z.sigma0(r)) < 1e-9);
    }

    // cached derivatives against finite differences of the evaluators
    CHECK(z.p0_second_at_R0() ==
          doctest::Approx(second_derivative([&](double x) { return z.p0(x); }, R0)).epsilon(1e-8));
    // the stationary boundary carries zero normal velocity: p0'(R0) = 0
    CHECK(std::fabs(z.p0_prime(R0)) < 1e-13);
    CHECK(std::fabs(z.p0_prime(R0) - first_derivative([&](double x) { return z.p0(x); }, R0)) <
          1e-9);
    CHECK(std::fabs(z.sigma0_prime(R0) -
                    first_derivative([&](double x) { return z.sigma0(x); }, R0)) < 1e-9);
    CHECK(z.sigma0_second(R0) ==
          doctest::Approx(second_derivative([&](double x) { return z.sigma0(x); }, R0))
              .epsilon(1e-8));
}

TEST_CASE("tau expansion signs, linearity, golden values") {
    ModelParams params{1.0, 0.5, 0.0, 0.0};
    const ZerothOrderSolution z = build_zeroth(params);
    const TauExpansion t = compute_tau_expansion(params, z);

    CHECK(t.A_value() == doctest::Approx(kA_half).epsilon(1e-12));
    CHECK(t.B_value() == doctest::Approx(kB_half).epsilon(1e-12));
    CHECK(t.A_value() < 0.0);
    CHECK(t.B_value() < 0.0);
    CHECK(t.R1() > 0.0);
    CHECK(t.R1() == doctest::Approx(kR1_half_mu1).epsilon(1e-12));
    CHECK(t.p1_second_at_R0() == doctest::Approx(kP1pp_half_mu1).epsilon(1e-12));

    // exact linearity in mu
    ModelParams doubled = params;
    doubled.mu = 2.0 * params.mu;
    const TauExpansion t2 = compute_tau_expansion(doubled, build_zeroth(doubled));
    CHECK(t2.R1() == 2.0 * t.R1());

    ModelParams zero = params;
    zero.mu = 0.0;
    const TauExpansion t0 = compute_tau_expansion(zero, build_zeroth(zero));
    CHECK(t0.R1() == 0.0);

    // p1'(0) = 0 and the cached second derivative matches finite differences
    CHECK(std::fabs(t.p1_prime(0.0)) < 1e-14);
    CHECK(t.p1_second_at_R0() ==
          doctest::Approx(first_derivative([&](double x) { return t.p1_prime(x); }, z.R0()))
              .epsilon(1e-8));

    // R1 monotone increasing in mu across a sweep
    double prev = 0.0;
    for (double mu : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        ModelParams p{mu, 0.5, 0.0, 0.0};
        const TauExpansion tt = compute_tau_expansion(p, build_zeroth(p));
        CHECK(tt.R1() > prev);
        prev = tt.R1();
    }
}

TEST_CASE("explicit first-order pressure gradient matches its integral form") {
    // p1'(r) = -(mu/r) int_0^r [ mu I1(y)/I0 (sigma y/2 - I1(y)/I0) -
    //                            I0(y) I1(R0)/I0^2 R1 ] y dy
    ModelParams params{1.3, 0.45, 0.0, 0.0};
    const ZerothOrderSolution z = build_zeroth(params);
    const TauExpansion t = compute_tau_expansion(params, z);
    const double i0 = z.I0_at_R0(), i1 = z.I1_at_R0();
    for (double r : {0.2, 0.5 * z.R0(), 0.9 * z.R0(), z.R0()}) {
        const double integral = adaptive_simpson(
            [&](double y) {
                const double b0 = bessel::besseli(0, y), b1 = bessel::besseli(1, y);
                return (params.mu * b1 / i0 * (0.5 * params.sigma_tilde * y - b1 / i0) -
                        b0 * i1 / (i0 * i0) * t.R1()) *
                       y;
            },
            0.0, r, 1e-14);
        CHECK(t.p1_prime(r) == doctest::Approx(-params.mu / r * integral).epsilon(1e-11));
    }
}

TEST_CASE("first-order integral identity") {
    ModelParams params{1.0, 0.5, 0.0, 0.0};
    const ZerothOrderSolution z = build_zeroth(params);
    const TauExpansion t = compute_tau_expansion(params, z);

    CHECK(std::fabs(residual_integral(z, t)) < 1e-8);
    CHECK(std::fabs(residual_integral_at(z, 1.1 * t.R1())) > 1e-4);

    ModelParams zero = params;
    zero.mu = 0.0;
    const ZerothOrderSolution z0 = build_zeroth(zero);
    const TauExpansion t0 = compute_tau_expansion(zero, z0);
    CHECK(residual_integral(z0, t0) == 0.0);
}

TEST_CASE("property: correction signs hold across random parameters") {
    // xorshift-driven sweep over (mu, sigma_tilde)
    unsigned long long state = 2463534242ull;
    auto next = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return double(state % 1000000) / 1000000.0;
    };
    for (int trial = 0; trial < 60; ++trial) {
        const double sigma = 0.15 + 0.7 * next();
        const double mu = 0.1 + 4.0 * next();
        ModelParams p{mu, sigma, 0.0, 0.0};
        const ZerothOrderSolution z = build_zeroth(p);
        const TauExpansion t = compute_tau_expansion(p, z);
        CHECK(t.A_value() < 0.0);
        CHECK(t.B_value() < 0.0);
        CHECK(t.R1() > 0.0);
        CHECK(std::fabs(residual_integral(z, t)) < 1e-8);
    }
}

TEST_CASE("parameter validation") {
    ModelParams bad{1.0, 1.5, 0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ModelParams{1.0, 0.5, -0.1, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ModelParams{1.0, 0.5, 0.0, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
