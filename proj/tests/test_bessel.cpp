#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fbtumor/bessel.hpp"
#include "fbtumor/errors.hpp"

using namespace fbtumor;
using namespace fbtumor::bessel;

namespace {

// Independent long-double series oracle, fixed 80-term truncation.
long double besseli_oracle(int n, long double x) {
    long double term = std::pow(x / 2.0L, n);
    for (int k = 1; k <= n; ++k) term /= k;
    long double sum = term;
    const long double q = x * x / 4.0L;
    for (int k = 0; k < 80; ++k) {
        term *= q / ((long double)(k + 1) * (long double)(n + k + 1));
        sum += term;
    }
    return sum;
}

std::vector<double> dense_grid(double lo, double hi, int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * (i + 1) / double(count);
    return g;
}

}  // namespace

TEST_CASE("series values at the origin") {
    CHECK(besseli(0, 0.0) == 1.0);
    CHECK(besseli(3, 0.0) == 0.0);
}

TEST_CASE("series value against fixed-truncation oracle") {
    CHECK(besseli(1, 2.0) == doctest::Approx(double(besseli_oracle(1, 2.0L))).epsilon(1e-14));
    // frozen from an independent 40-digit evaluation
    CHECK(besseli(1, 2.0) == doctest::Approx(1.590636854637329).epsilon(1e-14));
    CHECK(besseli(0, 1.0) == doctest::Approx(1.266065877752008).epsilon(1e-14));
    for (int n : {0, 1, 2, 5, 8})
        for (double x : {0.3, 1.0, 4.0, 9.5})
            CHECK(besseli(n, x) ==
                  doctest::Approx(double(besseli_oracle(n, x))).epsilon(1e-14));
}

TEST_CASE("derivative routes and limits") {
    for (double x : dense_grid(0.0, 10.0, 17))
        CHECK(besseli_prime(0, x) == doctest::Approx(besseli(1, x)).epsilon(1e-14));
    CHECK(besseli_prime(1, 0.0) == 0.5);
    CHECK(besseli_prime(0, 0.0) == 0.0);
    CHECK(besseli_prime(4, 0.0) == 0.0);

    // central finite difference oracle, step 1e-6
    const double h = 1e-6;
    const double fd = (besseli(2, 3.0 + h) - besseli(2, 3.0 - h)) / (2 * h);
    CHECK(besseli_prime(2, 3.0) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("identity report on the coarse grid") {
    const IdentityReport rep = verify_identities({0.5, 1.0, 2.0, 5.0}, 5);
    CHECK(rep.recurrence_down_residual < 1e-12);
    CHECK(rep.recurrence_up_residual < 1e-12);
    CHECK(rep.three_term_residual < 1e-12);
    CHECK(rep.turan_inequality_holds);
    CHECK(rep.lower_product_bound_holds);
    CHECK(rep.monotone_in_x);
    CHECK(rep.all_pass());

    const double x = 1.0;
    const double res =
        std::fabs(besseli(0, x) - besseli(2, x) - 2.0 / x * besseli(1, x));
    CHECK(res < 1e-13);

    CHECK(besseli(1, x) * besseli(1, x) > besseli(0, x) * besseli(2, x));
}

TEST_CASE("identity suite over 200 points in (0, 10]") {
    const IdentityReport rep = verify_identities(dense_grid(0.0, 10.0, 200), 8);
    CHECK(rep.three_term_residual < 1e-12);
    CHECK(rep.recurrence_down_residual < 1e-12);
    CHECK(rep.recurrence_up_residual < 1e-12);
    CHECK(rep.weighted_derivative_residual < 1e-10);
    CHECK(rep.product_series_residual < 1e-12);
    CHECK(rep.turan_inequality_holds);
    CHECK(rep.lower_product_bound_holds);
    CHECK(rep.monotone_in_x);
}

TEST_CASE("pseudo-random recurrence property") {
    // deterministic LCG over (n, x) pairs
    unsigned long long state = 88172645463325252ull;
    auto next = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return double(state % 1000000) / 1000000.0;
    };
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + int(next() * 8);
        const double x = 1e-3 + next() * 9.999;
        const double res = std::fabs(besseli(n - 1, x) - besseli(n + 1, x) -
                                     2.0 * n / x * besseli(n, x));
        CHECK(res < 1e-12);
    }
}

TEST_CASE("domain and convergence errors") {
    CHECK_THROWS_AS(besseli(0, 31.0), std::domain_error);
    CHECK_THROWS_AS(besseli(0, -1.0), std::domain_error);
    CHECK_THROWS_AS(besseli(-1, 1.0), std::invalid_argument);

    SeriesConfig tight;
    tight.max_terms = 30;
    CHECK_THROWS_AS(besseli(0, 29.0, tight), ConvergenceError);

    SeriesConfig bad;
    bad.max_terms = 10;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SeriesConfig{};
    bad.term_tolerance = 1e-6;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SeriesConfig{};
    bad.argument_cap = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK_THROWS_AS(verify_identities({}, 5), std::invalid_argument);
    CHECK_THROWS_AS(verify_identities({1.0}, 1), std::invalid_argument);
}

TEST_CASE("truncation criterion leaves relative tail below tolerance") {
    SeriesConfig cfg;
    cfg.term_tolerance = 1e-10;
    // compare against the default (tighter) evaluation
    for (double x : {0.5, 2.0, 8.0})
        CHECK(besseli(2, x, cfg) == doctest::Approx(besseli(2, x)).epsilon(1e-9));
}
