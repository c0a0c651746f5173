#include "fbtumor/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fbtumor/errors.hpp"

namespace fbtumor::bessel {

void SeriesConfig::validate() const {
    if (max_terms < 30)
        throw std::invalid_argument("SeriesConfig: max_terms must be >= 30");
    if (!(term_tolerance > 0.0) || term_tolerance > 1e-8)
        throw std::invalid_argument("SeriesConfig: term_tolerance must lie in (0, 1e-8]");
    if (!(argument_cap > 0.0))
        throw std::invalid_argument("SeriesConfig: argument_cap must be positive");
}

namespace {

long double factorial(int n) {
    long double f = 1.0L;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// Series core in extended precision; the gamma factor is accumulated by
// integer recurrence inside the term update.  The loop runs to the tighter
// of the configured tolerance and the long-double floor, so the first
// omitted term always satisfies the configured bound.
long double series_core(int n, long double x, const SeriesConfig& cfg) {
    const long double q = 0.25L * x * x;  // (x/2)^2
    long double term = std::pow(0.5L * x, (long double)n) / factorial(n);
    if (term == 0.0L) return 0.0L;
    long double sum = term;
    const long double tol = std::min((long double)cfg.term_tolerance, 1e-19L);
    for (int k = 0; k < cfg.max_terms; ++k) {
        term *= q / ((long double)(k + 1) * (long double)(n + k + 1));
        sum += term;
        if (term < tol * sum) return sum;
    }
    // the configured tolerance is the contract; the tighter floor is not
    if (term < (long double)cfg.term_tolerance * sum) return sum;
    throw ConvergenceError("besseli: series did not converge within max_terms at x=" +
                           std::to_string((double)x) + ", n=" + std::to_string(n));
}

void check_args(const char* who, int n, double x, const SeriesConfig& cfg) {
    cfg.validate();
    if (n < 0) throw std::invalid_argument(std::string(who) + ": order must be non-negative");
    if (!(x >= 0.0)) throw std::domain_error(std::string(who) + ": argument must be non-negative");
    if (x > cfg.argument_cap)
        throw std::domain_error(std::string(who) + ": argument " + std::to_string(x) +
                                " exceeds argument_cap " + std::to_string(cfg.argument_cap));
}

}  // namespace

long double besseli_ext(int n, long double x, const SeriesConfig& cfg) {
    check_args("besseli", n, (double)x, cfg);
    if (x == 0.0L) return n == 0 ? 1.0L : 0.0L;
    return series_core(n, x, cfg);
}

double besseli(int n, double x, const SeriesConfig& cfg) {
    return (double)besseli_ext(n, x, cfg);
}

double besseli_prime(int n, double x, const SeriesConfig& cfg) {
    cfg.validate();
    if (n < 0) throw std::invalid_argument("besseli_prime: order must be non-negative");
    if (x == 0.0) return n == 1 ? 0.5 : 0.0;  // termwise series limit
    if (n == 0) return besseli(1, x, cfg);

    const long double in = besseli_ext(n, x, cfg);
    const long double down = besseli_ext(n - 1, x, cfg) - (long double)n / x * in;
    const long double up = besseli_ext(n + 1, x, cfg) + (long double)n / x * in;
    const long double scale = std::max({std::fabs(down), std::fabs(up), 1e-300L});
    if (std::fabs(down - up) > 1e-12L * scale)
        throw InvariantViolation("besseli_prime: recurrence routes disagree at x=" +
                                 std::to_string(x) + ", n=" + std::to_string(n));
    return (double)(0.5L * (down + up));
}

double besseli_product_series(int m, int n, double x, const SeriesConfig& cfg) {
    cfg.validate();
    if (m < 0 || n < 0) throw std::invalid_argument("besseli_product_series: negative order");
    if (!(x >= 0.0)) throw std::domain_error("besseli_product_series: negative argument");
    if (x > cfg.argument_cap)
        throw std::domain_error("besseli_product_series: argument exceeds argument_cap");
    if (x == 0.0) return (m == 0 && n == 0) ? 1.0 : 0.0;

    const long double q = 0.25L * (long double)x * x;
    // term_0 = (x/2)^{m+n} / (m! n!)
    // ratio    q (m+n+2k+1)(m+n+2k+2) / ((k+1)(m+k+1)(n+k+1)(m+n+k+1))
    long double term = std::pow(0.5L * x, (long double)(m + n)) / (factorial(m) * factorial(n));
    long double sum = term;
    const long double tol = std::min((long double)cfg.term_tolerance, 1e-19L);
    for (int k = 0; k < cfg.max_terms; ++k) {
        const long double num = q * (long double)(m + n + 2 * k + 1) * (m + n + 2 * k + 2);
        const long double den = (long double)(k + 1) * (m + k + 1) * (n + k + 1) *
                                (long double)(m + n + k + 1);
        term *= num / den;
        sum += term;
        if (term < tol * sum) return (double)sum;
    }
    if (term < (long double)cfg.term_tolerance * sum) return (double)sum;
    throw ConvergenceError("besseli_product_series: no convergence within max_terms");
}

bool IdentityReport::all_pass(double recurrence_tol, double derivative_tol) const {
    return recurrence_down_residual < recurrence_tol && recurrence_up_residual < recurrence_tol &&
           three_term_residual < recurrence_tol &&
           weighted_derivative_residual < derivative_tol &&
           product_series_residual < recurrence_tol && turan_inequality_holds &&
           lower_product_bound_holds && monotone_in_x;
}

IdentityReport verify_identities(const std::vector<double>& x_grid, int n_max,
                                 const SeriesConfig& cfg) {
    cfg.validate();
    if (x_grid.empty()) throw std::invalid_argument("verify_identities: empty grid");
    if (n_max < 2) throw std::invalid_argument("verify_identities: n_max must be >= 2");
    for (double x : x_grid)
        if (!(x > 0.0) || x > cfg.argument_cap)
            throw std::invalid_argument("verify_identities: grid entry outside (0, argument_cap]");

    IdentityReport rep;
    std::vector<long double> prev(size_t(n_max) + 2, 0.0L);
    bool have_prev = false;
    std::vector<double> sorted = x_grid;
    std::sort(sorted.begin(), sorted.end());

    for (double xd : sorted) {
        const long double x = xd;
        std::vector<long double> I(size_t(n_max) + 2);
        for (int k = 0; k <= n_max + 1; ++k) I[size_t(k)] = besseli_ext(k, x, cfg);

        for (int n = 1; n <= n_max; ++n) {
            const long double ip = 0.5L * (I[size_t(n - 1)] + I[size_t(n + 1)]);
            rep.recurrence_down_residual = std::max<double>(
                rep.recurrence_down_residual,
                std::fabs((double)(ip + n / x * I[size_t(n)] - I[size_t(n - 1)])));
            rep.recurrence_up_residual = std::max<double>(
                rep.recurrence_up_residual,
                std::fabs((double)(ip - n / x * I[size_t(n)] - I[size_t(n + 1)])));
            rep.three_term_residual = std::max<double>(
                rep.three_term_residual,
                std::fabs((double)(I[size_t(n - 1)] - I[size_t(n + 1)] -
                                   2.0L * n / x * I[size_t(n)])));
            if (!(I[size_t(n - 1)] * I[size_t(n + 1)] < I[size_t(n)] * I[size_t(n)]))
                rep.turan_inequality_holds = false;
            if (!(I[size_t(n - 1)] * I[size_t(n + 1)] >
                  I[size_t(n)] * I[size_t(n)] - 2.0L / x * I[size_t(n)] * I[size_t(n + 1)]))
                rep.lower_product_bound_holds = false;
        }

        for (int n = 0; n <= n_max; ++n) {
            const long double h = std::min(1e-3L, x / 4.0L);
            if (x + 2 * h > (long double)cfg.argument_cap) continue;
            auto g = [&](long double y) {
                return std::pow(y, (long double)(n + 1)) * besseli_ext(n + 1, y, cfg);
            };
            const long double deriv =
                (g(x - 2 * h) - 8.0L * g(x - h) + 8.0L * g(x + h) - g(x + 2 * h)) / (12.0L * h);
            const long double target = std::pow(x, (long double)(n + 1)) * I[size_t(n)];
            const double res =
                (double)(std::fabs(deriv - target) / std::max(1.0L, std::fabs(target)));
            rep.weighted_derivative_residual = std::max(rep.weighted_derivative_residual, res);
        }

        for (int m = 0; m <= n_max; ++m)
            for (int n = m; n <= n_max; ++n) {
                const long double direct = I[size_t(m)] * I[size_t(n)];
                const long double series = besseli_product_series(m, n, xd, cfg);
                rep.product_series_residual = std::max<double>(
                    rep.product_series_residual,
                    (double)(std::fabs(series - direct) / std::max(1.0L, std::fabs(direct))));
            }

        if (have_prev)
            for (int n = 0; n <= n_max; ++n)
                if (!(I[size_t(n)] > prev[size_t(n)])) rep.monotone_in_x = false;
        prev = I;
        have_prev = true;
    }
    return rep;
}

}  // namespace fbtumor::bessel
