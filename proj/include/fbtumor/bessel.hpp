#pragma once

#include <vector>

namespace fbtumor::bessel {

// Controls truncation of the power series for I_n.
struct SeriesConfig {
    int max_terms = 400;
    double term_tolerance = 1e-16;  // relative size of the first omitted term
    double argument_cap = 30.0;     // largest accepted x

    void validate() const;  // throws std::invalid_argument
};

// Modified Bessel function I_n(x) of integer order n >= 0, evaluated by its
// power series.  Throws std::domain_error outside [0, argument_cap] and
// ConvergenceError if the series does not meet the tolerance in max_terms.
double besseli(int n, double x, const SeriesConfig& cfg = {});

// Extended-precision evaluation backing the identity checks, where the
// residual of interest sits below double rounding of O(10^3) values.
long double besseli_ext(int n, long double x, const SeriesConfig& cfg = {});

// I_n'(x).  For n >= 1 both recurrence routes
//   I_n' = I_{n-1} - (n/x) I_n   and   I_n' = I_{n+1} + (n/x) I_n
// are evaluated; they must agree to 1e-12 relative and their average is
// returned.  For n = 0 returns I_1(x).  x = 0 is resolved by termwise
// series differentiation (1/2 for n = 1, 0 otherwise).
double besseli_prime(int n, double x, const SeriesConfig& cfg = {});

// Product I_m(x) I_n(x) summed directly as a single power series.
double besseli_product_series(int m, int n, double x, const SeriesConfig& cfg = {});

// Residuals/satisfaction of the identities the model relies on, maximised
// over a grid of arguments and orders 1..n_max.
struct IdentityReport {
    // |I_n' + (n/x) I_n - I_{n-1}|, n >= 1
    double recurrence_down_residual = 0.0;
    // |I_n' - (n/x) I_n - I_{n+1}|, n >= 0
    double recurrence_up_residual = 0.0;
    // |I_{n-1} - I_{n+1} - (2n/x) I_n|, n >= 1
    double three_term_residual = 0.0;
    // |d/dx(x^{n+1} I_{n+1}) - x^{n+1} I_n| / max(1, |x^{n+1} I_n|),
    // derivative taken by five-point finite differences
    double weighted_derivative_residual = 0.0;
    // |product series - I_m I_n| / max(1, |I_m I_n|), m,n <= n_max
    double product_series_residual = 0.0;
    bool turan_inequality_holds = true;       // I_{n-1} I_{n+1} < I_n^2
    bool lower_product_bound_holds = true;    // I_{n-1} I_{n+1} > I_n^2 - (2/x) I_n I_{n+1}
    bool monotone_in_x = true;                // I_n strictly increasing along the grid

    bool all_pass(double recurrence_tol = 1e-12, double derivative_tol = 1e-10) const;
};

// Evaluates the report over x_grid (entries in (0, argument_cap]) for orders
// up to n_max (>= 2).  Throws std::invalid_argument on an empty or
// out-of-range grid.
IdentityReport verify_identities(const std::vector<double>& x_grid, int n_max,
                                 const SeriesConfig& cfg = {});

}  // namespace fbtumor::bessel
