#include "fbtumor/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "fbtumor/errors.hpp"

namespace fbtumor {

std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    if (n < 4) throw std::invalid_argument("cumulative_integral: need at least 4 samples");
    std::vector<double> c(n, 0.0);
    const double w = h / 24.0;
    // first and last cells use one-sided cubics, interior cells the
    // centered four-point rule; all are exact for cubic integrands
    c[1] = c[0] + w * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]);
    for (std::size_t i = 1; i + 2 < n; ++i)
        c[i + 1] = c[i] + w * (-f[i - 1] + 13 * f[i] + 13 * f[i + 1] - f[i + 2]);
    c[n - 1] = c[n - 2] + w * (f[n - 4] - 5 * f[n - 3] + 19 * f[n - 2] + 9 * f[n - 1]);
    return c;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0)
        throw ConvergenceError("adaptive_simpson: recursion depth exhausted");
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace fbtumor
