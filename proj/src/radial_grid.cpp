#include "fbtumor/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbtumor {

std::vector<double> finite_difference_slopes(const std::vector<double>& values, double h) {
    const std::size_t n = values.size();
    if (n < 5) throw std::invalid_argument("finite_difference_slopes: need at least 5 samples");
    std::vector<double> s(n);
    const double c = 1.0 / (12.0 * h);
    s[0] = c * (-25 * values[0] + 48 * values[1] - 36 * values[2] + 16 * values[3] - 3 * values[4]);
    s[1] = c * (-3 * values[0] - 10 * values[1] + 18 * values[2] - 6 * values[3] + values[4]);
    for (std::size_t i = 2; i + 2 < n; ++i)
        s[i] = c * (values[i - 2] - 8 * values[i - 1] + 8 * values[i + 1] - values[i + 2]);
    s[n - 2] = -c * (-3 * values[n - 1] - 10 * values[n - 2] + 18 * values[n - 3] -
                     6 * values[n - 4] + values[n - 5]);
    s[n - 1] = -c * (-25 * values[n - 1] + 48 * values[n - 2] - 36 * values[n - 3] +
                     16 * values[n - 4] - 3 * values[n - 5]);
    return s;
}

void RadialGridFunction::check(double r_max, std::size_t n) const {
    if (!(r_max > 0.0)) throw std::invalid_argument("RadialGridFunction: r_max must be positive");
    if (n < 64) throw std::invalid_argument("RadialGridFunction: need at least 64 samples");
}

RadialGridFunction::RadialGridFunction(double r_max, std::vector<double> values)
    : r_max_(r_max), values_(std::move(values)) {
    check(r_max, values_.size());
    h_ = r_max_ / double(values_.size() - 1);
    slopes_ = finite_difference_slopes(values_, h_);
}

RadialGridFunction::RadialGridFunction(double r_max, std::vector<double> values,
                                       std::vector<double> slopes)
    : r_max_(r_max), values_(std::move(values)), slopes_(std::move(slopes)) {
    check(r_max, values_.size());
    if (slopes_.size() != values_.size())
        throw std::invalid_argument("RadialGridFunction: slopes/values size mismatch");
    h_ = r_max_ / double(values_.size() - 1);
}

namespace {

// node snap window: r/h lands a couple of ulp off an integer at the nodes
bool at_node(double u, std::size_t m, std::size_t& node) {
    const double rounded = std::round(u);
    if (std::fabs(u - rounded) > 8e-15 * std::max(1.0, u)) return false;
    if (rounded < 0.0 || rounded > double(m)) return false;
    node = std::size_t(rounded);
    return true;
}

}  // namespace

double RadialGridFunction::operator()(double r) const {
    const std::size_t m = values_.size() - 1;
    const double u = r / h_;
    std::size_t node;
    if (at_node(u, m, node)) return values_[node];
    std::size_t i = (u <= 0.0) ? 0 : std::min<std::size_t>(std::size_t(u), m - 1);
    const double t = u - double(i);
    const double y0 = values_[i], y1 = values_[i + 1];
    const double d0 = slopes_[i] * h_, d1 = slopes_[i + 1] * h_;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * d1;
}

double RadialGridFunction::derivative(double r) const {
    const std::size_t m = values_.size() - 1;
    const double u = r / h_;
    std::size_t node;
    if (at_node(u, m, node)) return slopes_[node];
    std::size_t i = (u <= 0.0) ? 0 : std::min<std::size_t>(std::size_t(u), m - 1);
    const double t = u - double(i);
    const double y0 = values_[i], y1 = values_[i + 1];
    const double d0 = slopes_[i] * h_, d1 = slopes_[i + 1] * h_;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * d0 + (-6 * t2 + 6 * t) * y1 +
            (3 * t2 - 2 * t) * d1) /
           h_;
}

double RadialGridFunction::max_abs_value() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

double RadialGridFunction::max_abs_slope() const {
    double m = 0.0;
    for (double v : slopes_) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace fbtumor
