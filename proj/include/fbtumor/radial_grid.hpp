#pragma once

#include <cstddef>
#include <vector>

namespace fbtumor {

// Samples of a radial function on a uniform grid over [0, r_max], with C^1
// piecewise-cubic Hermite interpolation.  Node values are reproduced
// exactly.  Slopes may be supplied (when the caller knows the derivative
// analytically) or are reconstructed by fourth-order finite differences.
class RadialGridFunction {
public:
    RadialGridFunction() = default;
    RadialGridFunction(double r_max, std::vector<double> values);
    RadialGridFunction(double r_max, std::vector<double> values, std::vector<double> slopes);

    double operator()(double r) const;
    double derivative(double r) const;

    double r_max() const { return r_max_; }
    double spacing() const { return h_; }
    std::size_t size() const { return values_.size(); }
    double node(std::size_t i) const { return double(i) * h_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& slopes() const { return slopes_; }

    double max_abs_value() const;
    double max_abs_slope() const;

private:
    double r_max_ = 0.0;
    double h_ = 0.0;
    std::vector<double> values_;
    std::vector<double> slopes_;

    void check(double r_max, std::size_t n) const;
};

// Fourth-order finite-difference slopes of uniformly spaced samples.
std::vector<double> finite_difference_slopes(const std::vector<double>& values, double h);

}  // namespace fbtumor
