#pragma once

#include <string>
#include <vector>

#include "fbtumor/bessel.hpp"
#include "fbtumor/radial_grid.hpp"
#include "fbtumor/stationary.hpp"

namespace fbtumor::io {

// Fixed-width round-trippable formatting so identical inputs produce
// byte-identical files.
std::string format_double(double v);

// One CSV table: comma separators, '.' decimal, header first, LF endings.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<std::string>& cells);
    void add_row(const std::vector<double>& cells);
    std::string str() const { return body_; }
    void write(const std::string& path) const;

private:
    std::size_t columns_;
    std::string body_;
};

void write_text(const std::string& path, const std::string& content);

// (r, value) export of a grid function.
std::string grid_to_csv(const RadialGridFunction& g, const std::string& value_name = "value");

std::string identity_report_to_json(const bessel::IdentityReport& rep);
std::string fixed_point_to_json(const stationary::FixedPointSolution& sol);
std::string zeroth_order_to_json(const stationary::ZerothOrderSolution& z,
                                 const stationary::TauExpansion& t);

}  // namespace fbtumor::io
