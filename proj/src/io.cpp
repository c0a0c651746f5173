#include "fbtumor/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "fbtumor/errors.hpp"

namespace fbtumor::io {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) body_ += ',';
        body_ += header[i];
    }
    body_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::invalid_argument("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) body_ += ',';
        body_ += cells[i];
    }
    body_ += '\n';
}

void CsvWriter::add_row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(format_double(v));
    add_row(s);
}

void CsvWriter::write(const std::string& path) const { write_text(path, body_); }

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << content;
    if (!out) throw ConfigError("failed writing output file: " + path);
}

std::string grid_to_csv(const RadialGridFunction& g, const std::string& value_name) {
    CsvWriter csv({"r", value_name});
    for (std::size_t i = 0; i < g.size(); ++i)
        csv.add_row(std::vector<double>{g.node(i), g.values()[i]});
    return csv.str();
}

std::string identity_report_to_json(const bessel::IdentityReport& rep) {
    nlohmann::json j;
    j["recurrence_down_residual"] = rep.recurrence_down_residual;
    j["recurrence_up_residual"] = rep.recurrence_up_residual;
    j["three_term_residual"] = rep.three_term_residual;
    j["weighted_derivative_residual"] = rep.weighted_derivative_residual;
    j["product_series_residual"] = rep.product_series_residual;
    j["turan_inequality_holds"] = rep.turan_inequality_holds;
    j["lower_product_bound_holds"] = rep.lower_product_bound_holds;
    j["monotone_in_x"] = rep.monotone_in_x;
    j["all_pass"] = rep.all_pass();
    return j.dump(2) + "\n";
}

std::string fixed_point_to_json(const stationary::FixedPointSolution& sol) {
    nlohmann::json j;
    j["R_star"] = sol.R_star;
    j["iterations"] = sol.iterations;
    j["contraction_estimate"] = sol.contraction_estimate;
    j["grid"]["r_max"] = sol.p_grid.r_max();
    j["grid"]["p"] = sol.p_grid.values();
    j["grid"]["dp_dr"] = sol.p_prime_grid.values();
    return j.dump(2) + "\n";
}

std::string zeroth_order_to_json(const stationary::ZerothOrderSolution& z,
                                 const stationary::TauExpansion& t) {
    nlohmann::json j;
    j["R0"] = z.R0();
    j["mu"] = z.mu();
    j["sigma_tilde"] = z.sigma_tilde();
    j["p0_second_at_R0"] = z.p0_second_at_R0();
    j["p0_third_at_R0"] = z.p0_third_at_R0();
    j["R1"] = t.R1();
    j["A"] = t.A_value();
    j["B"] = t.B_value();
    j["p1_second_at_R0"] = t.p1_second_at_R0();
    return j.dump(2) + "\n";
}

}  // namespace fbtumor::io
