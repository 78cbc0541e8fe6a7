#pragma once

#include "varstop/solver.hpp"

#include <optional>
#include <string>

namespace varstop {

// One emitted record of cmd_solve / cmd_sweep. Optional cells print empty.
struct SolveRow {
    double x = 0.0;
    std::string case_name;
    std::optional<double> value;
    std::string rule_kind;
    std::optional<double> a, b, z_lo, z_hi, p_star, c_star, duality_gap;
    std::optional<double> mean_check; // |E[X]-c*|
    bool mean_exempt = false;         // epsilon-family exemption
    std::string error;
};

// Fixed column order: x, case, V, rule_kind, a, b, z_lo, z_hi, p_star,
// c_star, duality_gap, mean_check, error.
std::string csv_header();
std::string csv_row(const SolveRow& row);

// 12-significant-digit formatting used everywhere in CSV output.
std::string format_number(double v);

SolveRow row_from_solution(const VarianceSolution& sol,
                           std::optional<double> duality_gap);

std::string json_log_line(const SolveRow& row);

} // namespace varstop
