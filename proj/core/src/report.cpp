#include "varstop/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace varstop {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string csv_header() {
    return "x,case,V,rule_kind,a,b,z_lo,z_hi,p_star,c_star,duality_gap,"
           "mean_check,error";
}

namespace {

std::string cell(const std::optional<double>& v) {
    return v ? format_number(*v) : "";
}

} // namespace

std::string csv_row(const SolveRow& row) {
    std::ostringstream os;
    os << format_number(row.x) << ',' << row.case_name << ',' << cell(row.value)
       << ',' << row.rule_kind << ',' << cell(row.a) << ',' << cell(row.b)
       << ',' << cell(row.z_lo) << ',' << cell(row.z_hi) << ','
       << cell(row.p_star) << ',' << cell(row.c_star) << ','
       << cell(row.duality_gap) << ',';
    if (row.mean_exempt)
        os << "exempt";
    else
        os << cell(row.mean_check);
    os << ',' << row.error;
    return os.str();
}

SolveRow row_from_solution(const VarianceSolution& sol,
                           std::optional<double> duality_gap) {
    SolveRow row;
    row.x = sol.x;
    row.case_name = regime_name(sol.classification.tag);
    row.value = sol.value;
    row.rule_kind = sol.rule.kind_name();
    switch (sol.rule.kind) {
    case StoppingRule::Kind::ExitInterval:
    case StoppingRule::Kind::WholeInterval:
        row.a = sol.rule.a;
        row.b = sol.rule.b;
        break;
    case StoppingRule::Kind::BernoulliMix:
        row.p_star = sol.rule.p;
        if (sol.rule.first &&
            sol.rule.first->kind != StoppingRule::Kind::Immediate) {
            row.a = sol.rule.first->a;
            row.b = sol.rule.first->b;
        }
        break;
    default: break;
    }
    if (sol.region) {
        row.z_lo = sol.region->z_lo;
        row.z_hi = sol.region->z_hi;
    }
    if (!std::isnan(sol.c_star)) row.c_star = sol.c_star;
    row.duality_gap = duality_gap;
    if (std::isnan(sol.diagnostics.mean_under_rule)) {
        row.mean_exempt = true;
    } else if (row.c_star) {
        row.mean_check = std::abs(sol.diagnostics.mean_under_rule - *row.c_star);
    }
    return row;
}

std::string json_log_line(const SolveRow& row) {
    nlohmann::json j;
    j["x"] = row.x;
    j["case"] = row.case_name;
    if (row.value) {
        if (std::isinf(*row.value))
            j["V"] = "inf";
        else
            j["V"] = *row.value;
    }
    j["rule_kind"] = row.rule_kind;
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
    };
    put("a", row.a);
    put("b", row.b);
    put("z_lo", row.z_lo);
    put("z_hi", row.z_hi);
    put("p_star", row.p_star);
    put("c_star", row.c_star);
    put("duality_gap", row.duality_gap);
    if (row.mean_exempt)
        j["mean_check"] = "exempt";
    else
        put("mean_check", row.mean_check);
    if (!row.error.empty()) j["error"] = row.error;
    return j.dump();
}

} // namespace varstop
