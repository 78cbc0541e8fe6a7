#pragma once

#include "varstop/diffusion.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace varstop {

struct McBlock {
    std::uint64_t seed = 12345;
    std::uint64_t n = 100000;
    int workers = 4;
    double epsilon = 1e-3; // instantiation tolerance for epsilon families
};

struct ToleranceBlock {
    double mean_check_rel = 1e-8; // |E[X]-c*| <= rel * (1+|c*|)
    double verify_z_gate = 4.0;
};

// Parsed run configuration: one diffusion, a start point or grid, MC
// settings and output path.
struct RunConfig {
    std::string diffusion_kind;
    DiffusionSpec diffusion;
    std::optional<double> x;
    std::vector<double> grid; // explicit grid from the config
    int grid_n = 0;           // requested size for a generated grid
    McBlock mc;
    ToleranceBlock tolerances;
    std::string out_path;
};

RunConfig load_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// The grid actually used by sweep: explicit grid if given, otherwise n
// compactified interior points.
std::vector<double> effective_grid(const RunConfig& cfg, int fallback_n = 100);

} // namespace varstop
