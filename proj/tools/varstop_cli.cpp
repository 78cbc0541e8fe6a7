// varstop: classify, solve, sweep, verify and dual-solve variance stopping
// problems for one-dimensional diffusions given by their scale function.

#include "varstop/config.hpp"
#include "varstop/errors.hpp"
#include "varstop/game.hpp"
#include "varstop/montecarlo.hpp"
#include "varstop/report.hpp"
#include "varstop/solver.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace varstop;

struct CliOverrides {
    std::string config_path;
    std::optional<double> x;
    std::optional<int> grid_n;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("--config", o.config_path, "configuration file (JSON)")
        ->required();
    cmd->add_option("--x", o.x, "start state (overrides config)");
    cmd->add_option("--grid", o.grid_n, "sweep grid size (overrides config)");
    cmd->add_option("--seed", o.seed, "Monte-Carlo seed");
    cmd->add_option("--samples", o.samples, "Monte-Carlo sample count");
    cmd->add_option("--out", o.out, "output path (default: stdout)");
}

RunConfig load_with_overrides(const CliOverrides& o) {
    RunConfig cfg = load_config_file(o.config_path);
    if (o.x) cfg.x = *o.x;
    if (o.grid_n) {
        cfg.grid_n = *o.grid_n;
        cfg.grid.clear();
    }
    if (o.seed) cfg.mc.seed = *o.seed;
    if (o.samples) cfg.mc.n = *o.samples;
    if (o.out) cfg.out_path = *o.out;
    return cfg;
}

double require_x(const RunConfig& cfg) {
    if (!cfg.x) throw ConfigError("this command needs --x or \"x\" in config");
    return *cfg.x;
}

std::ostream& open_out(const RunConfig& cfg, std::ofstream& file) {
    if (cfg.out_path.empty()) return std::cout;
    file.open(cfg.out_path);
    if (!file) throw ConfigError("cannot open output '" + cfg.out_path + "'");
    return file;
}

std::optional<double> try_duality_gap(const DiffusionSpec& spec, double x) {
    try {
        return duality_gap(spec, x);
    } catch (const Error&) {
        return std::nullopt; // dual refused or inapplicable
    }
}

int cmd_classify(const CliOverrides& o) {
    const RunConfig cfg = load_with_overrides(o);
    const double x = cfg.x ? *cfg.x
                           : interior_grid(cfg.diffusion.interval, 3)[1];
    const Classification cls = classify(cfg.diffusion, x);
    std::cout << regime_name(cls.tag) << "\n";
    std::cout << "attractive_lower=" << (cls.attractive_lower ? "true" : "false")
              << " attractive_upper=" << (cls.attractive_upper ? "true" : "false")
              << "\n";
    std::cout << "limit_lower=" << format_number(cls.limit_lower)
              << " limit_upper=" << format_number(cls.limit_upper) << "\n";
    std::cout << "limits_extrapolated="
              << (cls.used_extrapolated_limits ? "true" : "false") << "\n";
    return 0;
}

SolveRow solve_row_for(SolverEngine& engine, const DiffusionSpec& spec,
                       double x) {
    const VarianceSolution sol = engine.solve(x);
    return row_from_solution(sol, try_duality_gap(spec, x));
}

int cmd_solve(const CliOverrides& o) {
    const RunConfig cfg = load_with_overrides(o);
    const double x = require_x(cfg);
    SolverEngine engine(cfg.diffusion);
    const SolveRow row = solve_row_for(engine, cfg.diffusion, x);
    std::ofstream file;
    std::ostream& out = open_out(cfg, file);
    out << csv_header() << "\n" << csv_row(row) << "\n";
    std::cerr << json_log_line(row) << "\n";
    return 0;
}

int cmd_sweep(const CliOverrides& o) {
    const RunConfig cfg = load_with_overrides(o);
    const auto xs = effective_grid(cfg);
    std::ofstream file;
    std::ostream& out = open_out(cfg, file);
    out << csv_header() << "\n";
    const auto profile = value_profile(cfg.diffusion, xs);
    for (const auto& entry : profile) {
        SolveRow row;
        if (entry.solution) {
            row = row_from_solution(*entry.solution,
                                    try_duality_gap(cfg.diffusion, entry.x));
        } else {
            row.x = entry.x;
            row.error = entry.error;
        }
        out << csv_row(row) << "\n";
        std::cerr << json_log_line(row) << "\n";
    }
    return 0;
}

int cmd_verify(const CliOverrides& o) {
    const RunConfig cfg = load_with_overrides(o);
    const double x = require_x(cfg);
    SolverEngine engine(cfg.diffusion);
    const VarianceSolution sol = engine.solve(x);

    StoppingRule rule = sol.rule;
    bool instantiated = false;
    if (rule.kind == StoppingRule::Kind::EpsilonFamily ||
        (rule.kind == StoppingRule::Kind::WholeInterval &&
         !std::isfinite(sol.diagnostics.mean_under_rule) &&
         rule.epsilon_builder)) {
        rule = rule.epsilon_builder(cfg.mc.epsilon);
        instantiated = true;
    }
    const double analytic = rule_variance(cfg.diffusion, x, rule);

    SampleConfig scfg{cfg.mc.seed, cfg.mc.n, cfg.mc.workers};
    const EstimatorResult est = sample_rule(cfg.diffusion, x, rule, scfg);
    const double se = est.std_error_of_variance;
    const double z = se > 0.0 ? (est.variance - analytic) / se
                              : (est.variance == analytic ? 0.0 : INFINITY);

    std::cout << "analytic_variance=" << format_number(analytic)
              << (instantiated ? " (epsilon-instantiated rule)" : "") << "\n";
    std::cout << "mc_variance=" << format_number(est.variance)
              << " se=" << format_number(se) << " n=" << est.n_effective
              << "\n";
    std::cout << "z=" << format_number(z) << "\n";
    if (std::isfinite(sol.value) && !std::isnan(sol.value)) {
        std::cout << "V=" << format_number(sol.value)
                  << " rule_gap=" << format_number(sol.value - analytic)
                  << "\n";
    }
    if (std::abs(z) > cfg.tolerances.verify_z_gate) {
        std::cout << "verification FAILED (|z| > "
                  << format_number(cfg.tolerances.verify_z_gate) << ")\n";
        return 4;
    }
    std::cout << "verification ok\n";
    return 0;
}

int cmd_game(const CliOverrides& o) {
    const RunConfig cfg = load_with_overrides(o);
    const double x = require_x(cfg);
    try {
        const GameSolution g = dual_solve_original(cfg.diffusion, x);
        std::cout << "c_star=" << format_number(g.c_star)
                  << " value=" << format_number(g.value) << "\n";
        std::cout << "essential=";
        for (std::size_t i = 0; i < g.essential.size(); ++i) {
            if (i) std::cout << ";";
            std::cout << format_number(g.essential[i]);
        }
        std::cout << "\n";
        std::cout << "mix_kind=" << g.mix.kind_name();
        if (g.mix.kind == StoppingRule::Kind::BernoulliMix)
            std::cout << " p=" << format_number(g.mix.p);
        std::cout << "\n";
        const VarianceSolution primal = solve(cfg.diffusion, x);
        std::cout << "primal=" << format_number(primal.value)
                  << " gap=" << format_number(std::abs(primal.value - g.value))
                  << "\n";
    } catch (const AssumptionViolated& e) {
        std::cout << "dual refused: " << e.what() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"variance-maximizing optimal stopping for linear diffusions"};
    app.require_subcommand(1);

    CliOverrides o;
    auto* c_classify = app.add_subcommand("classify", "print the regime");
    auto* c_solve = app.add_subcommand("solve", "solve at one start state");
    auto* c_sweep = app.add_subcommand("sweep", "solve across a grid, CSV out");
    auto* c_verify =
        app.add_subcommand("verify", "Monte-Carlo check of the solved rule");
    auto* c_game = app.add_subcommand("game", "game-theoretic dual solve");
    for (auto* cmd : {c_classify, c_solve, c_sweep, c_verify, c_game})
        add_common(cmd, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c_classify->parsed()) return cmd_classify(o);
        if (c_solve->parsed()) return cmd_solve(o);
        if (c_sweep->parsed()) return cmd_sweep(o);
        if (c_verify->parsed()) return cmd_verify(o);
        if (c_game->parsed()) return cmd_game(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const LimitUndetermined& e) {
        std::cerr << "classification undetermined: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedMarginal& e) {
        std::cerr << "unsupported marginal regime: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
