#include "varstop/config.hpp"

#include "varstop/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace varstop {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// numbers may be written as "inf" / "-inf"
double number_or_inf(const json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw ConfigError("expected a number or \"inf\"/\"-inf\" for " + what);
}

DiffusionSpec build_diffusion(const json& d, std::string& kind_out) {
    if (!d.is_object() || !d.contains("kind"))
        throw ConfigError("diffusion block must carry a \"kind\"");
    const std::string kind = d.at("kind").get<std::string>();
    kind_out = kind;

    if (kind == "gbm") {
        return gbm(d.at("mu").get<double>(), d.at("sigma").get<double>());
    }
    if (kind == "jacobi") {
        return jacobi(d.at("a").get<double>(), d.at("b").get<double>(),
                      d.at("sigma").get<double>());
    }
    if (kind == "natural_scale" || kind == "natural") {
        return natural_scale(number_or_inf(d.at("alpha"), "alpha"),
                             number_or_inf(d.at("beta"), "beta"));
    }
    if (kind == "paper_piecewise" || kind == "tie_example") {
        return tie_diffusion();
    }
    if (kind == "custom") {
        StateInterval iv;
        iv.alpha = number_or_inf(d.at("alpha"), "alpha");
        iv.beta = number_or_inf(d.at("beta"), "beta");
        if (!d.contains("pieces") || !d.at("pieces").is_array() ||
            d.at("pieces").empty())
            throw ConfigError("custom scale needs a non-empty \"pieces\" array");
        std::vector<ScalePiece> pieces;
        for (const auto& p : d.at("pieces")) {
            ScalePiece sp{number_or_inf(p.at("upto"), "upto"),
                          Expression::parse(p.at("expr").get<std::string>())};
            pieces.push_back(std::move(sp));
        }
        ScaleLimits lim;
        if (d.contains("limits")) {
            const auto& l = d.at("limits");
            if (l.contains("s_lower"))
                lim.s_lower = number_or_inf(l.at("s_lower"), "s_lower");
            if (l.contains("s_upper"))
                lim.s_upper = number_or_inf(l.at("s_upper"), "s_upper");
            if (l.contains("upper_growth"))
                lim.upper_growth =
                    number_or_inf(l.at("upper_growth"), "upper_growth");
            if (l.contains("lower_growth"))
                lim.lower_growth =
                    number_or_inf(l.at("lower_growth"), "lower_growth");
        }
        std::optional<Expression> drift, vol;
        if (d.contains("drift"))
            drift = Expression::parse(d.at("drift").get<std::string>());
        if (d.contains("vol"))
            vol = Expression::parse(d.at("vol").get<std::string>());
        if (drift.has_value() != vol.has_value())
            throw ConfigError("drift and vol must be present together");
        return custom_scale(iv, std::move(pieces), lim, std::move(drift),
                            std::move(vol));
    }
    throw ConfigError("unknown diffusion kind '" + kind + "'");
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    if (!j.contains("diffusion"))
        throw ConfigError("config needs a \"diffusion\" block");

    RunConfig cfg;
    try {
        cfg.diffusion = build_diffusion(j.at("diffusion"), cfg.diffusion_kind);
    } catch (const ConfigError&) {
        throw;
    } catch (const LimitUndetermined&) {
        throw; // classification-undetermined keeps its own exit code
    } catch (const Error& e) {
        throw ConfigError(std::string("diffusion construction failed: ") +
                          e.what());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("diffusion block malformed: ") + e.what());
    }

    try {
        if (j.contains("x")) cfg.x = j.at("x").get<double>();
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            if (g.is_array()) {
                for (const auto& v : g) cfg.grid.push_back(v.get<double>());
                for (std::size_t i = 0; i + 1 < cfg.grid.size(); ++i)
                    if (!(cfg.grid[i] < cfg.grid[i + 1]))
                        throw ConfigError("grid must be strictly increasing");
                for (double v : cfg.grid)
                    if (!cfg.diffusion.interval.contains(v))
                        throw ConfigError("grid point outside (alpha, beta)");
            } else if (g.is_object()) {
                const double from = g.at("from").get<double>();
                const double to = g.at("to").get<double>();
                const int n = g.at("n").get<int>();
                if (!(from < to) || n < 1)
                    throw ConfigError("grid object needs from < to and n >= 1");
                for (int i = 0; i < n; ++i) {
                    cfg.grid.push_back(
                        n == 1 ? 0.5 * (from + to)
                               : from + (to - from) * i / (n - 1.0));
                }
                for (double v : cfg.grid)
                    if (!cfg.diffusion.interval.contains(v))
                        throw ConfigError("grid point outside (alpha, beta)");
            } else if (g.is_number_integer()) {
                cfg.grid_n = g.get<int>();
            } else {
                throw ConfigError("grid must be an array, object or integer");
            }
        }
        if (j.contains("mc")) {
            const auto& m = j.at("mc");
            if (m.contains("seed")) cfg.mc.seed = m.at("seed").get<std::uint64_t>();
            if (m.contains("n")) cfg.mc.n = m.at("n").get<std::uint64_t>();
            if (m.contains("workers")) cfg.mc.workers = m.at("workers").get<int>();
            if (m.contains("epsilon")) cfg.mc.epsilon = m.at("epsilon").get<double>();
        }
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            if (t.contains("mean_check_rel"))
                cfg.tolerances.mean_check_rel =
                    t.at("mean_check_rel").get<double>();
            if (t.contains("verify_z_gate"))
                cfg.tolerances.verify_z_gate =
                    t.at("verify_z_gate").get<double>();
        }
        if (j.contains("out")) cfg.out_path = j.at("out").get<std::string>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config malformed: ") + e.what());
    }

    if (cfg.x && !cfg.diffusion.interval.contains(*cfg.x))
        throw ConfigError("x outside (alpha, beta)");
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::vector<double> effective_grid(const RunConfig& cfg, int fallback_n) {
    if (!cfg.grid.empty()) return cfg.grid;
    const int n = cfg.grid_n > 0 ? cfg.grid_n : fallback_n;
    return interior_grid(cfg.diffusion.interval, n);
}

} // namespace varstop
