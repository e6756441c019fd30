#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tse/affine.hpp"
#include "tse/config.hpp"
#include "tse/mc.hpp"
#include "tse/mc_kernels.hpp"
#include "tse/pde.hpp"
#include "tse/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

fs::path run_directory(const tse::RunConfig& cfg, const std::string& out_override) {
    const fs::path base = out_override.empty() ? fs::path(cfg.output_dir)
                                               : fs::path(out_override);
    const fs::path dir = base / cfg.run_id;
    fs::create_directories(dir);
    return dir;
}

json base_manifest(const tse::RunConfig& cfg, const std::string& command) {
    return json{
        {"run_id", cfg.run_id},
        {"command", command},
        {"config", cfg.raw},
        {"versions",
         {{"tse", kVersion},
          {"compiler", __VERSION__},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
        {"kernel_backend", tse::kernels::active_backend().name},
    };
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

tse::AffineCoefficients oracle_coefficients(const tse::RunConfig& cfg) {
    if (cfg.model.kind == tse::ModelKind::CIR) return tse::cir_affine(cfg.model.params);
    if (cfg.model.kind == tse::ModelKind::Vasicek)
        return tse::vasicek_affine(cfg.model.params);
    return tse::riccati_solve(cfg.model, cfg.horizon, 4096);
}

// Re-solve on a domain twice as wide (same spacing) and compare at the
// evaluation points: the truncation boundary should be invisible there.
double far_field_sensitivity(const tse::RunConfig& cfg,
                             const tse::SolutionSurface& surface) {
    tse::GridRecipe wide = cfg.grid_recipe;
    const double width = wide.x_max - wide.x_min;
    wide.x_max += width;
    wide.n_intervals *= 2;
    const tse::SolutionSurface other = tse::solve_tse(
        cfg.model, cfg.payoff, cfg.horizon, tse::build_grid(wide), cfg.solver);
    double worst = 0.0;
    for (auto [x, t] : cfg.evaluation_points)
        worst = std::max(worst, std::abs(surface.value_at(x, t) - other.value_at(x, t)));
    return worst;
}

int cmd_price(const tse::RunConfig& cfg, const std::string& out_override, bool quiet) {
    tse::require_mc_seed(cfg);
    if (cfg.evaluation_points.empty())
        throw tse::ConfigError("evaluation_points",
                               "price needs at least one evaluation point");

    const fs::path dir = run_directory(cfg, out_override);
    json manifest = base_manifest(cfg, "price");

    Timer t_total;
    Timer t_pde;
    const tse::SolutionSurface surface =
        tse::solve_tse(cfg.model, cfg.payoff, cfg.horizon, cfg.grid, cfg.solver);
    const double pde_ms = t_pde.ms();

    std::optional<tse::AffineCoefficients> oracle;
    if (cfg.oracle) oracle = oracle_coefficients(cfg);

    std::ostringstream csv;
    csv << "x,t,u_pde,u_mc,mc_se";
    if (oracle) csv << ",u_oracle,abs_diff_pde_oracle,z_score_mc_oracle";
    csv << "\n";

    Timer t_mc;
    for (auto [x, t] : cfg.evaluation_points) {
        const double u_pde = surface.value_at(x, t);
        const tse::McEstimate mc =
            tse::price_u(cfg.model, cfg.payoff, x, t, cfg.horizon, cfg.mc);
        csv << num(x) << ',' << num(t) << ',' << num(u_pde) << ',' << num(mc.value)
            << ',' << num(mc.std_error);
        if (oracle) {
            const double u_star = oracle->price(x, cfg.horizon - t);
            const double diff_mc = mc.value - u_star;
            const double z = mc.std_error > 0.0
                                 ? diff_mc / mc.std_error
                                 : (diff_mc == 0.0
                                        ? 0.0
                                        : std::numeric_limits<double>::infinity());
            csv << ',' << num(u_star) << ',' << num(std::abs(u_pde - u_star)) << ','
                << num(z);
        }
        csv << "\n";
        if (!quiet)
            std::cout << "x = " << x << "  t = " << t << "  u_pde = " << u_pde
                      << "  u_mc = " << mc.value << " +- " << mc.std_error << "\n";
    }
    const double mc_ms = t_mc.ms();

    {
        std::ofstream out(dir / "results.csv");
        out << csv.str();
    }
    {
        std::ofstream out(dir / "surface.csv");
        tse::write_surface_csv(surface, out);
    }

    json sidecar = tse::surface_metadata(surface);
    json diagnostics;
    if (cfg.model.domain == tse::Domain::HalfLine)
        diagnostics["max_boundary_residual"] =
            tse::boundary_residual(surface, cfg.model).max_abs;
    diagnostics["far_field_sensitivity"] = far_field_sensitivity(cfg, surface);
    sidecar["diagnostics"] = diagnostics;
    write_json(dir / "surface_meta.json", sidecar);

    manifest["timings_ms"] =
        json{{"pde", pde_ms}, {"mc", mc_ms}, {"total", t_total.ms()}};
    write_json(dir / "manifest.json", manifest);

    if (!quiet) std::cout << "wrote " << (dir / "results.csv").string() << "\n";
    return 0;
}

int cmd_verify(const tse::RunConfig& cfg, const std::string& out_override,
               const std::string& checks_csv, bool quiet) {
    std::vector<std::string> names = cfg.checks;
    if (!checks_csv.empty()) {
        names.clear();
        std::stringstream ss(checks_csv);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            const auto& known = tse::all_check_names();
            if (std::find(known.begin(), known.end(), item) == known.end())
                throw tse::ConfigError("checks", "unknown check '" + item + "'");
            names.push_back(item);
        }
        if (names.empty())
            throw tse::ConfigError("checks", "no checks selected");
    }

    for (const auto& n : names)
        if (n == "girsanov_identity" || n == "martingale_counterexample")
            tse::require_mc_seed(cfg);

    const fs::path dir = run_directory(cfg, out_override);
    Timer t_total;

    json checks = json::array();
    bool any_fail = false;
    for (const auto& name : names) {
        tse::CheckResult r;
        try {
            r = tse::run_check(name, cfg.model, cfg.horizon, cfg.mc);
        } catch (const std::exception& e) {
            r.name = name;
            r.status = tse::CheckResult::Status::Fail;
            r.reason = std::string("check threw: ") + e.what();
        }
        const char* status = r.passed() ? "pass"
                             : r.failed() ? "fail"
                                          : "skipped";
        any_fail = any_fail || r.failed();
        json metrics = json::object();
        for (const auto& [k, v] : r.metrics) metrics[k] = v;
        checks.push_back(json{{"name", r.name},
                              {"status", status},
                              {"reason", r.reason},
                              {"metrics", metrics}});
        if (!quiet) {
            std::cout << (r.passed() ? "[PASS] " : r.failed() ? "[FAIL] " : "[SKIP] ")
                      << r.name;
            if (!r.reason.empty()) std::cout << " -- " << r.reason;
            std::cout << "\n";
        }
    }

    json report{{"run_id", cfg.run_id},
                {"model", cfg.model.name},
                {"checks", checks},
                {"all_pass", !any_fail}};
    write_json(dir / "report.json", report);

    json manifest = base_manifest(cfg, "verify");
    manifest["timings_ms"] = json{{"total", t_total.ms()}};
    write_json(dir / "manifest.json", manifest);

    if (!quiet) std::cout << "wrote " << (dir / "report.json").string() << "\n";
    return any_fail ? 1 : 0;
}

int cmd_convergence(const tse::RunConfig& cfg, const std::string& out_override,
                    bool quiet) {
    if (cfg.ladder.empty())
        throw tse::ConfigError("ladder", "convergence needs a refinement ladder");
    if (cfg.evaluation_points.empty())
        throw tse::ConfigError("evaluation_points",
                               "convergence needs at least one evaluation point");

    const fs::path dir = run_directory(cfg, out_override);
    Timer t_total;

    std::optional<tse::AffineCoefficients> oracle;
    if (cfg.oracle) oracle = oracle_coefficients(cfg);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream csv;
    csv << "h,dt,error_vs_oracle,boundary_residual_max,observed_order\n";
    double prev_error = nan;
    for (auto [n_intervals, n_time_steps] : cfg.ladder) {
        tse::GridRecipe recipe = cfg.grid_recipe;
        recipe.n_intervals = n_intervals;
        tse::SolverConfig solver = cfg.solver;
        solver.n_time_steps = n_time_steps;
        const tse::SolutionSurface surface = tse::solve_tse(
            cfg.model, cfg.payoff, cfg.horizon, tse::build_grid(recipe), solver);

        const double h = (recipe.x_max - recipe.x_min) / n_intervals;
        const double dt = cfg.horizon / n_time_steps;

        double error = nan;
        if (oracle) {
            error = 0.0;
            for (auto [x, t] : cfg.evaluation_points)
                error = std::max(error, std::abs(surface.value_at(x, t) -
                                                 oracle->price(x, cfg.horizon - t)));
        }
        const double residual =
            cfg.model.domain == tse::Domain::HalfLine
                ? tse::boundary_residual(surface, cfg.model).max_abs
                : nan;
        const double order = (oracle && prev_error > 0.0 && error > 0.0)
                                 ? std::log2(prev_error / error)
                                 : nan;
        prev_error = error;

        csv << num(h) << ',' << num(dt) << ',' << num(error) << ',' << num(residual)
            << ',' << num(order) << "\n";
        if (!quiet)
            std::cout << "n = " << n_intervals << " x " << n_time_steps
                      << "  error = " << error << "  boundary residual = " << residual
                      << "  order = " << order << "\n";
    }

    {
        std::ofstream out(dir / "ladder.csv");
        out << csv.str();
    }
    json manifest = base_manifest(cfg, "convergence");
    manifest["timings_ms"] = json{{"total", t_total.ms()}};
    write_json(dir / "manifest.json", manifest);

    if (!quiet) std::cout << "wrote " << (dir / "ladder.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"term-structure equation pricing engine"};
    app.require_subcommand(1);

    std::string config_path, out_dir, checks_csv;
    bool quiet = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory (overrides the config)");
        cmd->add_flag("--quiet", quiet, "suppress progress output");
    };

    CLI::App* price = app.add_subcommand("price", "PDE + Monte Carlo prices at the evaluation points");
    add_common(price);
    CLI::App* verify = app.add_subcommand("verify", "run named verification checks");
    add_common(verify);
    verify->add_option("--checks", checks_csv, "comma-separated subset of checks");
    CLI::App* convergence = app.add_subcommand("convergence", "PDE refinement ladder");
    add_common(convergence);

    CLI11_PARSE(app, argc, argv);

    try {
        const tse::RunConfig cfg = tse::load_run_config(config_path);
        if (price->parsed()) return cmd_price(cfg, out_dir, quiet);
        if (verify->parsed()) return cmd_verify(cfg, out_dir, checks_csv, quiet);
        return cmd_convergence(cfg, out_dir, quiet);
    } catch (const tse::ConfigError& e) {
        std::cerr << "config error at " << e.field() << ": " << e.message() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
