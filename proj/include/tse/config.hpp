#pragma once

// JSON run configuration shared by the price / verify / convergence commands.
// Validation errors carry the offending field path (e.g. "mc_config.seed").

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tse/grid.hpp"
#include "tse/mc.hpp"
#include "tse/models.hpp"
#include "tse/payoffs.hpp"
#include "tse/pde.hpp"

#include <json.hpp>

namespace tse {

class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field_path, std::string message)
        : std::runtime_error(field_path + ": " + message),
          field_(std::move(field_path)),
          message_(std::move(message)) {}
    const std::string& field() const { return field_; }
    const std::string& message() const { return message_; }

  private:
    std::string field_;
    std::string message_;
};

// Generative grid parameters, kept so refinement ladders can rebuild the
// grid at other resolutions.
struct GridRecipe {
    GridKind kind = GridKind::Uniform;
    double x_min = 0.0, x_max = 2.0;
    int n_intervals = 400;
    double center = 0.0, strength = 4.0;  // sinh only
};

SpatialGrid build_grid(const GridRecipe& recipe);

struct RunConfig {
    std::string run_id;
    nlohmann::json raw;  // echoed verbatim into the manifest

    ModelSpec model;
    Payoff payoff;
    double horizon = 1.0;
    std::vector<std::pair<double, double>> evaluation_points;  // (x, t)

    McConfig mc;
    bool mc_seed_given = false;

    GridRecipe grid_recipe;
    SpatialGrid grid;
    SolverConfig solver;

    // "oracle": "auto" | true | false; auto resolves to the affine family test.
    bool oracle = false;

    std::vector<std::string> checks;              // verify
    std::vector<std::pair<int, int>> ladder;      // convergence: (n_intervals, n_time_steps)
    std::string output_dir = "runs";
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// Commands that run Monte Carlo call this first.
void require_mc_seed(const RunConfig& config);

}  // namespace tse
