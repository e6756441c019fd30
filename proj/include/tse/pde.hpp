#pragma once

// Theta-scheme solver for the term structure equation
//   u_t + alpha(x,t) u_xx + beta(x,t) u_x = x u,   u(x,T) = g(x),
// marched in tau = T - t.  On the half line the degenerate boundary gets the
// natural condition u_t(0,t) + beta(0,t) u_x(0,t) = 0 as a one-sided row; no
// Dirichlet data is invented at x = 0.

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tse/grid.hpp"
#include "tse/models.hpp"
#include "tse/payoffs.hpp"

#include <json.hpp>

namespace tse {

enum class FarFieldPolicy { ZeroSecondDerivative, DirichletValue };

struct SolverConfig {
    double theta = 0.5;       // 0 explicit, 0.5 CN, 1 implicit
    int n_time_steps = 400;
    int rannacher_steps = 2;  // implicit startup steps, applied to kinked payoffs
    FarFieldPolicy far_field = FarFieldPolicy::ZeroSecondDerivative;
    // Required for DirichletValue; called as (t, x_end) at truncation nodes.
    std::function<double(double, double)> far_field_value;
};

struct SolutionSurface {
    SpatialGrid grid;
    std::vector<double> times;   // ascending, times[0] = 0, times.back() = T
    std::vector<double> values;  // row j = slice at times[j], row-major

    std::string model_name, payoff_name;
    double theta = 0.5;
    int rannacher_applied = 0;
    FarFieldPolicy far_field = FarFieldPolicy::ZeroSecondDerivative;

    int n_times() const { return static_cast<int>(times.size()); }
    int n_nodes() const { return static_cast<int>(grid.nodes.size()); }
    double node(int time_index, int space_index) const {
        return values[static_cast<std::size_t>(time_index) * grid.nodes.size() +
                      static_cast<std::size_t>(space_index)];
    }
    // Bilinear interpolation; throws std::domain_error outside the grid.
    double value_at(double x, double t) const;
};

SolutionSurface solve_tse(const ModelSpec& model, const Payoff& payoff, double T,
                          const SpatialGrid& grid, const SolverConfig& config = {});

// Dirichlet-at-zero variant for the divergence experiment: replaces the
// boundary row by u(0,t) = boundary_value(t).  Refuses models whose boundary
// is unattainable (Feller condition 2a >= sigma^2 for the CIR family).
SolutionSurface wrong_boundary_solve(const ModelSpec& model, const Payoff& payoff,
                                     double T, const SpatialGrid& grid,
                                     const SolverConfig& config,
                                     std::function<double(double)> boundary_value);

// |D_t u(0,t) + beta(0,t) D_x u(0,t)| with stencils independent of the
// solver's boundary row: D_x uses nodes x0, x2, x4; D_t a one-sided 3-point
// stencil in t.
struct BoundaryResidualSeries {
    std::vector<double> times;
    std::vector<double> residuals;
    double max_abs = 0.0;
};
BoundaryResidualSeries boundary_residual(const SolutionSurface& surface,
                                         const ModelSpec& model);

// alpha(x_i, t) * D_xx u at the n innermost interior nodes of one time slice;
// the diffusion term should vanish toward the degenerate boundary.
std::vector<std::pair<double, double>> alpha_uxx_diagnostic(const SolutionSurface& surface,
                                                            const ModelSpec& model,
                                                            double t, int n_nodes = 10);

// (x, t) -> u for the Monte Carlo v-representation; owns a copy of the surface.
std::function<double(double, double)> u_provider_from_surface(SolutionSurface surface);

// x-grid header row, then one row per time step (t ascending), 17 significant digits.
void write_surface_csv(const SolutionSurface& surface, std::ostream& os);

nlohmann::json surface_metadata(const SolutionSurface& surface);

}  // namespace tse
