#pragma once

// Monte Carlo engines for the three stochastic representations:
//   price_u  : u(x,t)   = E[ exp(-int_t^T X) g(X_T) ]
//   price_v  : u_x(x,t) = E[ g'(Y_T) e^{int (beta_x - Y)} ]
//                        - E[ int_t^T u(Y_s,s) e^{int_t^s (beta_x - Y)} ds ],
//              with dY = (alpha_x + beta) dt + sigma dW
//   price_ux : first-variation estimator
//              u_x = E[ g'(X_T) xi_T e^{-int X} ] - E[ g(X_T) e^{-int X} int xi ],
//              with d(xi) = xi beta_x dt + xi sigma_x dW, xi(t) = 1.
//
// Every path owns an RNG substream derived from (seed, estimator salt,
// global path index), so estimates are bit-identical however the paths are
// split into blocks, and price_v / price_ux share one salt to give common
// random numbers for the Girsanov identity check.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "tse/models.hpp"
#include "tse/payoffs.hpp"

namespace tse {

enum class McScheme { EulerFullTruncation, EulerReflect };

struct McConfig {
    std::int64_t n_paths = 100000;
    int steps_per_year = 256;
    std::uint64_t seed = 0;
    McScheme scheme = McScheme::EulerFullTruncation;
    std::int64_t path_offset = 0;  // substream origin, for split runs
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
    int n_steps = 0;
};

// Pooled mean/variance merge of two partial estimates (Chan update).
McEstimate pool_estimates(const McEstimate& a, const McEstimate& b);

struct PathBatch {
    double t0 = 0.0, T = 0.0;
    std::int64_t n_paths = 0;
    int n_steps = 0;
    std::uint64_t seed = 0;
    McScheme scheme = McScheme::EulerFullTruncation;
    std::vector<double> times;   // n_steps + 1
    std::vector<double> values;  // row per path: stored (clamped) states

    double at(std::int64_t path, int step) const {
        return values[static_cast<std::size_t>(path) * (n_steps + 1) + step];
    }
};

PathBatch simulate_paths(const ModelSpec& model, double x0, double t0, double T,
                         const McConfig& config);

McEstimate price_u(const ModelSpec& model, const Payoff& payoff, double x0, double t0,
                   double T, const McConfig& config);

McEstimate price_v(const ModelSpec& model, const Payoff& payoff, double x0, double t0,
                   double T, const std::function<double(double, double)>& u_provider,
                   const McConfig& config);

McEstimate price_ux_firstvariation(const ModelSpec& model, const Payoff& payoff,
                                   double x0, double t0, double T,
                                   const McConfig& config);

enum class McQuantity { PriceU, PriceV };

struct ConvergenceRow {
    std::int64_t n_paths = 0;
    int n_steps = 0;  // total steps over [t, T]
    double value = 0.0;
    double std_error = 0.0;
};

// Schedules are zipped row by row and must have equal length.
std::vector<ConvergenceRow> mc_convergence_table(
    McQuantity quantity, const ModelSpec& model, const Payoff& payoff, double x0,
    double t0, double T, const std::function<double(double, double)>& u_provider,
    const McConfig& base, std::span<const std::int64_t> path_schedule,
    std::span<const int> step_schedule);

// Long format: path_id, step, time, value; 17 significant digits.
void write_paths_csv(const PathBatch& batch, std::ostream& os);

}  // namespace tse
