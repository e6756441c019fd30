#include "tse/pde.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tse/banded.hpp"

namespace tse {

namespace {

// One-sided first-derivative weights at xi0 on nodes (xi0, xi1, xi2).
struct OneSided {
    double c0, c1, c2;
};
OneSided one_sided_d1(double xi0, double xi1, double xi2) {
    const double d1 = xi1 - xi0, d2 = xi2 - xi0;
    return {-(d1 + d2) / (d1 * d2), d2 / (d1 * (d2 - d1)), -d1 / (d2 * (d2 - d1))};
}

// Non-uniform central 3-point weights.
struct Central {
    double m, c, p;  // coefficients of u_{i-1}, u_i, u_{i+1}
};
Central central_d1(double hm, double hp) {
    return {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))};
}
Central central_d2(double hm, double hp) {
    return {2.0 / (hm * (hm + hp)), -2.0 / (hm * hp), 2.0 / (hp * (hm + hp))};
}

enum class ZeroRow { NaturalBoundary, Dirichlet, FarField };

struct Assembled {
    BandedMatrix lhs;
    std::vector<double> rhs;
};

}  // namespace

double SolutionSurface::value_at(double x, double t) const {
    const double T = times.back();
    const double tol_t = 1e-12 * std::max(1.0, std::abs(T));
    const double span_x = grid.x_max() - grid.x_min();
    const double tol_x = 1e-12 * std::max(1.0, span_x);
    if (t < times.front() - tol_t || t > T + tol_t)
        throw std::domain_error("SolutionSurface: t outside [0, T]");
    if (x < grid.x_min() - tol_x || x > grid.x_max() + tol_x)
        throw std::domain_error("SolutionSurface: x outside grid");
    t = std::clamp(t, times.front(), T);
    x = std::clamp(x, grid.x_min(), grid.x_max());

    const auto& xs = grid.nodes;
    auto itx = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(itx - xs.begin());
    if (i == 0) i = 1;
    if (i >= xs.size()) i = xs.size() - 1;
    const double wx = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);

    auto itt = std::upper_bound(times.begin(), times.end(), t);
    std::size_t j = static_cast<std::size_t>(itt - times.begin());
    if (j == 0) j = 1;
    if (j >= times.size()) j = times.size() - 1;
    const double wt = (t - times[j - 1]) / (times[j] - times[j - 1]);

    const double lo = (1.0 - wx) * node(static_cast<int>(j - 1), static_cast<int>(i - 1)) +
                      wx * node(static_cast<int>(j - 1), static_cast<int>(i));
    const double hi = (1.0 - wx) * node(static_cast<int>(j), static_cast<int>(i - 1)) +
                      wx * node(static_cast<int>(j), static_cast<int>(i));
    return (1.0 - wt) * lo + wt * hi;
}

namespace {

void validate_common(const ModelSpec& model, const Payoff& payoff, double T,
                     const SpatialGrid& grid, const SolverConfig& cfg) {
    if (!(T > 0.0)) throw std::invalid_argument("solve_tse: T must be > 0");
    if (cfg.n_time_steps < 2)
        throw std::invalid_argument("solve_tse: n_time_steps must be >= 2");
    if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0))
        throw std::invalid_argument("solve_tse: theta must lie in [0, 1]");
    if (cfg.rannacher_steps < 0)
        throw std::invalid_argument("solve_tse: rannacher_steps must be >= 0");
    if (cfg.far_field == FarFieldPolicy::DirichletValue && !cfg.far_field_value)
        throw std::invalid_argument(
            "solve_tse: DirichletValue far field requires far_field_value");
    if (model.domain == Domain::HalfLine) {
        if (grid.x_min() != 0.0)
            throw std::invalid_argument(
                "solve_tse: half-line models require a grid starting at x = 0");
    } else {
        if (!(grid.x_min() < 0.0 && grid.x_max() > 0.0))
            throw std::invalid_argument(
                "solve_tse: whole-line models require x_min < 0 < x_max");
    }
    if (!payoff.g) throw std::invalid_argument("solve_tse: payoff has no g");
}

// Explicit-part stability: with theta < 1/2 the diffusion term must satisfy
// (1 - 2 theta) * dt * 2 alpha / (h- h+) <= 1 at every node and step.
void check_cfl(const ModelSpec& model, double T, const SpatialGrid& grid,
               const SolverConfig& cfg) {
    if (cfg.theta >= 0.5) return;
    const auto& xs = grid.nodes;
    const int M = cfg.n_time_steps;
    const double dt = T / M;
    const double factor = (1.0 - 2.0 * cfg.theta) * dt;
    for (int j = 0; j <= M; ++j) {
        const double t = T * j / M;
        for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
            const double hm = xs[i] - xs[i - 1], hp = xs[i + 1] - xs[i];
            const double ratio = factor * 2.0 * model.alpha(xs[i], t) / (hm * hp);
            if (ratio > 1.0) {
                std::ostringstream msg;
                msg << "solve_tse: explicit diffusion unstable for theta=" << cfg.theta
                    << ": CFL ratio " << ratio << " > 1 at x=" << xs[i] << ", t=" << t
                    << "; increase n_time_steps or use theta >= 0.5";
                throw std::invalid_argument(msg.str());
            }
        }
    }
}

SolutionSurface solve_impl(const ModelSpec& model, const Payoff& payoff, double T,
                           const SpatialGrid& grid, const SolverConfig& cfg,
                           ZeroRow zero_row,
                           const std::function<double(double)>& dirichlet0) {
    validate_common(model, payoff, T, grid, cfg);
    check_cfl(model, T, grid, cfg);

    const auto& xs = grid.nodes;
    const int N = grid.n_intervals();
    const int M = cfg.n_time_steps;
    const double dt = T / M;

    SolutionSurface out;
    out.grid = grid;
    out.model_name = model.name;
    out.payoff_name = payoff.name;
    out.theta = cfg.theta;
    out.far_field = cfg.far_field;
    out.times.resize(M + 1);
    for (int j = 0; j <= M; ++j) out.times[j] = dt * j;
    out.times.back() = T;
    out.values.assign(static_cast<std::size_t>(M + 1) * (N + 1), 0.0);

    // terminal condition, stored exactly
    for (int i = 0; i <= N; ++i)
        out.values[static_cast<std::size_t>(M) * (N + 1) + i] = payoff.g(xs[i]);

    const int startup = payoff.lipschitz_only ? std::min(cfg.rannacher_steps, M) : 0;
    out.rannacher_applied = startup;

    std::vector<Central> d1(N + 1), d2(N + 1);
    for (int i = 1; i < N; ++i) {
        const double hm = xs[i] - xs[i - 1], hp = xs[i + 1] - xs[i];
        d1[i] = central_d1(hm, hp);
        d2[i] = central_d2(hm, hp);
    }
    const OneSided bc = one_sided_d1(xs[0], xs[1], xs[2]);

    // spatial operator applied to a slice at time t (interior nodes only)
    std::vector<double> alpha_row(N + 1), beta_row(N + 1);
    auto fill_coeffs = [&](double t) {
        for (int i = 0; i <= N; ++i) {
            alpha_row[i] = model.alpha(xs[i], t);
            beta_row[i] = model.beta(xs[i], t);
        }
    };

    std::vector<double> w(xs.size()), rhs(xs.size());
    for (int i = 0; i <= N; ++i) w[i] = out.node(M, i);

    const bool whole_line = model.domain == Domain::WholeLine;

    for (int j = M - 1; j >= 0; --j) {
        const double t_new = out.times[j];
        const double t_old = out.times[j + 1];
        const int step_index = M - 1 - j;  // 0 at the terminal end
        const double theta = step_index < startup ? 1.0 : cfg.theta;
        const double ex = (1.0 - theta) * dt;

        // explicit part
        fill_coeffs(t_old);
        for (int i = 1; i < N; ++i) {
            const double Lw = alpha_row[i] * (d2[i].m * w[i - 1] + d2[i].c * w[i] +
                                              d2[i].p * w[i + 1]) +
                              beta_row[i] * (d1[i].m * w[i - 1] + d1[i].c * w[i] +
                                             d1[i].p * w[i + 1]) -
                              xs[i] * w[i];
            rhs[i] = w[i] + ex * Lw;
        }
        if (!whole_line && zero_row == ZeroRow::NaturalBoundary) {
            const double b0 = model.beta(xs[0], t_old);
            rhs[0] = w[0] + ex * b0 * (bc.c0 * w[0] + bc.c1 * w[1] + bc.c2 * w[2]);
        }

        // implicit part
        fill_coeffs(t_new);
        BandedMatrix A(N + 1, 2, 2);
        const double im = theta * dt;
        for (int i = 1; i < N; ++i) {
            A.at(i, i - 1) = -im * (alpha_row[i] * d2[i].m + beta_row[i] * d1[i].m);
            A.at(i, i) = 1.0 - im * (alpha_row[i] * d2[i].c + beta_row[i] * d1[i].c -
                                     xs[i]);
            A.at(i, i + 1) = -im * (alpha_row[i] * d2[i].p + beta_row[i] * d1[i].p);
        }

        // x = 0 row (half line) or left truncation row (whole line)
        if (whole_line) {
            if (cfg.far_field == FarFieldPolicy::DirichletValue) {
                A.at(0, 0) = 1.0;
                rhs[0] = cfg.far_field_value(t_new, xs[0]);
            } else {
                const double r = (xs[1] - xs[0]) / (xs[2] - xs[1]);
                A.at(0, 0) = 1.0;
                A.at(0, 1) = -(1.0 + r);
                A.at(0, 2) = r;
                rhs[0] = 0.0;
            }
        } else if (zero_row == ZeroRow::NaturalBoundary) {
            const double b0 = beta_row[0];
            A.at(0, 0) = 1.0 - im * b0 * bc.c0;
            A.at(0, 1) = -im * b0 * bc.c1;
            A.at(0, 2) = -im * b0 * bc.c2;
        } else {  // Dirichlet experiment at x = 0
            A.at(0, 0) = 1.0;
            rhs[0] = dirichlet0(t_new);
        }

        // far-field truncation row
        if (cfg.far_field == FarFieldPolicy::DirichletValue) {
            A.at(N, N) = 1.0;
            rhs[N] = cfg.far_field_value(t_new, xs[N]);
        } else {
            const double r = (xs[N] - xs[N - 1]) / (xs[N - 1] - xs[N - 2]);
            A.at(N, N - 2) = r;
            A.at(N, N - 1) = -(1.0 + r);
            A.at(N, N) = 1.0;
            rhs[N] = 0.0;
        }

        BandedLU lu(std::move(A));
        lu.solve_in_place(rhs);
        for (int i = 0; i <= N; ++i) {
            if (!std::isfinite(rhs[i]))
                throw std::runtime_error("solve_tse: non-finite value at time step " +
                                         std::to_string(j) + ", node " + std::to_string(i));
            out.values[static_cast<std::size_t>(j) * (N + 1) + i] = rhs[i];
        }
        std::swap(w, rhs);
    }
    return out;
}

}  // namespace

SolutionSurface solve_tse(const ModelSpec& model, const Payoff& payoff, double T,
                          const SpatialGrid& grid, const SolverConfig& config) {
    if (model.domain == Domain::HalfLine && !payoff.lipschitz_at_zero)
        throw std::domain_error(
            "solve_tse: payoff '" + payoff.name +
            "' is not Lipschitz at x = 0; the boundary condition u_t + beta u_x = 0 "
            "is not valid for it (martingale counterexample regime)");
    return solve_impl(model, payoff, T, grid, config, ZeroRow::NaturalBoundary, {});
}

SolutionSurface wrong_boundary_solve(const ModelSpec& model, const Payoff& payoff,
                                     double T, const SpatialGrid& grid,
                                     const SolverConfig& config,
                                     std::function<double(double)> boundary_value) {
    if (model.domain != Domain::HalfLine)
        throw std::invalid_argument("wrong_boundary_solve: requires a half-line model");
    if (!boundary_value)
        throw std::invalid_argument("wrong_boundary_solve: boundary_value is required");
    if (model.family != CoeffFamily::AffineSqrt)
        throw std::invalid_argument(
            "wrong_boundary_solve: supported only for CIR-family models");
    // Dirichlet data at 0 is meaningful only when the boundary is attainable,
    // i.e. 2a(t) < sigma(t)^2 somewhere.
    bool attainable = false;
    for (int j = 0; j <= 100; ++j) {
        const double t = T * j / 100.0;
        const double a = model.drift0(t), s = model.vol_scale(t);
        if (2.0 * a < s * s) {
            attainable = true;
            break;
        }
    }
    if (!attainable)
        throw std::invalid_argument(
            "wrong_boundary_solve: Feller condition 2a >= sigma^2 holds, x = 0 is "
            "unattainable and needs no boundary data");
    return solve_impl(model, payoff, T, grid, config, ZeroRow::Dirichlet,
                      boundary_value);
}

BoundaryResidualSeries boundary_residual(const SolutionSurface& surface,
                                         const ModelSpec& model) {
    const auto& xs = surface.grid.nodes;
    if (xs.front() != 0.0)
        throw std::domain_error(
            "boundary_residual: surface is not on the half line (x0 != 0)");
    if (surface.n_times() < 3 || surface.n_nodes() < 5)
        throw std::invalid_argument("boundary_residual: surface too small");

    const OneSided dx = one_sided_d1(xs[0], xs[2], xs[4]);
    const double dt = surface.times[1] - surface.times[0];

    BoundaryResidualSeries out;
    for (int j = 0; j + 2 < surface.n_times(); ++j) {
        const double ut = (-3.0 * surface.node(j, 0) + 4.0 * surface.node(j + 1, 0) -
                           surface.node(j + 2, 0)) /
                          (2.0 * dt);
        const double ux = dx.c0 * surface.node(j, 0) + dx.c1 * surface.node(j, 2) +
                          dx.c2 * surface.node(j, 4);
        const double r = ut + model.beta(0.0, surface.times[j]) * ux;
        out.times.push_back(surface.times[j]);
        out.residuals.push_back(r);
        out.max_abs = std::max(out.max_abs, std::abs(r));
    }
    return out;
}

std::vector<std::pair<double, double>> alpha_uxx_diagnostic(const SolutionSurface& surface,
                                                            const ModelSpec& model,
                                                            double t, int n_nodes) {
    const auto& xs = surface.grid.nodes;
    if (xs.front() != 0.0)
        throw std::domain_error(
            "alpha_uxx_diagnostic: surface is not on the half line (x0 != 0)");
    if (n_nodes < 1 || n_nodes + 1 >= surface.n_nodes())
        throw std::invalid_argument("alpha_uxx_diagnostic: n_nodes out of range");
    const double T = surface.times.back();
    const double dt = surface.times[1] - surface.times[0];
    const int j = static_cast<int>(std::lround(t / dt));
    if (j < 0 || j >= surface.n_times() ||
        std::abs(surface.times[j] - t) > 1e-9 * std::max(1.0, T))
        throw std::domain_error(
            "alpha_uxx_diagnostic: t does not match a stored time slice");

    std::vector<std::pair<double, double>> out;
    out.reserve(n_nodes);
    for (int i = 1; i <= n_nodes; ++i) {
        const double hm = xs[i] - xs[i - 1], hp = xs[i + 1] - xs[i];
        const Central c = central_d2(hm, hp);
        const double uxx = c.m * surface.node(j, i - 1) + c.c * surface.node(j, i) +
                           c.p * surface.node(j, i + 1);
        out.emplace_back(xs[i], model.alpha(xs[i], surface.times[j]) * uxx);
    }
    return out;
}

std::function<double(double, double)> u_provider_from_surface(SolutionSurface surface) {
    auto shared = std::make_shared<const SolutionSurface>(std::move(surface));
    return [shared](double x, double t) { return shared->value_at(x, t); };
}

void write_surface_csv(const SolutionSurface& surface, std::ostream& os) {
    os << std::setprecision(17);
    os << "t\\x";
    for (double x : surface.grid.nodes) os << ',' << x;
    os << '\n';
    for (int j = 0; j < surface.n_times(); ++j) {
        os << surface.times[j];
        for (int i = 0; i < surface.n_nodes(); ++i) os << ',' << surface.node(j, i);
        os << '\n';
    }
}

nlohmann::json surface_metadata(const SolutionSurface& surface) {
    return nlohmann::json{
        {"model", surface.model_name},
        {"payoff", surface.payoff_name},
        {"theta", surface.theta},
        {"rannacher_steps_applied", surface.rannacher_applied},
        {"far_field", surface.far_field == FarFieldPolicy::ZeroSecondDerivative
                          ? "zero_second_derivative"
                          : "dirichlet_value"},
        {"grid", {{"kind", surface.grid.kind == GridKind::Uniform ? "uniform" : "sinh"},
                  {"x_min", surface.grid.x_min()},
                  {"x_max", surface.grid.x_max()},
                  {"n_intervals", surface.grid.n_intervals()}}},
        {"n_time_steps", surface.n_times() - 1},
        {"t_max", surface.times.back()},
    };
}

}  // namespace tse
