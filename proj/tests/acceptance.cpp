// Acceptance harness: one line per criterion, pass/fail decided against the
// tolerances pinned below.  Exits 0 only if every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tse/affine.hpp"
#include "tse/grid.hpp"
#include "tse/mc.hpp"
#include "tse/models.hpp"
#include "tse/payoffs.hpp"
#include "tse/pde.hpp"
#include "tse/verify.hpp"

using namespace tse;

namespace {

ParamSet params(std::initializer_list<std::pair<const std::string, double>> kv) {
    ParamSet p;
    p.scalars = kv;
    return p;
}

const ParamSet kCirHigh = params({{"a", 0.04}, {"b", 0.5}, {"sigma", 0.2}});  // Feller holds
const ParamSet kCirLow = params({{"a", 0.01}, {"b", 0.5}, {"sigma", 0.3}});   // boundary attainable
const ParamSet kVasicek = params({{"a", 0.05}, {"b", 0.3}, {"sigma", 0.02}});
const ParamSet kDothan = params({{"a", 0.05}, {"sigma", 0.2}});

ModelSpec cir_high() { return make_model(ModelKind::CIR, kCirHigh); }
ModelSpec cir_low() { return make_model(ModelKind::CIR, kCirLow); }
ModelSpec vasicek() { return make_model(ModelKind::Vasicek, kVasicek); }
ModelSpec dothan() { return make_model(ModelKind::Dothan, kDothan); }

constexpr std::uint64_t kSeed = 20260825;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Criterion {
    std::string label;
    std::function<bool(std::string&)> run;
};

// A1: PDE (400x400 CN, x_max 2), MC (1e5 paths, 256 steps/yr) and the Riccati
//     oracle agree on CIR bonds across both parameter regimes, in under 60 s.
bool a1(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const double xs[] = {0.02, 0.05, 0.1};
    const double taus[] = {0.5, 1.0, 2.0};
    double worst_pde = 0.0, worst_z = 0.0;
    for (const ParamSet* ps : {&kCirHigh, &kCirLow}) {
        const ModelSpec model = make_model(ModelKind::CIR, *ps);
        const AffineCoefficients oracle = cir_affine(*ps);
        for (double tau : taus) {
            SolverConfig sc;
            sc.n_time_steps = 400;
            const SolutionSurface surf =
                solve_tse(model, bond_payoff(), tau, uniform_grid(0.0, 2.0, 400), sc);
            McConfig mc;
            mc.n_paths = 100000;
            mc.steps_per_year = 256;
            mc.seed = kSeed;
            for (double x : xs) {
                const double truth = oracle.price(x, tau);
                worst_pde = std::max(worst_pde, std::abs(surf.value_at(x, 0.0) - truth));
                const McEstimate est = price_u(model, bond_payoff(), x, 0.0, tau, mc);
                worst_z = std::max(worst_z, std::abs(est.value - truth) / est.std_error);
            }
        }
    }
    const double secs = seconds_since(t0);
    detail = "max |pde-oracle| " + fmt(worst_pde) + " (tol 1e-4), max mc |z| " +
             fmt(worst_z) + " (tol 3), " + fmt(secs) + " s (limit 60)";
    return worst_pde <= 1e-4 && worst_z <= 3.0 && secs <= 60.0;
}

// A2: the Vasicek solve on [-1, 2] matches its closed form to 1e-4, and every
//     closed form matches the RK4 Riccati integration to 1e-10.
bool a2(std::string& detail) {
    const ModelSpec model = vasicek();
    const AffineCoefficients oracle = vasicek_affine(kVasicek);
    const double xs[] = {0.02, 0.05, 0.1};
    const double taus[] = {0.5, 1.0, 2.0};
    double worst_pde = 0.0;
    for (double tau : taus) {
        SolverConfig sc;
        sc.n_time_steps = 400;
        const SolutionSurface surf =
            solve_tse(model, bond_payoff(), tau, uniform_grid(-1.0, 2.0, 400), sc);
        for (double x : xs)
            worst_pde = std::max(worst_pde,
                                 std::abs(surf.value_at(x, 0.0) - oracle.price(x, tau)));
    }

    double worst_ode = 0.0;
    const std::pair<ModelSpec, AffineCoefficients> cases[] = {
        {cir_high(), cir_affine(kCirHigh)},
        {cir_low(), cir_affine(kCirLow)},
        {vasicek(), vasicek_affine(kVasicek)},
    };
    for (const auto& [m, closed] : cases) {
        const AffineCoefficients rk4 = riccati_solve(m, 2.0, 4096);
        for (int i = 0; i <= 200; ++i) {
            const double tau = 2.0 * i / 200.0;
            worst_ode = std::max(worst_ode, std::abs(closed.A(tau) - rk4.A(tau)));
            worst_ode = std::max(worst_ode, std::abs(closed.B(tau) - rk4.B(tau)));
        }
    }
    detail = "max |pde-closed| " + fmt(worst_pde) + " (tol 1e-4), max |closed-rk4| " +
             fmt(worst_ode) + " (tol 1e-10)";
    return worst_pde <= 1e-4 && worst_ode <= 1e-10;
}

// A3: the one-sided boundary residual decays by >= 1.8 per grid halving for
//     both CIR regimes over 100->800, and sits at machine precision (<=1e-10)
//     on every level for Dothan.
bool a3(std::string& detail) {
    const CheckResult high = check_boundary_residual_convergence(cir_high());
    const CheckResult low = check_boundary_residual_convergence(cir_low());
    const CheckResult dot = check_boundary_residual_convergence(dothan());
    const bool dothan_flat = dot.passed() && dot.metrics.at("max_residual") <= 1e-10;
    detail = "decay factors >= " + fmt(high.metrics.count("min_factor") ? high.metrics.at("min_factor") : 0.0) +
             " / " + fmt(low.metrics.count("min_factor") ? low.metrics.at("min_factor") : 0.0) +
             " (tol 1.8), dothan max residual " + fmt(dot.metrics.at("max_residual")) +
             " (tol 1e-10)";
    return high.passed() && low.passed() && dothan_flat;
}

// A4: |alpha u_xx| at the innermost node falls monotonically under refinement
//     and ends <= 1e-3 for both CIR regimes.
bool a4(std::string& detail) {
    const CheckResult high = check_alpha_uxx_limit(cir_high());
    const CheckResult low = check_alpha_uxx_limit(cir_low());
    detail = "final values " + fmt(high.metrics.at("final_value")) + " / " +
             fmt(low.metrics.at("final_value")) + " (tol 1e-3, monotone)";
    return high.passed() && low.passed();
}

// A5: the v-representation and the first-variation estimator agree within 3
//     combined standard errors under common random numbers (Vasicek, Dothan),
//     and price_v matches the Riccati x-derivative on CIR.
bool a5(std::string& detail) {
    McConfig mc;
    mc.n_paths = 20000;
    mc.steps_per_year = 512;
    mc.seed = kSeed;
    const CheckResult vas = check_girsanov_identity(vasicek(), 1.0, mc);
    const CheckResult dot = check_girsanov_identity(dothan(), 1.0, mc);

    const ModelSpec model = cir_low();
    const AffineCoefficients oracle = cir_affine(kCirLow);
    const auto u = u_provider_from_affine(oracle, 1.0);
    McConfig mc_v = mc;
    mc_v.seed = 7;
    const std::pair<double, double> pts[] = {
        {0.02, 0.0}, {0.05, 0.0}, {0.10, 0.0}, {0.05, 0.5}, {0.08, 0.25}};
    double worst_z = 0.0;
    for (auto [x, t] : pts) {
        const McEstimate v = price_v(model, bond_payoff(), x, t, 1.0, u, mc_v);
        const double z = std::abs(v.value - oracle.dprice_dx(x, 1.0 - t)) / v.std_error;
        worst_z = std::max(worst_z, z);
    }
    detail = "vasicek z_max " + fmt(vas.metrics.at("z_max")) + ", dothan z_max " +
             fmt(dot.metrics.at("z_max")) + ", cir price_v |z| " + fmt(worst_z) +
             " (tol 3)";
    return vas.passed() && dot.passed() && worst_z <= 3.0;
}

// A6: on the martingale counterexample the MC estimate reproduces u = g within
//     3 standard errors while the PDE solver refuses the payoff.
bool a6(std::string& detail) {
    McConfig mc;
    mc.n_paths = 100000;
    mc.steps_per_year = 1024;
    mc.seed = kSeed;
    const CheckResult r = check_martingale_counterexample(mc);
    detail = "z_max " + fmt(r.metrics.at("z_max")) + " (tol 3), pde refused: " +
             (r.metrics.at("pde_refused") > 0 ? "yes" : "no");
    return r.passed();
}

// A7: with the boundary attainable (Feller violated), pinning u(0,t) = 0.5
//     inflates the error at (0.05, tau 1) by >= 10x while pinning the oracle
//     value recovers the price; with the Feller condition satisfied the
//     Dirichlet solve is refused outright.
bool a7(std::string& detail) {
    const CheckResult r = check_wrong_boundary_divergence(cir_low());

    bool refused = false;
    try {
        wrong_boundary_solve(cir_high(), bond_payoff(), 1.0, uniform_grid(0.0, 2.0, 64),
                             SolverConfig{}, [](double) { return 0.5; });
    } catch (const std::invalid_argument& e) {
        refused = std::string(e.what()).find("Feller") != std::string::npos;
    }
    detail = "error ratio " + fmt(r.metrics.at("ratio")) + " (tol 10), oracle-pinned error " +
             fmt(r.metrics.at("error_pinned_oracle")) + " (tol 1e-4), feller-satisfying refused: " +
             (refused ? "yes" : "no");
    return r.passed() && refused;
}

// A8: the affine closed forms satisfy the boundary identity
//     u_t(0,t) + beta(0,t) u_x(0,t) = 0 to 1e-8 for tau in [0, 2].
bool a8(std::string& detail) {
    const CheckResult high = check_affine_boundary(cir_high());
    const CheckResult low = check_affine_boundary(cir_low());
    detail = "residuals " + fmt(high.metrics.at("max_residual")) + " / " +
             fmt(low.metrics.at("max_residual")) + " (tol 1e-8)";
    return high.passed() && low.passed();
}

// A9: structural invariants: path nonnegativity, exact terminal data in both
//     engines, bit-identical reruns, bond prices in [0, 1], the comparison
//     principle under the implicit scheme, and far-field insensitivity.
bool a9(std::string& detail) {
    std::vector<std::string> failed;
    const ModelSpec model = cir_low();
    const Payoff bond = bond_payoff();

    McConfig mc;
    mc.n_paths = 20000;
    mc.steps_per_year = 128;
    mc.seed = kSeed;
    const PathBatch batch = simulate_paths(model, 0.05, 0.0, 1.0, mc);
    bool nonneg = true;
    for (double v : batch.values) nonneg = nonneg && v >= 0.0;
    if (!nonneg) failed.push_back("path nonnegativity");

    const Payoff table = table_payoff({{0.0, 0.3}, {1.0, 1.0}, {2.0, 1.0}});
    SolverConfig cn;
    cn.n_time_steps = 200;
    const SpatialGrid grid = uniform_grid(0.0, 2.0, 200);
    const SolutionSurface surf_table = solve_tse(model, table, 1.0, grid, cn);
    bool terminal = true;
    const int last = surf_table.n_times() - 1;
    for (int i = 0; i < surf_table.n_nodes(); ++i)
        terminal = terminal && surf_table.node(last, i) == table.g(grid.nodes[i]);
    const McEstimate at_expiry = price_u(model, table, 0.3, 1.0, 1.0, mc);
    terminal = terminal && at_expiry.value == table.g(0.3) && at_expiry.std_error == 0.0;
    if (!terminal) failed.push_back("terminal exactness");

    const McEstimate e1 = price_u(model, bond, 0.05, 0.0, 1.0, mc);
    const McEstimate e2 = price_u(model, bond, 0.05, 0.0, 1.0, mc);
    McConfig other = mc;
    other.seed = kSeed + 1;
    const McEstimate e3 = price_u(model, bond, 0.05, 0.0, 1.0, other);
    if (!(e1.value == e2.value && e1.std_error == e2.std_error && e1.value != e3.value))
        failed.push_back("seed determinism");

    SolverConfig implicit_sc;
    implicit_sc.theta = 1.0;
    implicit_sc.n_time_steps = 200;
    const SolutionSurface surf_bond = solve_tse(model, bond, 1.0, grid, implicit_sc);
    bool bounds = true;
    for (double v : surf_bond.values) bounds = bounds && v >= -1e-14 && v <= 1.0 + 1e-14;
    SolverConfig cn400;
    cn400.n_time_steps = 400;
    const SolutionSurface surf_cn =
        solve_tse(model, bond, 1.0, uniform_grid(0.0, 2.0, 400), cn400);
    for (double x : {0.02, 0.05, 0.1}) {
        const double v = surf_cn.value_at(x, 0.0);
        bounds = bounds && v >= 0.0 && v <= 1.0;
    }
    if (!bounds) failed.push_back("bond bounds");

    // The non-monotone extrapolation row makes the truncation node exempt.
    const SolutionSurface surf_tbl_implicit = solve_tse(model, table, 1.0, grid, implicit_sc);
    bool comparison = true;
    for (int j = 0; j < surf_bond.n_times(); ++j)
        for (int i = 0; i < surf_bond.n_nodes() - 1; ++i)
            comparison = comparison &&
                         surf_bond.node(j, i) >= surf_tbl_implicit.node(j, i) - 1e-14;
    if (!comparison) failed.push_back("comparison principle");

    SolverConfig cn_wide = cn400;
    const SolutionSurface surf_wide =
        solve_tse(model, bond, 1.0, uniform_grid(0.0, 4.0, 800), cn_wide);
    double ff = 0.0;
    for (auto [x, t] : {std::pair{0.02, 0.0}, {0.05, 0.0}, {0.1, 0.0}, {0.05, 0.5}})
        ff = std::max(ff, std::abs(surf_cn.value_at(x, t) - surf_wide.value_at(x, t)));
    if (ff > 1e-6) failed.push_back("far-field insensitivity (" + fmt(ff) + ")");

    if (failed.empty()) {
        detail = "nonnegativity, terminal data, determinism, bounds, comparison, "
                 "far field (" + fmt(ff) + " <= 1e-6) all hold";
        return true;
    }
    std::string list;
    for (const auto& f : failed) list += (list.empty() ? "" : ", ") + f;
    detail = "violated: " + list;
    return false;
}

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"cross-engine CIR bond agreement", a1},
        {"vasicek whole-line solve and closed-form vs rk4", a2},
        {"boundary residual convergence", a3},
        {"alpha u_xx boundary limit", a4},
        {"girsanov / first-variation identity", a5},
        {"martingale counterexample", a6},
        {"dirichlet-at-zero divergence", a7},
        {"affine boundary identity", a8},
        {"structural invariants", a9},
    };
    int failures = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << index << ": "
                  << c.label << " -- " << detail << "\n";
    }
    if (failures) std::cout << failures << " criterion(s) failed\n";
    return failures ? 1 : 0;
}
