#include <doctest.h>

#include <string>

#include "tse/config.hpp"
#include "tse/verify.hpp"

using namespace tse;
using nlohmann::json;

namespace {

json base() {
    return json{{"run_id", "t1"},
                {"horizon", 1.0},
                {"model", {{"kind", "cir"}, {"params", {{"a", 0.01}, {"b", 0.5}, {"sigma", 0.3}}}}}};
}

// The field path is the load-bearing part of every validation error.
std::string field_of(const json& j) {
    try {
        parse_run_config(j);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

}  // namespace

TEST_CASE("minimal config fills documented defaults") {
    RunConfig cfg = parse_run_config(base());
    CHECK(cfg.run_id == "t1");
    CHECK(cfg.model.kind == ModelKind::CIR);
    CHECK(cfg.payoff.name == "bond");
    CHECK(cfg.grid_recipe.kind == GridKind::Uniform);
    CHECK(cfg.grid_recipe.x_min == 0.0);
    CHECK(cfg.grid_recipe.x_max == 2.0);
    CHECK(cfg.grid_recipe.n_intervals == 400);
    CHECK(cfg.solver.theta == 0.5);
    CHECK(cfg.solver.n_time_steps == 400);
    CHECK(cfg.oracle);  // auto: affine model, bond payoff
    CHECK(cfg.checks == all_check_names());
    CHECK(cfg.output_dir == "runs");
    CHECK_FALSE(cfg.mc_seed_given);
    CHECK_THROWS_AS(require_mc_seed(cfg), ConfigError);
    try {
        require_mc_seed(cfg);
    } catch (const ConfigError& e) {
        CHECK(e.field() == "mc_config.seed");
        CHECK(std::string(e.what()).find("mc_config.seed: ") == 0);
    }
}

TEST_CASE("vasicek defaults to a whole-line grid") {
    json j = base();
    j["model"] = {{"kind", "vasicek"},
                  {"params", {{"a", 0.05}, {"b", 0.3}, {"sigma", 0.02}}}};
    RunConfig cfg = parse_run_config(j);
    CHECK(cfg.grid_recipe.x_min == -1.0);
    CHECK(cfg.model.domain == Domain::WholeLine);
}

TEST_CASE("error paths name the offending field") {
    json j;

    j = base();
    j.erase("run_id");
    CHECK(field_of(j) == "run_id");

    j = base();
    j["run_id"] = "bad id!";
    CHECK(field_of(j) == "run_id");

    j = base();
    j["surprise"] = 1;
    CHECK(field_of(j) == "surprise");

    j = base();
    j["horizon"] = 0.0;
    CHECK(field_of(j) == "horizon");

    j = base();
    j["model"]["kind"] = "bdt";
    CHECK(field_of(j) == "model.kind");

    j = base();
    j["model"]["params"]["zeta"] = 1.0;
    CHECK(field_of(j) == "model.params.zeta");

    j = base();
    j["model"]["params"].erase("sigma");
    CHECK(field_of(j) == "model.params");

    j = base();
    j["model"]["params"]["sigma"] = "big";
    CHECK(field_of(j) == "model.params.sigma");

    j = base();
    j["pde_config"] = {{"theta", 1.5}};
    CHECK(field_of(j) == "pde_config.theta");

    j = base();
    j["pde_config"] = {{"n_time_steps", 1}};
    CHECK(field_of(j) == "pde_config.n_time_steps");

    j = base();
    j["pde_config"] = {{"far_field", "dirichlet_value"}};
    CHECK(field_of(j) == "pde_config.far_field_value");

    j = base();
    j["pde_config"] = {{"grid", {{"kind", "sinh"}, {"strength", 4.0}}}};
    CHECK(field_of(j) == "pde_config.grid.center");

    j = base();
    j["pde_config"] = {{"grid", {{"x_min", 0.1}}}};
    CHECK(field_of(j) == "pde_config.grid.x_min");

    j = base();
    j["model"] = {{"kind", "vasicek"},
                  {"params", {{"a", 0.05}, {"b", 0.3}, {"sigma", 0.02}}}};
    j["pde_config"] = {{"grid", {{"x_min", 0.5}, {"x_max", 2.0}}}};
    CHECK(field_of(j) == "pde_config.grid.x_min");

    j = base();
    j["evaluation_points"] = {{0.05, 0.0}, {3.0, 0.0}};
    CHECK(field_of(j) == "evaluation_points[1]");

    j = base();
    j["evaluation_points"] = {{0.05, 2.0}};
    CHECK(field_of(j) == "evaluation_points[0]");

    j = base();
    j["mc_config"] = {{"seed", -4}};
    CHECK(field_of(j) == "mc_config.seed");

    j = base();
    j["mc_config"] = {{"seed", 1.5}};
    CHECK(field_of(j) == "mc_config.seed");

    j = base();
    j["mc_config"] = {{"scheme", "milstein"}};
    CHECK(field_of(j) == "mc_config.scheme");

    j = base();
    j["payoff"] = {{"kind", "call_on_bond"}, {"strike", -0.1}, {"bond_maturity", 2.0}};
    CHECK(field_of(j) == "payoff.strike");

    j = base();
    j["payoff"] = {{"kind", "call_on_bond"}, {"strike", 0.9}, {"bond_maturity", 0.5}};
    CHECK(field_of(j) == "payoff.bond_maturity");

    j = base();
    j["checks"] = {"girsanov_identity", "spectral_gap"};
    CHECK(field_of(j) == "checks[1]");

    j = base();
    j["ladder"] = {{4, 100}};
    CHECK(field_of(j) == "ladder[0]");

    j = base();
    j["oracle"] = "yes";
    CHECK(field_of(j) == "oracle");

    j = base();
    j["output_dir"] = "";
    CHECK(field_of(j) == "output_dir");
}

TEST_CASE("call_on_bond requires an affine model") {
    json j = base();
    j["model"] = {{"kind", "dothan"}, {"params", {{"a", 0.1}, {"sigma", 0.2}}}};
    j["payoff"] = {{"kind", "call_on_bond"}, {"strike", 0.9}, {"bond_maturity", 2.0}};
    try {
        parse_run_config(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "payoff.kind");
        CHECK(e.message().find("affine") != std::string::npos);
    }

    // On CIR it builds, marks the kink, and resolves the inner bond price.
    j = base();
    j["horizon"] = 1.0;
    j["payoff"] = {{"kind", "call_on_bond"}, {"strike", 0.9}, {"bond_maturity", 2.0}};
    RunConfig cfg = parse_run_config(j);
    CHECK(cfg.payoff.lipschitz_only);
    CHECK(cfg.payoff.g(0.0) > 0.0);
}

TEST_CASE("oracle resolution") {
    json j = base();
    j["model"] = {{"kind", "dothan"}, {"params", {{"a", 0.1}, {"sigma", 0.2}}}};
    CHECK_FALSE(parse_run_config(j).oracle);  // auto, no affine oracle

    j["oracle"] = true;
    CHECK(field_of(j) == "oracle");

    j = base();
    j["payoff"] = {{"kind", "counterexample"}};
    CHECK_FALSE(parse_run_config(j).oracle);  // affine model but not a bond

    j["oracle"] = true;
    CHECK(field_of(j) == "oracle");

    j = base();
    j["oracle"] = false;
    CHECK_FALSE(parse_run_config(j).oracle);
}

TEST_CASE("explicit sections round-trip") {
    json j = base();
    j["pde_config"] = {{"grid",
                        {{"kind", "sinh"},
                         {"x_max", 3.0},
                         {"n_intervals", 150},
                         {"center", 0.1},
                         {"strength", 3.0}}},
                       {"theta", 1.0},
                       {"n_time_steps", 64},
                       {"rannacher_steps", 2},
                       {"far_field", "dirichlet_value"},
                       {"far_field_value", 0.25}};
    j["mc_config"] = {{"n_paths", 5000},
                      {"steps_per_year", 16},
                      {"seed", 0},
                      {"scheme", "reflect"}};
    j["evaluation_points"] = {{0.05, 0.0}};
    j["checks"] = {"affine_boundary_check"};
    j["ladder"] = {{100, 100}, {200, 200}};
    j["output_dir"] = "out";

    RunConfig cfg = parse_run_config(j);
    CHECK(cfg.grid_recipe.kind == GridKind::SinhStretched);
    CHECK(cfg.grid_recipe.n_intervals == 150);
    CHECK(cfg.grid.x_max() == doctest::Approx(3.0));
    CHECK(cfg.solver.theta == 1.0);
    CHECK(cfg.solver.n_time_steps == 64);
    CHECK(cfg.solver.rannacher_steps == 2);
    CHECK(cfg.solver.far_field == FarFieldPolicy::DirichletValue);
    CHECK(cfg.solver.far_field_value(1.0, 0.5) == 0.25);
    CHECK(cfg.mc.n_paths == 5000);
    CHECK(cfg.mc.steps_per_year == 16);
    CHECK(cfg.mc.seed == 0);
    CHECK(cfg.mc_seed_given);  // seed 0 still counts as given
    CHECK(cfg.mc.scheme == McScheme::EulerReflect);
    CHECK(cfg.evaluation_points.size() == 1);
    CHECK(cfg.checks == std::vector<std::string>{"affine_boundary_check"});
    CHECK(cfg.ladder == std::vector<std::pair<int, int>>{{100, 100}, {200, 200}});
    CHECK(cfg.output_dir == "out");
    CHECK_NOTHROW(require_mc_seed(cfg));
}

TEST_CASE("hull_white accepts coefficient tables") {
    json j = base();
    j["model"] = {{"kind", "hull_white"},
                  {"params",
                   {{"a", {{0.0, 0.04}, {1.0, 0.05}}},
                    {"b", 0.5},
                    {"sigma", {{0.0, 0.3}, {1.0, 0.25}}}}}};
    RunConfig cfg = parse_run_config(j);
    CHECK(cfg.model.kind == ModelKind::HullWhite);
    CHECK(cfg.oracle);  // riccati oracle applies

    j["model"]["params"]["a"] = {{0.0, 0.04}, {1.0, "x"}};
    CHECK(field_of(j) == "model.params.a[1]");
}

TEST_CASE("load_run_config reports file problems under the config field") {
    try {
        load_run_config("/nonexistent/path.json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "config");
    }
}
