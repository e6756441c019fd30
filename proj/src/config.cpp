#include "tse/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <initializer_list>
#include <string>

#include "tse/affine.hpp"
#include "tse/verify.hpp"

namespace tse {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path, msg);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

const json& need(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(join(path, key), "missing required field");
    return j.at(key);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known) fail(join(path, item.key()), "unknown field");
    }
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<std::int64_t>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

ModelSpec parse_model(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"kind", "params"});
    const std::string kind_str = as_string(need(j, path, "kind"), join(path, "kind"));

    ModelKind kind{};
    if (kind_str == "cir") kind = ModelKind::CIR;
    else if (kind_str == "dothan") kind = ModelKind::Dothan;
    else if (kind_str == "hull_white") kind = ModelKind::HullWhite;
    else if (kind_str == "cev") kind = ModelKind::CEV;
    else if (kind_str == "vasicek") kind = ModelKind::Vasicek;
    else
        fail(join(path, "kind"), "unknown model kind '" + kind_str +
                                     "' (expected cir, dothan, hull_white, cev or vasicek)");

    const json& params = need(j, path, "params");
    const std::string ppath = join(path, "params");
    if (!params.is_object()) fail(ppath, "expected an object");

    std::vector<std::string> allowed = {"a", "b", "sigma"};
    if (kind == ModelKind::Dothan) allowed = {"a", "sigma"};
    if (kind == ModelKind::CEV) allowed = {"a", "b", "sigma", "gamma"};

    ParamSet ps;
    for (const auto& item : params.items()) {
        const std::string kpath = join(ppath, item.key());
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            fail(kpath, "unknown parameter for model kind '" + kind_str + "'");
        const json& v = item.value();
        if (v.is_number()) {
            ps.scalars[item.key()] = v.get<double>();
        } else if (v.is_array()) {
            std::vector<double> knots, values;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const json& row = v[i];
                if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
                    !row[1].is_number())
                    fail(kpath + "[" + std::to_string(i) + "]", "expected a [t, value] pair");
                knots.push_back(row[0].get<double>());
                values.push_back(row[1].get<double>());
            }
            try {
                ps.tables.emplace(item.key(), PiecewiseLinear(knots, values));
            } catch (const std::exception& e) {
                fail(kpath, e.what());
            }
        } else {
            fail(kpath, "expected a number or a [[t, value], ...] table");
        }
    }

    try {
        return make_model(kind, ps);
    } catch (const std::exception& e) {
        fail(ppath, e.what());
    }
}

GridRecipe default_grid(const ModelSpec& model) {
    GridRecipe r;
    r.x_min = model.domain == Domain::HalfLine ? 0.0 : -1.0;
    return r;
}

GridRecipe parse_grid(const json& j, const std::string& path, const ModelSpec& model) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"kind", "x_min", "x_max", "n_intervals", "center", "strength"});

    GridRecipe r = default_grid(model);
    const std::string kind = j.contains("kind")
                                 ? as_string(j.at("kind"), join(path, "kind"))
                                 : "uniform";
    if (kind == "uniform") {
        r.kind = GridKind::Uniform;
    } else if (kind == "sinh") {
        r.kind = GridKind::SinhStretched;
        r.center = as_number(need(j, path, "center"), join(path, "center"));
        r.strength = as_number(need(j, path, "strength"), join(path, "strength"));
    } else {
        fail(join(path, "kind"), "unknown grid kind '" + kind + "' (expected uniform or sinh)");
    }
    if (j.contains("x_min")) r.x_min = as_number(j.at("x_min"), join(path, "x_min"));
    if (j.contains("x_max")) r.x_max = as_number(j.at("x_max"), join(path, "x_max"));
    if (j.contains("n_intervals"))
        r.n_intervals = static_cast<int>(
            as_integer(j.at("n_intervals"), join(path, "n_intervals")));

    if (model.domain == Domain::HalfLine && r.x_min != 0.0)
        fail(join(path, "x_min"), "must be 0 for half-line models");
    if (model.domain == Domain::WholeLine && !(r.x_min < 0.0 && r.x_max > 0.0))
        fail(join(path, "x_min"), "whole-line grid must straddle 0");

    try {
        build_grid(r);  // surface range/count errors with a config path now
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
    return r;
}

void parse_pde_config(const json& j, const std::string& path, const ModelSpec& model,
                      RunConfig& out) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path,
               {"grid", "theta", "n_time_steps", "rannacher_steps", "far_field",
                "far_field_value"});

    out.grid_recipe = j.contains("grid")
                          ? parse_grid(j.at("grid"), join(path, "grid"), model)
                          : default_grid(model);

    if (j.contains("theta")) {
        out.solver.theta = as_number(j.at("theta"), join(path, "theta"));
        if (!(out.solver.theta >= 0.0 && out.solver.theta <= 1.0))
            fail(join(path, "theta"), "must lie in [0, 1]");
    }
    if (j.contains("n_time_steps")) {
        const auto m = as_integer(j.at("n_time_steps"), join(path, "n_time_steps"));
        if (m < 2) fail(join(path, "n_time_steps"), "must be at least 2");
        out.solver.n_time_steps = static_cast<int>(m);
    }
    if (j.contains("rannacher_steps")) {
        const auto m = as_integer(j.at("rannacher_steps"), join(path, "rannacher_steps"));
        if (m < 0) fail(join(path, "rannacher_steps"), "must be non-negative");
        out.solver.rannacher_steps = static_cast<int>(m);
    }
    const std::string ff = j.contains("far_field")
                               ? as_string(j.at("far_field"), join(path, "far_field"))
                               : "zero_second_derivative";
    if (ff == "zero_second_derivative") {
        out.solver.far_field = FarFieldPolicy::ZeroSecondDerivative;
    } else if (ff == "dirichlet_value") {
        out.solver.far_field = FarFieldPolicy::DirichletValue;
        const double v = as_number(need(j, path, "far_field_value"),
                                   join(path, "far_field_value"));
        out.solver.far_field_value = [v](double, double) { return v; };
    } else {
        fail(join(path, "far_field"),
             "unknown policy '" + ff + "' (expected zero_second_derivative or dirichlet_value)");
    }
}

void parse_mc_config(const json& j, const std::string& path, RunConfig& out) {
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path, {"n_paths", "steps_per_year", "seed", "scheme"});

    if (j.contains("n_paths")) {
        const auto n = as_integer(j.at("n_paths"), join(path, "n_paths"));
        if (n < 1) fail(join(path, "n_paths"), "must be positive");
        out.mc.n_paths = n;
    }
    if (j.contains("steps_per_year")) {
        const auto n = as_integer(j.at("steps_per_year"), join(path, "steps_per_year"));
        if (n < 1) fail(join(path, "steps_per_year"), "must be positive");
        out.mc.steps_per_year = static_cast<int>(n);
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                       s.get<std::int64_t>() < 0))
            fail(join(path, "seed"), "expected a non-negative integer");
        out.mc.seed = s.get<std::uint64_t>();
        out.mc_seed_given = true;
    }
    if (j.contains("scheme")) {
        const std::string s = as_string(j.at("scheme"), join(path, "scheme"));
        if (s == "full_truncation") out.mc.scheme = McScheme::EulerFullTruncation;
        else if (s == "reflect") out.mc.scheme = McScheme::EulerReflect;
        else
            fail(join(path, "scheme"),
                 "unknown scheme '" + s + "' (expected full_truncation or reflect)");
    }
}

Payoff parse_payoff(const json& j, const std::string& path, const ModelSpec& model,
                    double horizon) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string kind = as_string(need(j, path, "kind"), join(path, "kind"));

    if (kind == "bond") {
        check_keys(j, path, {"kind"});
        return bond_payoff();
    }
    if (kind == "counterexample") {
        check_keys(j, path, {"kind"});
        return counterexample_payoff();
    }
    if (kind == "custom_table") {
        check_keys(j, path, {"kind", "points"});
        const json& pts = need(j, path, "points");
        const std::string tpath = join(path, "points");
        if (!pts.is_array()) fail(tpath, "expected an array of [x, value] pairs");
        std::vector<std::pair<double, double>> table;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const json& row = pts[i];
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
                !row[1].is_number())
                fail(tpath + "[" + std::to_string(i) + "]", "expected an [x, value] pair");
            table.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
        try {
            return table_payoff(table);
        } catch (const std::exception& e) {
            fail(tpath, e.what());
        }
    }
    if (kind == "call_on_bond") {
        check_keys(j, path, {"kind", "strike", "bond_maturity"});
        const double strike = as_number(need(j, path, "strike"), join(path, "strike"));
        if (!(strike > 0.0)) fail(join(path, "strike"), "must be positive");
        const double bond_maturity =
            as_number(need(j, path, "bond_maturity"), join(path, "bond_maturity"));
        if (!(bond_maturity > horizon))
            fail(join(path, "bond_maturity"),
                 "must exceed the horizon (the option expires before the bond)");

        const auto decomp = affine_decomposition(model);
        if (!decomp)
            fail(join(path, "kind"),
                 "call_on_bond needs an affine model for the inner bond price; "
                 "use custom_table otherwise");
        const double tau_inner = bond_maturity - horizon;
        AffineCoefficients coeffs =
            model.kind == ModelKind::CIR       ? cir_affine(model.params)
            : model.kind == ModelKind::Vasicek ? vasicek_affine(model.params)
                                               : riccati_solve(*decomp, tau_inner, 4096,
                                                               bond_maturity);
        auto inner = [coeffs = std::move(coeffs), tau_inner](double x) {
            return coeffs.price(x, tau_inner);
        };
        try {
            return call_on_bond(std::move(inner), strike);
        } catch (const std::exception& e) {
            fail(path, e.what());
        }
    }
    fail(join(path, "kind"),
         "unknown payoff kind '" + kind +
             "' (expected bond, call_on_bond, counterexample or custom_table)");
}

}  // namespace

SpatialGrid build_grid(const GridRecipe& r) {
    return r.kind == GridKind::Uniform
               ? uniform_grid(r.x_min, r.x_max, r.n_intervals)
               : sinh_grid(r.x_min, r.x_max, r.n_intervals, r.center, r.strength);
}

RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) fail("config", "top level must be a JSON object");
    check_keys(j, "",
               {"run_id", "model", "payoff", "horizon", "evaluation_points", "mc_config",
                "pde_config", "oracle", "checks", "ladder", "output_dir"});

    RunConfig cfg;
    cfg.raw = j;

    cfg.run_id = as_string(need(j, "", "run_id"), "run_id");
    if (cfg.run_id.empty()) fail("run_id", "must not be empty");
    for (char c : cfg.run_id)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
            fail("run_id", "only letters, digits, '.', '-' and '_' are allowed");

    cfg.horizon = as_number(need(j, "", "horizon"), "horizon");
    if (!(cfg.horizon > 0.0)) fail("horizon", "must be positive");

    cfg.model = parse_model(need(j, "", "model"), "model");

    if (j.contains("pde_config"))
        parse_pde_config(j.at("pde_config"), "pde_config", cfg.model, cfg);
    else
        cfg.grid_recipe = default_grid(cfg.model);
    cfg.grid = build_grid(cfg.grid_recipe);

    cfg.payoff = j.contains("payoff")
                     ? parse_payoff(j.at("payoff"), "payoff", cfg.model, cfg.horizon)
                     : bond_payoff();

    if (j.contains("evaluation_points")) {
        const json& pts = j.at("evaluation_points");
        if (!pts.is_array()) fail("evaluation_points", "expected an array of [x, t] pairs");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string epath = "evaluation_points[" + std::to_string(i) + "]";
            const json& row = pts[i];
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
                !row[1].is_number())
                fail(epath, "expected an [x, t] pair");
            const double x = row[0].get<double>(), t = row[1].get<double>();
            if (!(t >= 0.0 && t <= cfg.horizon))
                fail(epath, "t must lie in [0, horizon]");
            if (x < cfg.grid.x_min() || x > cfg.grid.x_max())
                fail(epath, "x lies outside the pde grid");
            cfg.evaluation_points.emplace_back(x, t);
        }
    }

    if (j.contains("mc_config")) parse_mc_config(j.at("mc_config"), "mc_config", cfg);

    if (j.contains("oracle")) {
        const json& o = j.at("oracle");
        if (o.is_boolean()) {
            cfg.oracle = o.get<bool>();
            if (cfg.oracle) {
                if (!affine_decomposition(cfg.model))
                    fail("oracle", cfg.model.name + " has no affine oracle");
                if (cfg.payoff.name != "bond")
                    fail("oracle", "the affine oracle prices zero-coupon bonds only");
            }
        } else if (o.is_string() && o.get<std::string>() == "auto") {
            cfg.oracle = affine_decomposition(cfg.model).has_value() &&
                         cfg.payoff.name == "bond";
        } else {
            fail("oracle", "expected true, false or \"auto\"");
        }
    } else {
        cfg.oracle = affine_decomposition(cfg.model).has_value() &&
                     cfg.payoff.name == "bond";
    }

    if (j.contains("checks")) {
        const json& cs = j.at("checks");
        if (!cs.is_array()) fail("checks", "expected an array of check names");
        const auto& known = all_check_names();
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const std::string cpath = "checks[" + std::to_string(i) + "]";
            const std::string name = as_string(cs[i], cpath);
            if (std::find(known.begin(), known.end(), name) == known.end())
                fail(cpath, "unknown check '" + name + "'");
            cfg.checks.push_back(name);
        }
    } else {
        cfg.checks = all_check_names();
    }

    if (j.contains("ladder")) {
        const json& lad = j.at("ladder");
        if (!lad.is_array() || lad.empty())
            fail("ladder", "expected a non-empty array of [n_intervals, n_time_steps] pairs");
        for (std::size_t i = 0; i < lad.size(); ++i) {
            const std::string lpath = "ladder[" + std::to_string(i) + "]";
            const json& row = lad[i];
            if (!row.is_array() || row.size() != 2 || !row[0].is_number_integer() ||
                !row[1].is_number_integer())
                fail(lpath, "expected an [n_intervals, n_time_steps] pair");
            const auto n = row[0].get<std::int64_t>(), m = row[1].get<std::int64_t>();
            if (n < 8 || m < 2) fail(lpath, "ladder level too coarse");
            cfg.ladder.emplace_back(static_cast<int>(n), static_cast<int>(m));
        }
    }

    if (j.contains("output_dir")) {
        cfg.output_dir = as_string(j.at("output_dir"), "output_dir");
        if (cfg.output_dir.empty()) fail("output_dir", "must not be empty");
    }

    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("config", "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        fail("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_run_config(j);
}

void require_mc_seed(const RunConfig& config) {
    if (!config.mc_seed_given)
        throw ConfigError("mc_config.seed",
                          "seed is mandatory when a Monte Carlo engine runs");
}

}  // namespace tse
