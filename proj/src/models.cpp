#include "tse/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tse {

PiecewiseLinear::PiecewiseLinear(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.empty() || knots_.size() != values_.size())
        throw std::invalid_argument("PiecewiseLinear: knots/values size mismatch");
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (!(knots_[i] > knots_[i - 1]))
            throw std::invalid_argument("PiecewiseLinear: knots must be strictly increasing");
}

double PiecewiseLinear::operator()(double t) const {
    if (t <= knots_.front()) return values_.front();
    if (t >= knots_.back()) return values_.back();
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    const double w = (t - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
    return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double ParamSet::scalar(const std::string& name) const {
    auto it = scalars.find(name);
    if (it == scalars.end())
        throw std::invalid_argument("missing model parameter: " + name);
    return it->second;
}

double ModelSpec::alpha(double x, double t) const {
    const double s = sigma(x, t);
    return 0.5 * s * s;
}

double ModelSpec::drift0(double t) const {
    return tab_a ? (*tab_a)(t) : p_a;
}

double ModelSpec::drift1(double t) const {
    return tab_b ? (*tab_b)(t) : p_b;
}

double ModelSpec::vol_scale(double t) const {
    return tab_s ? (*tab_s)(t) : p_s;
}

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

std::shared_ptr<const PiecewiseLinear> table_or_constant(const ParamSet& p,
                                                         const std::string& name,
                                                         const std::string& model) {
    auto it = p.tables.find(name);
    if (it != p.tables.end())
        return std::make_shared<const PiecewiseLinear>(it->second);
    if (p.has_scalar(name))
        return std::make_shared<const PiecewiseLinear>(std::vector<double>{0.0},
                                                       std::vector<double>{p.scalar(name)});
    throw std::invalid_argument(model + ": missing table or scalar parameter '" + name + "'");
}

ModelSpec make_cir(const ParamSet& p) {
    const double a = p.scalar("a"), b = p.scalar("b"), s = p.scalar("sigma");
    require(a >= 0.0, "cir: requires a >= 0");
    require(s > 0.0, "cir: requires sigma > 0");
    ModelSpec m;
    m.name = "cir";
    m.kind = ModelKind::CIR;
    m.domain = Domain::HalfLine;
    m.family = CoeffFamily::AffineSqrt;
    m.params = p;
    m.p_a = a; m.p_b = b; m.p_s = s;
    m.beta = [a, b](double x, double) { return a - b * x; };
    m.sigma = [s](double x, double) { return s * std::sqrt(std::max(x, 0.0)); };
    m.alpha_x = [s](double, double) { return 0.5 * s * s; };
    m.beta_x = [b](double, double) { return -b; };
    // sigma_x blows up at the boundary; the first-variation estimator is
    // not offered for CIR.
    return m;
}

ModelSpec make_dothan(const ParamSet& p) {
    const double a = p.scalar("a"), s = p.scalar("sigma");
    require(s > 0.0, "dothan: requires sigma > 0");
    ModelSpec m;
    m.name = "dothan";
    m.kind = ModelKind::Dothan;
    m.domain = Domain::HalfLine;
    m.family = CoeffFamily::LinearLevel;
    m.params = p;
    m.p_a = a; m.p_s = s;
    m.beta = [a](double x, double) { return a * x; };
    m.sigma = [s](double x, double) { return s * x; };
    m.alpha_x = [s](double x, double) { return s * s * x; };
    m.beta_x = [a](double, double) { return a; };
    m.sigma_x = [s](double, double) { return s; };
    return m;
}

ModelSpec make_hull_white(const ParamSet& p) {
    auto ta = table_or_constant(p, "a", "hull_white");
    auto tb = table_or_constant(p, "b", "hull_white");
    auto ts = table_or_constant(p, "sigma", "hull_white");
    for (double v : ta->values())
        require(v >= 0.0, "hull_white: requires a(t) >= 0 at every knot");
    for (double v : ts->values())
        require(v > 0.0, "hull_white: requires sigma(t) > 0 at every knot");
    ModelSpec m;
    m.name = "hull_white";
    m.kind = ModelKind::HullWhite;
    m.domain = Domain::HalfLine;
    m.family = CoeffFamily::AffineSqrt;
    m.params = p;
    m.tab_a = ta; m.tab_b = tb; m.tab_s = ts;
    m.beta = [ta, tb](double x, double t) { return (*ta)(t) - (*tb)(t)*x; };
    m.sigma = [ts](double x, double t) { return (*ts)(t) * std::sqrt(std::max(x, 0.0)); };
    m.alpha_x = [ts](double, double t) { const double s = (*ts)(t); return 0.5 * s * s; };
    m.beta_x = [tb](double, double t) { return -(*tb)(t); };
    return m;
}

ModelSpec make_cev(const ParamSet& p) {
    const double a = p.scalar("a"), b = p.scalar("b");
    const double s = p.scalar("sigma"), g = p.scalar("gamma");
    require(s > 0.0, "cev: requires sigma > 0");
    require(g > 0.5 && g <= 1.0, "cev: requires gamma in (1/2, 1]");
    ModelSpec m;
    m.name = "cev";
    m.kind = ModelKind::CEV;
    m.domain = Domain::HalfLine;
    m.family = CoeffFamily::Cev;
    m.params = p;
    m.p_a = b; m.p_b = a; m.p_s = s; m.p_gamma = g;  // beta = b - a x
    m.beta = [a, b](double x, double) { return b - a * x; };
    m.sigma = [s, g](double x, double) { return s * std::pow(std::max(x, 0.0), g); };
    m.alpha_x = [s, g](double x, double) {
        return g * s * s * std::pow(std::max(x, 0.0), 2.0 * g - 1.0);
    };
    m.beta_x = [a](double, double) { return -a; };
    return m;
}

ModelSpec make_vasicek(const ParamSet& p) {
    const double a = p.scalar("a"), b = p.scalar("b"), s = p.scalar("sigma");
    require(b > 0.0, "vasicek: requires b > 0");
    require(s > 0.0, "vasicek: requires sigma > 0");
    ModelSpec m;
    m.name = "vasicek";
    m.kind = ModelKind::Vasicek;
    m.domain = Domain::WholeLine;
    m.family = CoeffFamily::AffineConst;
    m.params = p;
    m.p_a = a; m.p_b = b; m.p_s = s;
    m.beta = [a, b](double x, double) { return a - b * x; };
    m.sigma = [s](double, double) { return s; };
    m.alpha_x = [](double, double) { return 0.0; };
    m.beta_x = [b](double, double) { return -b; };
    m.sigma_x = [](double, double) { return 0.0; };
    return m;
}

}  // namespace

ModelSpec make_model(ModelKind kind, const ParamSet& params) {
    switch (kind) {
        case ModelKind::CIR: return make_cir(params);
        case ModelKind::Dothan: return make_dothan(params);
        case ModelKind::HullWhite: return make_hull_white(params);
        case ModelKind::CEV: return make_cev(params);
        case ModelKind::Vasicek: return make_vasicek(params);
        case ModelKind::Custom:
            throw std::invalid_argument(
                "custom models are registered in code via make_custom_model");
    }
    throw std::invalid_argument("unknown model kind");
}

namespace {

// Central difference, falling back to a one-sided 2nd order stencil when the
// half-line boundary is in the way.
CoeffFn numeric_derivative(CoeffFn f, Domain domain) {
    return [f = std::move(f), domain](double x, double t) {
        const double h = std::max(1e-5, 1e-5 * std::abs(x));
        if (domain == Domain::HalfLine && x - h < 0.0) {
            return (-3.0 * f(x, t) + 4.0 * f(x + h, t) - f(x + 2.0 * h, t)) / (2.0 * h);
        }
        return (f(x + h, t) - f(x - h, t)) / (2.0 * h);
    };
}

}  // namespace

ModelSpec make_custom_model(std::string name, Domain domain, CoeffFn beta,
                            CoeffFn sigma, CoeffFn alpha_x, CoeffFn beta_x,
                            CoeffFn sigma_x) {
    require(static_cast<bool>(beta) && static_cast<bool>(sigma),
            "custom model: beta and sigma are required");
    ModelSpec m;
    m.name = std::move(name);
    m.kind = ModelKind::Custom;
    m.domain = domain;
    m.family = CoeffFamily::Generic;
    m.beta = beta;
    m.sigma = sigma;
    if (alpha_x) {
        m.alpha_x = std::move(alpha_x);
    } else {
        CoeffFn half_sq = [sigma](double x, double t) {
            const double s = sigma(x, t);
            return 0.5 * s * s;
        };
        m.alpha_x = numeric_derivative(std::move(half_sq), domain);
    }
    m.beta_x = beta_x ? std::move(beta_x) : numeric_derivative(beta, domain);
    m.sigma_x = std::move(sigma_x);
    return m;
}

ModelSpec counterexample_model() {
    ModelSpec m;
    m.name = "counterexample";
    m.kind = ModelKind::Custom;
    m.domain = Domain::HalfLine;
    // beta = x/2, sigma = sqrt(2) x, so alpha = x^2 and
    // alpha g'' + beta g' = x g holds exactly for g = exp(-2 sqrt(x)).
    m.family = CoeffFamily::LinearLevel;
    m.p_a = 0.5;
    m.p_s = std::sqrt(2.0);
    m.beta = [](double x, double) { return 0.5 * x; };
    m.sigma = [](double x, double) { return std::sqrt(2.0) * x; };
    m.alpha_x = [](double x, double) { return 2.0 * x; };
    m.beta_x = [](double, double) { return 0.5; };
    m.sigma_x = [](double, double) { return std::sqrt(2.0); };
    return m;
}

// --- Coefficient growth / regularity validation ---------------------------

bool ValidationReport::all_pass() const {
    for (const auto& c : clauses)
        if (!c.informational && !c.pass) return false;
    return true;
}

std::vector<std::pair<double, double>> default_validation_grid(const ModelSpec& model,
                                                               double horizon) {
    // 41 x-nodes, log-spaced out to 10, crossed with 21 time nodes.
    std::vector<double> xs;
    const double lo = 1e-4, hi = 10.0;
    if (model.domain == Domain::HalfLine) {
        xs.push_back(0.0);
        for (int i = 0; i < 40; ++i)
            xs.push_back(lo * std::pow(hi / lo, i / 39.0));
    } else {
        for (int i = 19; i >= 0; --i)
            xs.push_back(-lo * std::pow(hi / lo, i / 19.0));
        xs.push_back(0.0);
        for (int i = 0; i < 20; ++i)
            xs.push_back(lo * std::pow(hi / lo, i / 19.0));
    }
    std::vector<std::pair<double, double>> grid;
    grid.reserve(xs.size() * 21);
    for (double x : xs)
        for (int j = 0; j <= 20; ++j)
            grid.emplace_back(x, horizon * j / 20.0);
    return grid;
}

ValidationReport validate_coefficients(const ModelSpec& model, double horizon,
                                     std::span<const std::pair<double, double>> grid) {
    std::vector<std::pair<double, double>> fallback;
    if (grid.empty()) {
        fallback = default_validation_grid(model, horizon);
        grid = fallback;
    }

    ValidationReport rep;
    const double x_edge = std::max_element(grid.begin(), grid.end())->first;

    ClauseResult growth;
    growth.clause = "linear_growth_beta_sigma";
    ClauseResult alpha_growth;
    alpha_growth.clause = "linear_growth_alpha_x";
    ClauseResult sigma_pos;
    sigma_pos.clause = "sigma_positive_off_zero";
    sigma_pos.measured = 1e300;
    const bool half = model.domain == Domain::HalfLine;
    for (const auto& [x, t] : grid) {
        const double b = model.beta(x, t), s = model.sigma(x, t);
        const double ax = model.alpha_x(x, t);
        // Half line: (|beta|+|sigma|)/(1+x).  Whole line: sigma is bounded by
        // C(1+max(x,0)), beta by C(1+|x|).
        const double denom = 1.0 + std::abs(x);
        const double r1 = half ? (std::abs(b) + std::abs(s)) / denom
                               : std::max(std::abs(s) / (1.0 + std::max(x, 0.0)),
                                          std::abs(b) / denom);
        if (r1 > growth.measured) {
            growth.measured = r1;
            growth.witness_x = x;
            growth.witness_t = t;
        }
        const double r2 = std::abs(ax) / denom;
        if (r2 > alpha_growth.measured) {
            alpha_growth.measured = r2;
            alpha_growth.witness_x = x;
            alpha_growth.witness_t = t;
        }
        const bool interior = (model.domain == Domain::WholeLine) || x > 0.0;
        if (interior && s < sigma_pos.measured) {
            sigma_pos.measured = s;
            sigma_pos.witness_x = x;
            sigma_pos.witness_t = t;
        }
    }
    // Unbounded coefficients (Dothan) push the growth ratio maximum to the
    // grid edge; the growth bound still holds, so flag it as informational.
    if (growth.witness_x >= x_edge * (1.0 - 1e-12)) {
        growth.informational = true;
        growth.note = "growth ratio maximal at grid edge; coefficients unbounded but linear";
    }
    if (alpha_growth.witness_x >= x_edge * (1.0 - 1e-12)) {
        alpha_growth.informational = true;
        alpha_growth.note = "growth ratio maximal at grid edge";
    }
    sigma_pos.pass = sigma_pos.measured > 0.0;

    rep.clauses.push_back(growth);
    rep.clauses.push_back(alpha_growth);
    rep.clauses.push_back(sigma_pos);

    if (model.domain == Domain::HalfLine) {
        ClauseResult bz;
        bz.clause = "beta_nonneg_at_zero";
        bz.measured = 1e300;
        ClauseResult sz;
        sz.clause = "sigma_zero_at_zero";
        for (int j = 0; j <= 20; ++j) {
            const double t = horizon * j / 20.0;
            const double b0 = model.beta(0.0, t);
            if (b0 < bz.measured) {
                bz.measured = b0;
                bz.witness_t = t;
            }
            const double s0 = std::abs(model.sigma(0.0, t));
            if (s0 > sz.measured) {
                sz.measured = s0;
                sz.witness_t = t;
            }
        }
        bz.pass = bz.measured >= 0.0;
        sz.pass = sz.measured <= 1e-12;
        if (!sz.pass) sz.note = "sigma(0,t) != 0: boundary is not degenerate";
        rep.clauses.push_back(bz);
        rep.clauses.push_back(sz);
    }

    ClauseResult holder;
    holder.clause = "alpha_x_regularity";
    holder.informational = true;
    holder.note = "Hoelder continuity of alpha_x is not verifiable by sampling; "
                  "only boundedness on the grid is checked";
    rep.clauses.push_back(holder);

    rep.growth_constant = std::max(rep.clauses[0].measured, rep.clauses[1].measured);
    return rep;
}

}  // namespace tse
