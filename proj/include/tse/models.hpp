#pragma once

// Short-rate model zoo.  A model is the coefficient pair (beta, sigma) of
//   u_t + (sigma^2/2) u_xx + beta u_x = x u
// together with the derivatives the Monte Carlo representations need
// (alpha_x, beta_x, sigma_x) and the state-space domain.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tse {

enum class Domain { HalfLine, WholeLine };

enum class ModelKind { CIR, Dothan, HullWhite, CEV, Vasicek, Custom };

// Kernel family used by the Monte Carlo path steppers.  Families with a
// closed coefficient form get vectorized steppers; Generic falls back to
// calling the std::function coefficients per point.
enum class CoeffFamily {
    AffineSqrt,   // beta = a(t) - b(t) x,  sigma = s(t) sqrt(x)   (CIR, Hull-White)
    AffineConst,  // beta = a - b x,        sigma = s              (Vasicek)
    LinearLevel,  // beta = a x,            sigma = s x            (Dothan)
    Cev,          // beta = a - b x,        sigma = s x^gamma
    Generic,
};

// Piecewise-linear table on knots t_0 < ... < t_m, clamped outside.
class PiecewiseLinear {
  public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> knots, std::vector<double> values);

    double operator()(double t) const;
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

  private:
    std::vector<double> knots_;
    std::vector<double> values_;
};

struct ParamSet {
    std::map<std::string, double> scalars;
    std::map<std::string, PiecewiseLinear> tables;

    double scalar(const std::string& name) const;  // throws invalid_argument if absent
    bool has_scalar(const std::string& name) const { return scalars.count(name) > 0; }
};

using CoeffFn = std::function<double(double x, double t)>;

struct ModelSpec {
    std::string name;
    ModelKind kind = ModelKind::Custom;
    Domain domain = Domain::HalfLine;
    CoeffFamily family = CoeffFamily::Generic;

    CoeffFn beta;      // drift
    CoeffFn sigma;     // diffusion (>= 0)
    CoeffFn alpha_x;   // d/dx (sigma^2/2)
    CoeffFn beta_x;    // d/dx beta
    CoeffFn sigma_x;   // d/dx sigma; empty when unavailable (e.g. CIR at 0)

    ParamSet params;

    // Family coefficient slots (AffineSqrt/AffineConst/LinearLevel/Cev).
    // Hull-White stores tables instead; query through drift0/drift1/vol_scale.
    double p_a = 0.0, p_b = 0.0, p_s = 0.0, p_gamma = 1.0;
    std::shared_ptr<const PiecewiseLinear> tab_a, tab_b, tab_s;

    bool has_sigma_x() const { return static_cast<bool>(sigma_x); }
    double alpha(double x, double t) const;  // sigma^2/2

    // Family parameters at calendar time t: beta = drift0 - drift1 * x for
    // AffineSqrt/AffineConst/Cev, beta = drift0 * x for LinearLevel.
    double drift0(double t) const;
    double drift1(double t) const;
    double vol_scale(double t) const;
};

ModelSpec make_model(ModelKind kind, const ParamSet& params);

// Custom models are registered in code.  alpha_x, beta_x may be omitted and
// are then built by central differencing (h = max(1e-5, 1e-5 x)).
ModelSpec make_custom_model(std::string name, Domain domain, CoeffFn beta,
                            CoeffFn sigma, CoeffFn alpha_x = nullptr,
                            CoeffFn beta_x = nullptr, CoeffFn sigma_x = nullptr);

// beta = x/2, sigma = sqrt(2) x: with g = exp(-2 sqrt(x)) the discounted
// payoff is a martingale and u(x,t) = g(x) identically, even though g is not
// Lipschitz at 0.
ModelSpec counterexample_model();

// --- Coefficient growth / regularity validation ---------------------------

struct ClauseResult {
    std::string clause;
    bool pass = true;
    bool informational = false;  // reported but not required (Dothan growth)
    double measured = 0.0;       // witness value (constant, coefficient, ...)
    double witness_x = 0.0;
    double witness_t = 0.0;
    std::string note;
};

struct ValidationReport {
    std::vector<ClauseResult> clauses;
    double growth_constant = 0.0;  // fitted C in |beta|+|sigma|+|alpha_x| <= C(1+x)
    bool all_pass() const;
};

std::vector<std::pair<double, double>> default_validation_grid(const ModelSpec& model,
                                                               double horizon);

ValidationReport validate_coefficients(const ModelSpec& model, double horizon,
                                     std::span<const std::pair<double, double>> grid = {});

}  // namespace tse
