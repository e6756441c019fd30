#pragma once

// Affine bond-price oracle: P(x, tau) = A(tau) exp(-B(tau) x).
// Closed forms for CIR and Vasicek, RK4 Riccati integration for anything
// with beta and sigma^2 affine in x (Hull-White tables).  The closed forms
// are cross-checked against the ODE integrator at construction, so a sign
// slip in a transcription cannot survive.

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>

#include "tse/models.hpp"

namespace tse {

// beta(x,t) = beta0(t) + beta1(t) x,  alpha(x,t) = alpha0(t) + alpha1(t) x
struct AffineDecomposition {
    std::function<double(double)> beta0, beta1, alpha0, alpha1;
};

// Empty when the model is outside the affine family.
std::optional<AffineDecomposition> affine_decomposition(const ModelSpec& model);

struct AffineCoefficients {
    enum class Source { ClosedForm, RiccatiNumeric };

    Source source = Source::ClosedForm;
    double tau_max = 0.0;    // valid tau range [0, tau_max]; inf for closed forms
    double maturity = 0.0;   // calendar maturity used for time-dependent tables

    std::function<double(double)> A;  // A(tau), A(0) = 1
    std::function<double(double)> B;  // B(tau), B(0) = 0

    double price(double x, double tau) const;
    double dprice_dx(double x, double tau) const;
};

// Riccati conventions, tau = time to maturity:
//   B' = 1 + beta1 B - alpha1 B^2,   (log A)' = alpha0 B^2 - beta0 B
// with coefficients evaluated at calendar time t = maturity - tau.

AffineCoefficients cir_affine(const ParamSet& params);
AffineCoefficients vasicek_affine(const ParamSet& params);

// Numeric A, B tables via RK4 with cubic Hermite interpolation between
// nodes.  The bond matures at tau_max.  Refuses non-affine models.
AffineCoefficients riccati_solve(const ModelSpec& model, double tau_max,
                                 int n_ode_steps = 2048);

AffineCoefficients riccati_solve(const AffineDecomposition& decomp, double tau_max,
                                 int n_ode_steps = 2048, double maturity = 0.0);

// Max over tau_grid of |u_t(0,t) + beta(0,t) u_x(0,t)| for the affine price,
// with A' evaluated through the ODE right-hand side.
double affine_boundary_check(const AffineCoefficients& coeffs, const ModelSpec& model,
                             std::span<const double> tau_grid);

// (x, t) -> bond price at time t for maturity T, for use as an MC u-provider.
std::function<double(double, double)> u_provider_from_affine(AffineCoefficients coeffs,
                                                             double T);

// Columns tau, A, B at the given maturities, 17 significant digits.
void write_affine_csv(const AffineCoefficients& coeffs, std::span<const double> tau_grid,
                      std::ostream& os);

}  // namespace tse
