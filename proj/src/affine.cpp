#include "tse/affine.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace tse {

double AffineCoefficients::price(double x, double tau) const {
    return A(tau) * std::exp(-B(tau) * x);
}

double AffineCoefficients::dprice_dx(double x, double tau) const {
    return -B(tau) * price(x, tau);
}

std::optional<AffineDecomposition> affine_decomposition(const ModelSpec& model) {
    ModelSpec m = model;  // lambdas keep their own copy of the family slots
    switch (model.family) {
        case CoeffFamily::AffineSqrt:
            // beta = a(t) - b(t) x, alpha = (s(t)^2/2) x
            return AffineDecomposition{
                .beta0 = [m](double t) { return m.drift0(t); },
                .beta1 = [m](double t) { return -m.drift1(t); },
                .alpha0 = [](double) { return 0.0; },
                .alpha1 = [m](double t) { const double s = m.vol_scale(t); return 0.5 * s * s; },
            };
        case CoeffFamily::AffineConst:
            // beta = a - b x, alpha = s^2/2
            return AffineDecomposition{
                .beta0 = [m](double t) { return m.drift0(t); },
                .beta1 = [m](double t) { return -m.drift1(t); },
                .alpha0 = [m](double t) { const double s = m.vol_scale(t); return 0.5 * s * s; },
                .alpha1 = [](double) { return 0.0; },
            };
        default:
            return std::nullopt;
    }
}

namespace {

struct RiccatiTable {
    double h = 0.0;
    std::vector<double> logA, B, dlogA, dB;  // values and RHS at the nodes
};

// One cubic Hermite patch.
double hermite(double w, double h, double y0, double y1, double m0, double m1) {
    const double w2 = w * w, w3 = w2 * w;
    return (2.0 * w3 - 3.0 * w2 + 1.0) * y0 + (w3 - 2.0 * w2 + w) * h * m0 +
           (-2.0 * w3 + 3.0 * w2) * y1 + (w3 - w2) * h * m1;
}

double eval_table(const std::vector<double>& y, const std::vector<double>& dy,
                  double h, double tau_max, double tau) {
    if (tau < -1e-12 * std::max(1.0, tau_max) || tau > tau_max * (1.0 + 1e-12))
        throw std::domain_error("affine coefficients: tau outside solved range [0, " +
                                std::to_string(tau_max) + "]");
    tau = std::min(std::max(tau, 0.0), tau_max);
    const std::size_t last = y.size() - 1;
    std::size_t k = static_cast<std::size_t>(tau / h);
    if (k >= last) k = last - 1;
    const double w = (tau - static_cast<double>(k) * h) / h;
    return hermite(w, h, y[k], y[k + 1], dy[k], dy[k + 1]);
}

}  // namespace

AffineCoefficients riccati_solve(const AffineDecomposition& d, double tau_max,
                                 int n_ode_steps, double maturity) {
    if (!(tau_max > 0.0)) throw std::invalid_argument("riccati_solve: tau_max must be > 0");
    if (n_ode_steps < 16)
        throw std::invalid_argument("riccati_solve: n_ode_steps must be >= 16");

    auto tab = std::make_shared<RiccatiTable>();
    const int n = n_ode_steps;
    tab->h = tau_max / n;
    tab->logA.resize(n + 1);
    tab->B.resize(n + 1);
    tab->dlogA.resize(n + 1);
    tab->dB.resize(n + 1);

    auto rhs = [&d, maturity](double tau, double B, double& dlogA, double& dB) {
        const double t = maturity - tau;
        dB = 1.0 + d.beta1(t) * B - d.alpha1(t) * B * B;
        dlogA = d.alpha0(t) * B * B - d.beta0(t) * B;
    };

    double logA = 0.0, B = 0.0;
    rhs(0.0, B, tab->dlogA[0], tab->dB[0]);
    tab->logA[0] = 0.0;
    tab->B[0] = 0.0;
    const double h = tab->h;
    for (int k = 0; k < n; ++k) {
        const double tau = k * h;
        double ka1, kb1, ka2, kb2, ka3, kb3, ka4, kb4;
        rhs(tau, B, ka1, kb1);
        rhs(tau + 0.5 * h, B + 0.5 * h * kb1, ka2, kb2);
        rhs(tau + 0.5 * h, B + 0.5 * h * kb2, ka3, kb3);
        rhs(tau + h, B + h * kb3, ka4, kb4);
        logA += (h / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        B += (h / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
        tab->logA[k + 1] = logA;
        tab->B[k + 1] = B;
        rhs(tau + h, B, tab->dlogA[k + 1], tab->dB[k + 1]);
    }

    AffineCoefficients c;
    c.source = AffineCoefficients::Source::RiccatiNumeric;
    c.tau_max = tau_max;
    c.maturity = maturity;
    c.A = [tab, tau_max](double tau) {
        return std::exp(eval_table(tab->logA, tab->dlogA, tab->h, tau_max, tau));
    };
    c.B = [tab, tau_max](double tau) {
        return eval_table(tab->B, tab->dB, tab->h, tau_max, tau);
    };
    return c;
}

AffineCoefficients riccati_solve(const ModelSpec& model, double tau_max, int n_ode_steps) {
    auto d = affine_decomposition(model);
    if (!d)
        throw std::invalid_argument(
            "riccati_solve: model '" + model.name +
            "' is not in the affine family (beta, sigma^2 must be affine in x)");
    return riccati_solve(*d, tau_max, n_ode_steps, tau_max);
}

namespace {

// Closed forms are only trusted after agreeing with an independent RK4 run.
void crosscheck_closed_form(const AffineCoefficients& cf, const AffineDecomposition& d,
                            const char* which) {
    const double tau_max = 5.0;
    const AffineCoefficients num = riccati_solve(d, tau_max, 4096);
    for (double tau : {0.25, 0.5, 1.0, 2.0, 3.0, 5.0}) {
        const double dA = std::abs(cf.A(tau) - num.A(tau));
        const double dB = std::abs(cf.B(tau) - num.B(tau));
        if (dA > 1e-10 * std::max(1.0, std::abs(cf.A(tau))) ||
            dB > 1e-10 * std::max(1.0, std::abs(cf.B(tau))))
            throw std::runtime_error(std::string(which) +
                                     ": closed form disagrees with Riccati integration");
    }
}

}  // namespace

AffineCoefficients cir_affine(const ParamSet& params) {
    const double a = params.scalar("a");
    const double b = params.scalar("b");
    const double s = params.scalar("sigma");
    if (!(s > 0.0)) throw std::invalid_argument("cir_affine: requires sigma > 0");
    if (a < 0.0) throw std::invalid_argument("cir_affine: requires a >= 0");

    const double gamma = std::sqrt(b * b + 2.0 * s * s);
    const double expo = 2.0 * a / (s * s);

    AffineCoefficients c;
    c.source = AffineCoefficients::Source::ClosedForm;
    c.tau_max = std::numeric_limits<double>::infinity();
    c.B = [gamma, b](double tau) {
        const double e = std::expm1(gamma * tau);
        return 2.0 * e / ((gamma + b) * e + 2.0 * gamma);
    };
    c.A = [gamma, b, expo](double tau) {
        const double e = std::expm1(gamma * tau);
        const double base = 2.0 * gamma * std::exp(0.5 * (gamma + b) * tau) /
                            ((gamma + b) * e + 2.0 * gamma);
        return std::pow(base, expo);
    };

    ModelSpec probe = make_model(ModelKind::CIR, params);
    crosscheck_closed_form(c, *affine_decomposition(probe), "cir_affine");
    return c;
}

AffineCoefficients vasicek_affine(const ParamSet& params) {
    const double a = params.scalar("a");
    const double b = params.scalar("b");
    const double s = params.scalar("sigma");
    if (!(b > 0.0)) throw std::invalid_argument("vasicek_affine: requires b > 0");
    if (!(s > 0.0)) throw std::invalid_argument("vasicek_affine: requires sigma > 0");

    AffineCoefficients c;
    c.source = AffineCoefficients::Source::ClosedForm;
    c.tau_max = std::numeric_limits<double>::infinity();
    c.B = [b](double tau) { return -std::expm1(-b * tau) / b; };
    c.A = [a, b, s](double tau) {
        const double B = -std::expm1(-b * tau) / b;
        const double longy = a / b - 0.5 * s * s / (b * b);
        return std::exp((B - tau) * longy - 0.25 * s * s * B * B / b);
    };

    ModelSpec probe = make_model(ModelKind::Vasicek, params);
    crosscheck_closed_form(c, *affine_decomposition(probe), "vasicek_affine");
    return c;
}

double affine_boundary_check(const AffineCoefficients& coeffs, const ModelSpec& model,
                             std::span<const double> tau_grid) {
    if (model.domain != Domain::HalfLine)
        throw std::domain_error(
            "affine_boundary_check: requires a half-line model (the boundary "
            "condition lives at x = 0)");
    auto d = affine_decomposition(model);
    if (!d)
        throw std::invalid_argument("affine_boundary_check: model is not affine");
    double worst = 0.0;
    for (double tau : tau_grid) {
        const double t = coeffs.maturity - tau;
        const double A = coeffs.A(tau);
        const double B = coeffs.B(tau);
        // A'(tau) through the ODE RHS; u_t = -du/dtau.
        const double Aprime = A * (d->alpha0(t) * B * B - d->beta0(t) * B);
        const double beta0 = model.beta(0.0, t);
        const double residual = -Aprime - beta0 * B * A;
        worst = std::max(worst, std::abs(residual));
    }
    return worst;
}

std::function<double(double, double)> u_provider_from_affine(AffineCoefficients coeffs,
                                                             double T) {
    return [coeffs = std::move(coeffs), T](double x, double t) {
        return coeffs.price(x, T - t);
    };
}

void write_affine_csv(const AffineCoefficients& coeffs, std::span<const double> tau_grid,
                      std::ostream& os) {
    os << std::setprecision(17);
    os << "tau,A,B\n";
    for (double tau : tau_grid)
        os << tau << ',' << coeffs.A(tau) << ',' << coeffs.B(tau) << '\n';
}

}  // namespace tse
