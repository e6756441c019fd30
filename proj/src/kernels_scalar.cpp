#include "tse/mc_kernels.hpp"

#include <cmath>

// The temporaries pin the operation order; the AVX2 variants mirror it
// instruction for instruction so the two backends agree bitwise.

namespace tse::kernels::scalar {

namespace {

inline double stored_of(double x, Clamp clamp) {
    return clamp == Clamp::FloorZero ? std::max(x, 0.0) : x;
}

template <class DriftVol>
inline void step_generic(double* x, double* acc, const double* z, int n, double dt,
                         double sqrt_dt, Clamp clamp, DriftVol dv) {
    for (int i = 0; i < n; ++i) {
        const double xo = x[i];
        const double so = stored_of(xo, clamp);
        const auto [drift, vol] = dv(so);
        const double incr = drift * dt;
        const double shock = vol * (sqrt_dt * z[i]);
        double xn = (xo + incr) + shock;
        if (clamp == Clamp::Reflect) xn = std::fabs(xn);
        const double sn = stored_of(xn, clamp);
        acc[i] += so + sn;
        x[i] = xn;
    }
}

}  // namespace

void step_affine_sqrt(double* x, double* acc, const double* z, int n, double dt,
                      double sqrt_dt, StepCoeffs c, Clamp clamp) {
    step_generic(x, acc, z, n, dt, sqrt_dt, clamp, [c](double xa) {
        return std::pair{c.a - c.b * xa, c.s * std::sqrt(xa)};
    });
}

void step_affine_const(double* x, double* acc, const double* z, int n, double dt,
                       double sqrt_dt, StepCoeffs c, Clamp clamp) {
    step_generic(x, acc, z, n, dt, sqrt_dt, clamp, [c](double xa) {
        return std::pair{c.a - c.b * xa, c.s};
    });
}

void step_linear(double* x, double* acc, const double* z, int n, double dt,
                 double sqrt_dt, StepCoeffs c, Clamp clamp) {
    step_generic(x, acc, z, n, dt, sqrt_dt, clamp, [c](double xa) {
        return std::pair{c.a * xa, c.s * xa};
    });
}

void step_cev(double* x, double* acc, const double* z, int n, double dt,
              double sqrt_dt, StepCoeffs c, Clamp clamp) {
    step_generic(x, acc, z, n, dt, sqrt_dt, clamp, [c](double xa) {
        return std::pair{c.a - c.b * xa, c.s * std::pow(xa, c.gamma)};
    });
}

}  // namespace tse::kernels::scalar
