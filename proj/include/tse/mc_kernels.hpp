#pragma once

// Euler path-stepping kernels.  One scalar reference implementation per
// coefficient family plus AVX2 variants selected at runtime; both use the
// same operation order (and -ffp-contract=off), so results are bit-identical.
//
// Full truncation (Lord et al.): the Euler state x is never clamped; the
// coefficients see xa = stored(x) and the trapezoid accumulator integrates
// stored values, where stored(x) = max(x,0) under FloorZero, x otherwise.

#include <cstdint>

namespace tse::kernels {

enum class Clamp { None, FloorZero, Reflect };

// Family parameterization at a fixed time:
//   AffineSqrt : drift = a - b*xa, vol = s*sqrt(xa)
//   AffineConst: drift = a - b*xa, vol = s
//   Linear     : drift = a*xa,     vol = s*xa
//   Cev        : drift = a - b*xa, vol = s*pow(xa, gamma)   (scalar only)
struct StepCoeffs {
    double a = 0.0, b = 0.0, s = 0.0, gamma = 1.0;
};

// Advances n states one step and accumulates acc[i] += stored_old + stored_new.
using StepFn = void (*)(double* x, double* acc, const double* z, int n, double dt,
                        double sqrt_dt, StepCoeffs c, Clamp clamp);

namespace scalar {
void step_affine_sqrt(double* x, double* acc, const double* z, int n, double dt,
                      double sqrt_dt, StepCoeffs c, Clamp clamp);
void step_affine_const(double* x, double* acc, const double* z, int n, double dt,
                       double sqrt_dt, StepCoeffs c, Clamp clamp);
void step_linear(double* x, double* acc, const double* z, int n, double dt,
                 double sqrt_dt, StepCoeffs c, Clamp clamp);
void step_cev(double* x, double* acc, const double* z, int n, double dt,
              double sqrt_dt, StepCoeffs c, Clamp clamp);
}  // namespace scalar

#ifdef TSE_HAVE_AVX2_BUILD
namespace avx2 {
void step_affine_sqrt(double* x, double* acc, const double* z, int n, double dt,
                      double sqrt_dt, StepCoeffs c, Clamp clamp);
void step_affine_const(double* x, double* acc, const double* z, int n, double dt,
                       double sqrt_dt, StepCoeffs c, Clamp clamp);
void step_linear(double* x, double* acc, const double* z, int n, double dt,
                 double sqrt_dt, StepCoeffs c, Clamp clamp);
}  // namespace avx2
#endif

struct Backend {
    const char* name;
    StepFn affine_sqrt;
    StepFn affine_const;
    StepFn linear;
    StepFn cev;  // always the scalar routine
};

bool avx2_supported();
const Backend& scalar_backend();
// AVX2 when compiled in and the CPU supports it; override with TSE_KERNEL=scalar.
const Backend& active_backend();

}  // namespace tse::kernels
