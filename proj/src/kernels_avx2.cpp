#include "tse/mc_kernels.hpp"

#ifdef TSE_HAVE_AVX2_BUILD

#include <immintrin.h>

// Same operation order as the scalar kernels.  stored(x) under FloorZero is
// written as a compare+blend rather than maxpd so that NaN states propagate
// exactly like std::max(x, 0.0) does.

namespace tse::kernels::avx2 {

namespace {

inline __m256d stored_floor(__m256d x, __m256d zero) {
    const __m256d lt = _mm256_cmp_pd(x, zero, _CMP_LT_OQ);
    return _mm256_blendv_pd(x, zero, lt);
}

inline __m256d vabs(__m256d x) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

enum class Family { AffineSqrt, AffineConst, Linear };

template <Family F>
void step_impl(double* x, double* acc, const double* z, int n, double dt,
               double sqrt_dt, StepCoeffs c, Clamp clamp) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d va = _mm256_set1_pd(c.a);
    const __m256d vb = _mm256_set1_pd(c.b);
    const __m256d vs = _mm256_set1_pd(c.s);
    const __m256d vdt = _mm256_set1_pd(dt);
    const __m256d vsq = _mm256_set1_pd(sqrt_dt);

    const int n4 = n & ~3;
    for (int i = 0; i < n4; i += 4) {
        const __m256d xo = _mm256_loadu_pd(x + i);
        const __m256d so = clamp == Clamp::FloorZero ? stored_floor(xo, zero) : xo;
        __m256d drift, vol;
        if constexpr (F == Family::AffineSqrt) {
            drift = _mm256_sub_pd(va, _mm256_mul_pd(vb, so));
            vol = _mm256_mul_pd(vs, _mm256_sqrt_pd(so));
        } else if constexpr (F == Family::AffineConst) {
            drift = _mm256_sub_pd(va, _mm256_mul_pd(vb, so));
            vol = vs;
        } else {
            drift = _mm256_mul_pd(va, so);
            vol = _mm256_mul_pd(vs, so);
        }
        const __m256d incr = _mm256_mul_pd(drift, vdt);
        const __m256d shock =
            _mm256_mul_pd(vol, _mm256_mul_pd(vsq, _mm256_loadu_pd(z + i)));
        __m256d xn = _mm256_add_pd(_mm256_add_pd(xo, incr), shock);
        if (clamp == Clamp::Reflect) xn = vabs(xn);
        const __m256d sn = clamp == Clamp::FloorZero ? stored_floor(xn, zero) : xn;
        const __m256d a = _mm256_loadu_pd(acc + i);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(a, _mm256_add_pd(so, sn)));
        _mm256_storeu_pd(x + i, xn);
    }
    if (n4 < n) {
        const auto tail = F == Family::AffineSqrt  ? scalar::step_affine_sqrt
                          : F == Family::AffineConst ? scalar::step_affine_const
                                                     : scalar::step_linear;
        tail(x + n4, acc + n4, z + n4, n - n4, dt, sqrt_dt, c, clamp);
    }
}

}  // namespace

void step_affine_sqrt(double* x, double* acc, const double* z, int n, double dt,
                      double sqrt_dt, StepCoeffs c, Clamp clamp) {
    step_impl<Family::AffineSqrt>(x, acc, z, n, dt, sqrt_dt, c, clamp);
}

void step_affine_const(double* x, double* acc, const double* z, int n, double dt,
                       double sqrt_dt, StepCoeffs c, Clamp clamp) {
    step_impl<Family::AffineConst>(x, acc, z, n, dt, sqrt_dt, c, clamp);
}

void step_linear(double* x, double* acc, const double* z, int n, double dt,
                 double sqrt_dt, StepCoeffs c, Clamp clamp) {
    step_impl<Family::Linear>(x, acc, z, n, dt, sqrt_dt, c, clamp);
}

}  // namespace tse::kernels::avx2

#endif  // TSE_HAVE_AVX2_BUILD
