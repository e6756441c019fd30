#include "tse/mc_kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace tse::kernels {

bool avx2_supported() {
#if defined(TSE_HAVE_AVX2_BUILD) && (defined(__x86_64__) || defined(_M_X64))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Backend& scalar_backend() {
    static const Backend b{"scalar", scalar::step_affine_sqrt, scalar::step_affine_const,
                           scalar::step_linear, scalar::step_cev};
    return b;
}

const Backend& active_backend() {
    static const Backend chosen = [] {
        const char* force = std::getenv("TSE_KERNEL");
        if (force != nullptr && std::strcmp(force, "scalar") == 0)
            return scalar_backend();
#ifdef TSE_HAVE_AVX2_BUILD
        if (avx2_supported() && (force == nullptr || std::strcmp(force, "avx2") == 0))
            return Backend{"avx2", avx2::step_affine_sqrt, avx2::step_affine_const,
                           avx2::step_linear, scalar::step_cev};
#endif
        return scalar_backend();
    }();
    return chosen;
}

}  // namespace tse::kernels
