#include "tse/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tse {

BandedLU::BandedLU(BandedMatrix a) : a_(std::move(a)), ipiv_(a_.n_) {
    const int n = a_.n_, kl = a_.kl_, ku = a_.ku_;
    const int ldab = 2 * kl + ku + 1;
    auto& ab = a_.ab_;
    auto elem = [&](int r, int c) -> double& {
        return ab[static_cast<std::size_t>(c) * ldab + r];
    };

    for (int j = 0; j < n; ++j) {
        const int km = std::min(kl, n - 1 - j);
        // pivot among the kl candidates below the diagonal of column j
        int p = 0;
        double best = std::abs(elem(kl + ku, j));
        for (int i = 1; i <= km; ++i) {
            const double v = std::abs(elem(kl + ku + i, j));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        ipiv_[j] = j + p;
        if (best == 0.0)
            throw std::runtime_error("BandedLU: matrix is singular at column " +
                                     std::to_string(j));
        const int ju = std::min(n - 1, j + ku + kl);
        if (p != 0) {
            for (int c = j; c <= ju; ++c)
                std::swap(elem(kl + ku + j - c, c), elem(kl + ku + j + p - c, c));
        }
        const double piv = elem(kl + ku, j);
        for (int i = 1; i <= km; ++i) elem(kl + ku + i, j) /= piv;
        for (int c = j + 1; c <= ju; ++c) {
            const double tmp = elem(kl + ku + j - c, c);
            if (tmp != 0.0)
                for (int i = 1; i <= km; ++i)
                    elem(kl + ku + j + i - c, c) -= elem(kl + ku + i, j) * tmp;
        }
    }
}

void BandedLU::solve_in_place(std::vector<double>& b) const {
    const int n = a_.n_, kl = a_.kl_, ku = a_.ku_;
    const int ldab = 2 * kl + ku + 1;
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("BandedLU::solve: rhs size mismatch");
    const auto& ab = a_.ab_;
    auto elem = [&](int r, int c) -> double {
        return ab[static_cast<std::size_t>(c) * ldab + r];
    };

    for (int j = 0; j < n - 1; ++j) {
        const int km = std::min(kl, n - 1 - j);
        if (ipiv_[j] != j) std::swap(b[ipiv_[j]], b[j]);
        for (int i = 1; i <= km; ++i) b[j + i] -= elem(kl + ku + i, j) * b[j];
    }
    for (int j = n - 1; j >= 0; --j) {
        b[j] /= elem(kl + ku, j);
        const int lo = std::max(0, j - ku - kl);
        for (int i = lo; i < j; ++i) b[i] -= elem(kl + ku + i - j, j) * b[j];
    }
}

}  // namespace tse
