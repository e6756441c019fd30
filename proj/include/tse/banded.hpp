#pragma once

// Band-storage LU with partial pivoting (LAPACK dgbtf2/dgbtrs layout,
// unblocked).  The theta-scheme assembles pentadiagonal-with-corners
// systems: tridiagonal interior plus 3-point one-sided boundary rows,
// so kl = ku = 2 covers everything.

#include <stdexcept>
#include <vector>

namespace tse {

class BandedMatrix {
  public:
    BandedMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ab_(static_cast<std::size_t>(n) * (2 * kl + ku + 1), 0.0) {
        if (n < 1 || kl < 0 || ku < 0)
            throw std::invalid_argument("BandedMatrix: bad shape");
    }

    double& at(int i, int j) {
        check(i, j);
        return ab_[idx(i, j)];
    }
    double at(int i, int j) const {
        check(i, j);
        return ab_[idx(i, j)];
    }

    int n() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }

  private:
    friend class BandedLU;
    // column-major bands with kl extra rows of pivot fill
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(j) * (2 * kl_ + ku_ + 1) + (kl_ + ku_ + i - j);
    }
    void check(int i, int j) const {
        if (i < 0 || j < 0 || i >= n_ || j >= n_ || j - i > ku_ || i - j > kl_)
            throw std::out_of_range("BandedMatrix: (i,j) outside band");
    }

    int n_, kl_, ku_;
    std::vector<double> ab_;
};

class BandedLU {
  public:
    explicit BandedLU(BandedMatrix a);

    void solve_in_place(std::vector<double>& b) const;
    std::vector<double> solve(std::vector<double> b) const {
        solve_in_place(b);
        return b;
    }

  private:
    BandedMatrix a_;
    std::vector<int> ipiv_;
};

}  // namespace tse
