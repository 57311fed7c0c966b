#include "igrm/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace igrm {

banded_matrix::banded_matrix(int n, int w)
: n_(n)
, w_(std::min(w, std::max(n - 1, 0)))
, data_(static_cast<std::size_t>(2 * w_ + 1) * n, 0.0) { }

void banded_matrix::apply(std::span<const double> in, std::span<double> out) const {
    apply_rows(in.data(), out.data(), 1);
}

void banded_matrix::apply_rows(const double* in, double* out, int nrhs) const {
    for (int i = 0; i < n_; ++i) {
        double* dst = out + static_cast<std::ptrdiff_t>(i) * nrhs;
        std::fill(dst, dst + nrhs, 0.0);
        const int j0 = std::max(0, i - w_);
        const int j1 = std::min(n_ - 1, i + w_);
        for (int j = j0; j <= j1; ++j) {
            const double a = data_[i * (2 * w_ + 1) + (j - i + w_)];
            const double* src = in + static_cast<std::ptrdiff_t>(j) * nrhs;
            for (int k = 0; k < nrhs; ++k) {
                dst[k] += a * src[k];
            }
        }
    }
}

banded_matrix banded_matrix::add_scaled(const banded_matrix& other, double s) const {
    if (other.n_ != n_ || other.w_ != w_) {
        throw std::invalid_argument("banded matrices differ in shape");
    }
    banded_matrix sum = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) {
        sum.data_[k] += s * other.data_[k];
    }
    return sum;
}

Eigen::MatrixXd banded_matrix::to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = std::max(0, i - w_); j <= std::min(n_ - 1, i + w_); ++j) {
            m(i, j) = (*this)(i, j);
        }
    }
    return m;
}

banded_cholesky::banded_cholesky(const banded_matrix& a)
: n_(a.size())
, w_(a.bandwidth())
, l_(static_cast<std::size_t>(w_ + 1) * n_, 0.0) {
    for (int i = 0; i < n_; ++i) {
        const int j0 = std::max(0, i - w_);
        for (int j = j0; j <= i; ++j) {
            double sum = a(i, j);
            for (int k = std::max(j0, j - w_); k < j; ++k) {
                sum -= lower(i, k) * lower(j, k);
            }
            if (j == i) {
                if (!(sum > 0.0)) {
                    throw std::runtime_error("banded Cholesky breakdown at row " + std::to_string(i)
                                             + ": matrix is not positive definite");
                }
                lower(i, i) = std::sqrt(sum);
            } else {
                lower(i, j) = sum / lower(j, j);
            }
        }
    }
}

void banded_cholesky::solve(std::span<double> b) const {
    if (static_cast<int>(b.size()) != n_) {
        throw std::invalid_argument("right-hand side size does not match the factor");
    }
    solve_rows(b.data(), 1);
}

void banded_cholesky::solve_rows(double* b, int nrhs) const {
    // L y = b
    for (int i = 0; i < n_; ++i) {
        double* bi = b + static_cast<std::ptrdiff_t>(i) * nrhs;
        for (int k = std::max(0, i - w_); k < i; ++k) {
            const double l = lower(i, k);
            const double* bk = b + static_cast<std::ptrdiff_t>(k) * nrhs;
            for (int r = 0; r < nrhs; ++r) {
                bi[r] -= l * bk[r];
            }
        }
        const double inv = 1.0 / lower(i, i);
        for (int r = 0; r < nrhs; ++r) {
            bi[r] *= inv;
        }
    }
    // L^T x = y
    for (int i = n_ - 1; i >= 0; --i) {
        double* bi = b + static_cast<std::ptrdiff_t>(i) * nrhs;
        for (int k = i + 1; k <= std::min(n_ - 1, i + w_); ++k) {
            const double l = lower(k, i);
            const double* bk = b + static_cast<std::ptrdiff_t>(k) * nrhs;
            for (int r = 0; r < nrhs; ++r) {
                bi[r] -= l * bk[r];
            }
        }
        const double inv = 1.0 / lower(i, i);
        for (int r = 0; r < nrhs; ++r) {
            bi[r] *= inv;
        }
    }
}

}  // namespace igrm
