#ifndef IGRM_BANDED_HPP_
#define IGRM_BANDED_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace igrm {

/// Square matrix with half-bandwidth w, stored row by row as (2w+1) * n
/// values. Entry (i, j) lives at i * (2w+1) + (j - i + w).
class banded_matrix {
public:
    banded_matrix() = default;
    banded_matrix(int n, int w);

    int size() const { return n_; }
    int bandwidth() const { return w_; }

    bool in_band(int i, int j) const { return j - i <= w_ && i - j <= w_; }

    double& operator()(int i, int j) { return data_[i * (2 * w_ + 1) + (j - i + w_)]; }
    double operator()(int i, int j) const { return in_band(i, j) ? data_[i * (2 * w_ + 1) + (j - i + w_)] : 0.0; }

    /// out = A * in for a single vector.
    void apply(std::span<const double> in, std::span<double> out) const;

    /// out = A * in, where in/out are n x nrhs row-major blocks.
    void apply_rows(const double* in, double* out, int nrhs) const;

    /// this + s * other (same shape).
    banded_matrix add_scaled(const banded_matrix& other, double s) const;

    Eigen::MatrixXd to_dense() const;

private:
    int n_ = 0;
    int w_ = 0;
    std::vector<double> data_;
};

/// Cholesky factorization of a symmetric positive definite banded matrix.
/// Breakdown throws; a non-SPD input is a bug upstream.
class banded_cholesky {
public:
    banded_cholesky() = default;
    explicit banded_cholesky(const banded_matrix& a);

    int size() const { return n_; }

    /// Solve A x = b in place.
    void solve(std::span<double> b) const;

    /// Solve A X = B in place for an n x nrhs row-major block B.
    void solve_rows(double* b, int nrhs) const;

private:
    double lower(int i, int j) const { return l_[i * (w_ + 1) + (j - i + w_)]; }
    double& lower(int i, int j) { return l_[i * (w_ + 1) + (j - i + w_)]; }

    int n_ = 0;
    int w_ = 0;
    std::vector<double> l_;
};

}  // namespace igrm

#endif  // IGRM_BANDED_HPP_
