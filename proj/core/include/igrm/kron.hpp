#ifndef IGRM_KRON_HPP_
#define IGRM_KRON_HPP_

#include <Eigen/Dense>

#include "igrm/assembly.hpp"
#include "igrm/banded.hpp"

namespace igrm {

/// Direction-split approximation of the Gramm matrix,
///   G~ = (Mx + eta Kx) (x) (My + eta Ky) = G + eta^2 Kx (x) Ky,
/// held as banded Cholesky factors of the two 1D matrices.
class kronecker_factor {
public:
    explicit kronecker_factor(const gramm_operator& gramm);

    int nx() const { return ax_.size(); }
    int ny() const { return ay_.size(); }
    int dim() const { return nx() * ny(); }
    double eta() const { return eta_; }

    const banded_matrix& ax() const { return ax_; }
    const banded_matrix& ay() const { return ay_; }

    /// G~^{-1} v: one sweep of x solves over all columns, one of y solves
    /// over all rows. O(N w).
    Eigen::VectorXd apply_inverse(const Eigen::VectorXd& v) const;
    void apply_inverse_in_place(Eigen::VectorXd& v) const;

    /// G~ v.
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

private:
    banded_matrix ax_, ay_;
    banded_cholesky fx_, fy_;
    double eta_;
};

kronecker_factor factorize(const gramm_operator& gramm);

Eigen::VectorXd apply_Gtilde_inverse(const kronecker_factor& f, const Eigen::VectorXd& v);

/// K~ v = eta^2 (Kx (x) Ky) v.
Eigen::VectorXd apply_Ktilde(const gramm_operator& gramm, const Eigen::VectorXd& v);

struct spectral_radius_result {
    double rho_formula;
    double rho_numeric;
    double lambda_x_max;
    double lambda_y_max;
};

/// Largest generalized eigenvalues of (K, M) per direction.
Eigen::VectorXd generalized_eigenvalues(const banded_matrix& k, const banded_matrix& m);

/// Closed-form spectral radius of G~^{-1} K~ from the 1D generalized
/// eigenvalues, and the value from a dense eigensolve of K~ v = lambda G~ v.
/// Dense diagnostic; refuses direction sizes above 200.
spectral_radius_result spectral_radius(const gramm_operator& gramm);

}  // namespace igrm

#endif  // IGRM_KRON_HPP_
