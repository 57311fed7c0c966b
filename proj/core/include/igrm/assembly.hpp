#ifndef IGRM_ASSEMBLY_HPP_
#define IGRM_ASSEMBLY_HPP_

#include <functional>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "igrm/banded.hpp"
#include "igrm/problems.hpp"
#include "igrm/splines.hpp"

namespace igrm {

/// Test x trial operator in compressed row storage.
class sparse_operator {
public:
    using storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    sparse_operator() = default;
    explicit sparse_operator(storage m)
    : m_(std::move(m)) { }

    int rows() const { return static_cast<int>(m_.rows()); }
    int cols() const { return static_cast<int>(m_.cols()); }
    long nonzeros() const { return static_cast<long>(m_.nonZeros()); }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::VectorXd apply_transpose(const Eigen::VectorXd& y) const;

    const storage& matrix() const { return m_; }
    Eigen::MatrixXd to_dense() const { return Eigen::MatrixXd(m_); }

private:
    storage m_;
};

/**
 * Weak imposition of Dirichlet data.
 *
 * The boundary part of the bilinear form is
 *   -(eps grad u . n, v) - (u, eps grad v . n)
 *   + advective_sign (u, beta . n v) on the inflow part (or all of the boundary)
 *   + penalty_sign sum_K (u, C p^2 eps / h_K v),
 * with h_K the size of the boundary element in the normal direction and p the
 * test-space degree unless penalty_degree overrides it. Clearing
 * penalty_scales_with_diffusion drops eps from the penalty, which enforces the
 * data strongly even at vanishing diffusion. The right-hand side carries the
 * same terms with u replaced by g.
 */
struct weak_form_config {
    int penalty_sign = +1;
    double penalty_coefficient = 3.0;
    bool inflow_only_advective_boundary = true;
    int advective_sign = +1;
    int penalty_degree = 0;  // 0: use the test-space degree
    bool penalty_scales_with_diffusion = true;
    bool boundary_terms = true;
};

/// SUPG streamline term sum_K (beta . grad u + s eps lap u, tau_K beta . grad v)_K
/// added to the operator, and sum_K (f, tau_K beta . grad v)_K to the load.
struct streamline_stabilization {
    std::function<double(int ex, int ey)> tau;
    int laplacian_sign = -1;
};

banded_matrix assemble_mass_1d(const spline_space& space);
banded_matrix assemble_stiffness_1d(const spline_space& space);

sparse_operator assemble_B(const problem_definition& problem, const tensor_space& trial, const tensor_space& test,
                           const weak_form_config& cfg, const streamline_stabilization* stab = nullptr);

Eigen::VectorXd assemble_rhs(const problem_definition& problem, const tensor_space& test, const weak_form_config& cfg,
                             const streamline_stabilization* stab = nullptr);

/// Weighted H1 inner product G = Mx (x) My + eta (Kx (x) My + Mx (x) Ky) on
/// the test space.
struct gramm_operator {
    banded_matrix mx, kx;
    banded_matrix my, ky;
    double eta = 0.0;

    int nx() const { return mx.size(); }
    int ny() const { return my.size(); }
    int dim() const { return nx() * ny(); }

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

gramm_operator assemble_gramm(const tensor_space& test, double eta);

/// (A (x) B) v for x-major vectors, i.e. A V B^T with V the nx x ny matricization.
Eigen::VectorXd kron_apply(const banded_matrix& a, const banded_matrix& b, const Eigen::VectorXd& v);

/// Dense A (x) B.
Eigen::MatrixXd kron_dense(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace igrm

#endif  // IGRM_ASSEMBLY_HPP_
