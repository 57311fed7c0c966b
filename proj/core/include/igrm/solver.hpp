#ifndef IGRM_SOLVER_HPP_
#define IGRM_SOLVER_HPP_

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "igrm/assembly.hpp"
#include "igrm/kron.hpp"
#include "igrm/problems.hpp"
#include "igrm/splines.hpp"

namespace igrm {

/// Gramm weight: a fixed value, or the square of the largest element diameter.
struct eta_spec {
    bool use_h2 = false;
    double value = 1e-4;

    static eta_spec h2() { return {true, 0.0}; }
    static eta_spec fixed(double v) { return {false, v}; }
};

double resolve_eta(const eta_spec& spec, const tensor_space& space);

enum class inner_preconditioner { none, jacobi };

struct solver_config {
    double outer_tol = 1e-8;
    int outer_max = 100;
    double inner_tol = 1e-10;
    int inner_max = 1000;
    inner_preconditioner preconditioner = inner_preconditioner::jacobi;
};

/// Discrete residual-minimization system
///   [ G   B ] [r]   [F]
///   [ B^T 0 ] [u] = [0]
/// with G on the test space and B mapping trial to test.
struct saddle_system {
    tensor_space trial;
    tensor_space test;
    gramm_operator gramm;
    kronecker_factor factor;
    sparse_operator B;
    Eigen::VectorXd F;
    Eigen::VectorXd jacobi;  // diagonal estimate of B^T G~^{-1} B

    int n_trial() const { return B.cols(); }
    int n_test() const { return B.rows(); }
};

saddle_system make_saddle_system(tensor_space trial, tensor_space test, gramm_operator gramm, sparse_operator B,
                                 Eigen::VectorXd F);

saddle_system build_saddle_system(const problem_definition& problem, const tensor_space& trial, const tensor_space& test,
                                  double eta, const weak_form_config& cfg = {});

/// B^T G~^{-1} B c.
Eigen::VectorXd schur_matvec(const saddle_system& sys, const Eigen::VectorXd& c);

struct cg_result {
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
};

/// Preconditioned CG on the Schur complement; x holds the initial guess.
cg_result schur_cg(const saddle_system& sys, const Eigen::VectorXd& rhs, Eigen::VectorXd& x, const solver_config& cfg);

struct igrm_state {
    Eigen::VectorXd r;
    Eigen::VectorXd u;
};

struct step_result {
    igrm_state next;
    Eigen::VectorXd d;
    Eigen::VectorXd c;
    int inner_iters = 0;
    bool inner_converged = true;
};

/// One outer correction: c from the Schur complement with G~, then the
/// residual update d = G~^{-1}(F - G r - B u - B c).
step_result igrm_step(const saddle_system& sys, const igrm_state& state, const solver_config& cfg);

struct run_report {
    int outer_iters = 0;
    std::vector<int> inner_iters;
    int inner_iters_total = 0;
    double final_update = 0.0;
    double residual = 0.0;  // ||F - G r - B u|| + ||B^T r||
    std::vector<double> residual_history;
    bool converged = false;
    bool inner_converged = true;
    bool residual_check = false;  // residual <= 10 outer_tol ||F||
    double wall_ms = 0.0;
    int dof_trial = 0;
    int dof_test = 0;
    int dof_total = 0;
    std::optional<double> l2_rel_pct;
    std::optional<double> h1_rel_pct;
};

struct igrm_solution {
    Eigen::VectorXd u;
    Eigen::VectorXd r;
    run_report report;
};

igrm_solution igrm_solve(const saddle_system& sys, const solver_config& cfg);

double saddle_residual(const saddle_system& sys, const Eigen::VectorXd& r, const Eigen::VectorXd& u);

/// Sparse LU of the full saddle matrix. The report carries no iterations.
igrm_solution direct_solve(const saddle_system& sys);

/// Direct dense solve of the full saddle matrix; total size limited to 20000.
igrm_state dense_reference_solve(const saddle_system& sys);

/// Dense G built from the 1D factors.
Eigen::MatrixXd dense_gramm(const gramm_operator& gramm);

}  // namespace igrm

#endif  // IGRM_SOLVER_HPP_
