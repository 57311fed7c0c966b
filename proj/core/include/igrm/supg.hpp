#ifndef IGRM_SUPG_HPP_
#define IGRM_SUPG_HPP_

#include <vector>

#include <Eigen/Dense>

#include "igrm/assembly.hpp"
#include "igrm/problems.hpp"
#include "igrm/solver.hpp"
#include "igrm/splines.hpp"

namespace igrm {

/// tau = [ beta_x / h_x + beta_y / h_y + 3 p^2 eps / (h_x^2 + h_y^2) ]^{-1}.
/// A non-positive advective part switches to |beta_x| / h_x + |beta_y| / h_y.
double compute_tau(double hx, double hy, const vec2& beta, double eps, int p);

struct supg_config {
    weak_form_config weak;
    int laplacian_sign = -1;     // sign of eps lap u in the element residual
    bool stabilization = true;
};

struct supg_system {
    tensor_space space;
    sparse_operator A;
    Eigen::VectorXd rhs;
    std::vector<double> tau;  // per element, ex * ny_elements + ey
};

supg_system assemble_supg(const problem_definition& problem, const tensor_space& space, const supg_config& cfg = {});

struct supg_solution {
    Eigen::VectorXd u;
    run_report report;
};

supg_solution supg_solve(const problem_definition& problem, const tensor_space& space, const supg_config& cfg = {});

}  // namespace igrm

#endif  // IGRM_SUPG_HPP_
