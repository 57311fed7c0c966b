#include "igrm/supg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseLU>

namespace igrm {

double compute_tau(double hx, double hy, const vec2& beta, double eps, int p) {
    if (!(hx > 0.0) || !(hy > 0.0)) {
        throw std::invalid_argument("element sizes must be positive");
    }
    const double diffusive = 3.0 * p * p * eps / (hx * hx + hy * hy);
    double advective = beta[0] / hx + beta[1] / hy;
    if (advective < 0.0) {
        advective = std::abs(beta[0]) / hx + std::abs(beta[1]) / hy;
    }
    const double inv = advective + diffusive;
    if (!(inv > 0.0)) {
        throw std::domain_error("SUPG parameter undefined: no advection and no diffusion");
    }
    return 1.0 / inv;
}

supg_system assemble_supg(const problem_definition& problem, const tensor_space& space, const supg_config& cfg) {
    if (problem.epsilon > 0.0 && cfg.stabilization && std::min(space.x.degree(), space.y.degree()) < 2) {
        throw std::invalid_argument("SUPG with diffusion needs degree >= 2 for the element Laplacian");
    }
    const int nex = space.x.elements();
    const int ney = space.y.elements();
    const int p = std::max(space.x.degree(), space.y.degree());

    supg_system sys{space, {}, {}, std::vector<double>(static_cast<std::size_t>(nex) * ney, 0.0)};
    if (cfg.stabilization) {
        for (int ex = 0; ex < nex; ++ex) {
            for (int ey = 0; ey < ney; ++ey) {
                const double cx = 0.5 * (space.x.element_begin(ex) + space.x.element_end(ex));
                const double cy = 0.5 * (space.y.element_begin(ey) + space.y.element_end(ey));
                sys.tau[ex * ney + ey] = compute_tau(space.x.element_size(ex), space.y.element_size(ey),
                                                     problem.beta(cx, cy), problem.epsilon, p);
            }
        }
    }

    const auto& tau = sys.tau;
    streamline_stabilization stab{[&tau, ney](int ex, int ey) { return tau[ex * ney + ey]; }, cfg.laplacian_sign};
    sys.A = assemble_B(problem, space, space, cfg.weak, &stab);
    sys.rhs = assemble_rhs(problem, space, cfg.weak, &stab);
    return sys;
}

supg_solution supg_solve(const problem_definition& problem, const tensor_space& space, const supg_config& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const auto sys = assemble_supg(problem, space, cfg);

    Eigen::SparseMatrix<double> a = sys.A.matrix();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error("SUPG factorization failed: " + lu.lastErrorMessage());
    }

    supg_solution sol;
    sol.u = lu.solve(sys.rhs);
    auto& rep = sol.report;
    rep.outer_iters = 0;
    rep.converged = true;
    rep.dof_trial = space.dim();
    rep.dof_test = space.dim();
    rep.dof_total = space.dim();
    rep.residual = (sys.rhs - a * sol.u).norm();
    rep.residual_check = rep.residual <= 1e-8 * std::max(1.0, sys.rhs.norm());
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

}  // namespace igrm
