#include "igrm/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SparseLU>

namespace igrm {

namespace {

double max_element_size(const spline_space& s) {
    double h = 0.0;
    for (int e = 0; e < s.elements(); ++e) {
        h = std::max(h, s.element_size(e));
    }
    return h;
}

Eigen::VectorXd jacobi_diagonal(const sparse_operator& B, const kronecker_factor& factor) {
    const auto& m = B.matrix();
    const int ny = factor.ny();
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(B.cols());
    for (int row = 0; row < m.outerSize(); ++row) {
        const double g = factor.ax()(row / ny, row / ny) * factor.ay()(row % ny, row % ny);
        for (sparse_operator::storage::InnerIterator it(m, row); it; ++it) {
            diag[it.col()] += it.value() * it.value() / g;
        }
    }
    for (auto& d : diag) {
        if (!(d > 0.0)) {
            d = 1.0;
        }
    }
    return diag;
}

}  // namespace

double resolve_eta(const eta_spec& spec, const tensor_space& space) {
    if (!spec.use_h2) {
        if (!(spec.value > 0.0)) {
            throw std::invalid_argument("eta must be positive");
        }
        return spec.value;
    }
    const double hx = max_element_size(space.x);
    const double hy = max_element_size(space.y);
    return hx * hx + hy * hy;
}

saddle_system make_saddle_system(tensor_space trial, tensor_space test, gramm_operator gramm, sparse_operator B,
                                 Eigen::VectorXd F) {
    if (B.rows() != test.dim() || B.cols() != trial.dim() || F.size() != test.dim() || gramm.dim() != test.dim()) {
        throw std::invalid_argument("saddle system blocks have inconsistent sizes");
    }
    kronecker_factor factor = factorize(gramm);
    Eigen::VectorXd jac = jacobi_diagonal(B, factor);
    return saddle_system{std::move(trial), std::move(test), std::move(gramm), std::move(factor),
                         std::move(B),     std::move(F),    std::move(jac)};
}

saddle_system build_saddle_system(const problem_definition& problem, const tensor_space& trial, const tensor_space& test,
                                  double eta, const weak_form_config& cfg) {
    auto B = assemble_B(problem, trial, test, cfg);
    auto F = assemble_rhs(problem, test, cfg);
    auto G = assemble_gramm(test, eta);
    return make_saddle_system(trial, test, std::move(G), std::move(B), std::move(F));
}

Eigen::VectorXd schur_matvec(const saddle_system& sys, const Eigen::VectorXd& c) {
    if (c.size() != sys.n_trial()) {
        throw std::invalid_argument("Schur operand has the wrong size");
    }
    Eigen::VectorXd t = sys.B.apply(c);
    sys.factor.apply_inverse_in_place(t);
    return sys.B.apply_transpose(t);
}

cg_result schur_cg(const saddle_system& sys, const Eigen::VectorXd& rhs, Eigen::VectorXd& x, const solver_config& cfg) {
    const bool precond = cfg.preconditioner == inner_preconditioner::jacobi;
    const double target = cfg.inner_tol * std::max(rhs.norm(), std::numeric_limits<double>::min());

    cg_result res;
    Eigen::VectorXd r = rhs - schur_matvec(sys, x);
    res.residual = r.norm();
    if (res.residual <= target) {
        res.converged = true;
        return res;
    }
    Eigen::VectorXd z = precond ? Eigen::VectorXd(r.cwiseQuotient(sys.jacobi)) : r;
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    while (res.iterations < cfg.inner_max) {
        const Eigen::VectorXd sp = schur_matvec(sys, p);
        const double alpha = rz / p.dot(sp);
        x.noalias() += alpha * p;
        r.noalias() -= alpha * sp;
        ++res.iterations;
        res.residual = r.norm();
        if (res.residual <= target) {
            res.converged = true;
            break;
        }
        if (precond) {
            z = r.cwiseQuotient(sys.jacobi);
        } else {
            z = r;
        }
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    return res;
}

step_result igrm_step(const saddle_system& sys, const igrm_state& state, const solver_config& cfg) {
    if (state.r.size() != sys.n_test() || state.u.size() != sys.n_trial()) {
        throw std::invalid_argument("iterate does not match the system dimensions");
    }
    // G~^{-1}(F + K~ r - B u)
    Eigen::VectorXd t = sys.F + apply_Ktilde(sys.gramm, state.r) - sys.B.apply(state.u);
    sys.factor.apply_inverse_in_place(t);
    const Eigen::VectorXd schur_rhs = sys.B.apply_transpose(t);

    step_result out;
    out.c = Eigen::VectorXd::Zero(sys.n_trial());
    const auto cg = schur_cg(sys, schur_rhs, out.c, cfg);
    out.inner_iters = cg.iterations;
    out.inner_converged = cg.converged;

    out.d = sys.F - sys.gramm.apply(state.r) - sys.B.apply(state.u + out.c);
    sys.factor.apply_inverse_in_place(out.d);

    out.next.r = state.r + out.d;
    out.next.u = state.u + out.c;
    return out;
}

double saddle_residual(const saddle_system& sys, const Eigen::VectorXd& r, const Eigen::VectorXd& u) {
    return (sys.F - sys.gramm.apply(r) - sys.B.apply(u)).norm() + sys.B.apply_transpose(r).norm();
}

igrm_solution igrm_solve(const saddle_system& sys, const solver_config& cfg) {
    if (!(cfg.outer_tol > 0.0) || !(cfg.inner_tol > 0.0) || cfg.outer_max < 1 || cfg.inner_max < 1) {
        throw std::invalid_argument("invalid solver configuration");
    }
    const auto start = std::chrono::steady_clock::now();

    igrm_solution sol;
    auto& rep = sol.report;
    rep.dof_trial = sys.n_trial();
    rep.dof_test = sys.n_test();
    rep.dof_total = rep.dof_trial + rep.dof_test;

    igrm_state state{Eigen::VectorXd::Zero(sys.n_test()), Eigen::VectorXd::Zero(sys.n_trial())};
    while (rep.outer_iters < cfg.outer_max) {
        auto step = igrm_step(sys, state, cfg);
        ++rep.outer_iters;
        rep.inner_iters.push_back(step.inner_iters);
        rep.inner_iters_total += step.inner_iters;
        rep.inner_converged = rep.inner_converged && step.inner_converged;
        state = std::move(step.next);

        const double update = std::sqrt(step.d.squaredNorm() + step.c.squaredNorm());
        const double size = std::sqrt(state.r.squaredNorm() + state.u.squaredNorm());
        rep.final_update = size > 0.0 ? update / size : update;
        rep.residual_history.push_back(saddle_residual(sys, state.r, state.u));
        if (rep.final_update < cfg.outer_tol) {
            rep.converged = true;
            break;
        }
    }
    rep.residual = rep.residual_history.empty() ? 0.0 : rep.residual_history.back();
    rep.residual_check = rep.residual <= 10.0 * cfg.outer_tol * sys.F.norm();
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    sol.u = std::move(state.u);
    sol.r = std::move(state.r);
    return sol;
}

igrm_solution direct_solve(const saddle_system& sys) {
    const auto start = std::chrono::steady_clock::now();
    const int nt = sys.n_test();
    const int nu = sys.n_trial();
    const auto& g = sys.gramm;
    const int ny = g.ny();

    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < g.nx(); ++i) {
        for (int j = std::max(0, i - g.mx.bandwidth()); j <= std::min(g.nx() - 1, i + g.mx.bandwidth()); ++j) {
            for (int k = 0; k < ny; ++k) {
                for (int l = std::max(0, k - g.my.bandwidth()); l <= std::min(ny - 1, k + g.my.bandwidth()); ++l) {
                    const double v = g.mx(i, j) * g.my(k, l) + g.eta * (g.kx(i, j) * g.my(k, l) + g.mx(i, j) * g.ky(k, l));
                    triplets.emplace_back(i * ny + k, j * ny + l, v);
                }
            }
        }
    }
    const auto& b = sys.B.matrix();
    for (int row = 0; row < b.outerSize(); ++row) {
        for (sparse_operator::storage::InnerIterator it(b, row); it; ++it) {
            triplets.emplace_back(row, nt + static_cast<int>(it.col()), it.value());
            triplets.emplace_back(nt + static_cast<int>(it.col()), row, it.value());
        }
    }
    Eigen::SparseMatrix<double> k(nt + nu, nt + nu);
    k.setFromTriplets(triplets.begin(), triplets.end());
    k.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(k);
    if (lu.info() != Eigen::Success) {
        throw std::runtime_error("saddle factorization failed: " + lu.lastErrorMessage());
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nt + nu);
    rhs.head(nt) = sys.F;
    const Eigen::VectorXd x = lu.solve(rhs);

    igrm_solution sol{x.tail(nu), x.head(nt), {}};
    auto& rep = sol.report;
    rep.dof_trial = nu;
    rep.dof_test = nt;
    rep.dof_total = nt + nu;
    rep.converged = true;
    rep.residual = saddle_residual(sys, sol.r, sol.u);
    rep.residual_history.push_back(rep.residual);
    rep.residual_check = rep.residual <= 1e-8 * std::max(1.0, sys.F.norm());
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

Eigen::MatrixXd dense_gramm(const gramm_operator& gramm) {
    const Eigen::MatrixXd mx = gramm.mx.to_dense();
    const Eigen::MatrixXd my = gramm.my.to_dense();
    return kron_dense(mx, my)
           + gramm.eta * (kron_dense(gramm.kx.to_dense(), my) + kron_dense(mx, gramm.ky.to_dense()));
}

igrm_state dense_reference_solve(const saddle_system& sys) {
    const int nt = sys.n_test();
    const int nu = sys.n_trial();
    if (nt + nu > 20000) {
        throw std::invalid_argument("dense reference solve limited to 20000 unknowns");
    }
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nt + nu, nt + nu);
    const Eigen::MatrixXd b = sys.B.to_dense();
    k.topLeftCorner(nt, nt) = dense_gramm(sys.gramm);
    k.topRightCorner(nt, nu) = b;
    k.bottomLeftCorner(nu, nt) = b.transpose();

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nt + nu);
    rhs.head(nt) = sys.F;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
    if (!lu.isInvertible()) {
        throw std::runtime_error("saddle matrix is singular (B is rank deficient)");
    }
    const Eigen::VectorXd x = lu.solve(rhs);
    return igrm_state{x.head(nt), x.tail(nu)};
}

}  // namespace igrm
