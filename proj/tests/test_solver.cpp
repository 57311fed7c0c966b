#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"

#include "igrm/solver.hpp"

using namespace igrm;

namespace {

tensor_space square(int n, int p, int c) {
    return {make_space(uniform_breakpoints(0, 1, n), p, c), make_space(uniform_breakpoints(0, 1, n), p, c)};
}

saddle_system small_system(double eta, int n = 4) {
    return build_saddle_system(manufactured_problem(10), square(n, 2, 1), square(n, 3, 1), eta);
}

struct dense_parts {
    Eigen::MatrixXd g, gt, b;
};

dense_parts dense(const saddle_system& sys) {
    const Eigen::MatrixXd g = dense_gramm(sys.gramm);
    const Eigen::MatrixXd gt = oracle::kron(sys.factor.ax().to_dense(), sys.factor.ay().to_dense());
    return {g, gt, sys.B.to_dense()};
}

}  // namespace

TEST_CASE("eta resolves to the squared largest element diameter") {
    const tensor_space t{make_space({0.0, 0.25, 1.0}, 1, 0), make_space({0.0, 0.5, 1.0}, 1, 0)};
    CHECK(resolve_eta(eta_spec::h2(), t) == doctest::Approx(0.75 * 0.75 + 0.5 * 0.5));
    CHECK(resolve_eta(eta_spec::fixed(3e-4), t) == 3e-4);
    CHECK_THROWS_AS(resolve_eta(eta_spec::fixed(0.0), t), std::invalid_argument);
}

TEST_CASE("Schur complement product against dense algebra") {
    const auto sys = small_system(1e-2);
    const auto d = dense(sys);
    const Eigen::MatrixXd s = d.b.transpose() * d.gt.inverse() * d.b;
    oracle::gen g(12);
    for (int k = 0; k < 4; ++k) {
        const Eigen::VectorXd c = g.vector(sys.n_trial());
        const Eigen::VectorXd w = g.vector(sys.n_trial());
        CHECK((schur_matvec(sys, c) - s * c).norm() < 1e-9 * (s * c).norm());
        CHECK(std::abs(w.dot(schur_matvec(sys, c)) - c.dot(schur_matvec(sys, w))) < 1e-9 * s.norm() * c.norm() * w.norm());
    }
    CHECK(schur_matvec(sys, Eigen::VectorXd::Zero(sys.n_trial())).norm() == 0.0);
}

TEST_CASE("Jacobi weights lump G~ to its diagonal") {
    const auto sys = small_system(1e-2);
    const auto d = dense(sys);
    const Eigen::VectorXd diag = (d.b.transpose() * d.gt.diagonal().asDiagonal().inverse() * d.b).diagonal();
    CHECK((sys.jacobi - diag).norm() < 1e-12 * diag.norm());
    CHECK(sys.jacobi.minCoeff() > 0.0);
}

TEST_CASE("first outer step matches the dense formula") {
    const auto sys = small_system(1e-2);
    const auto d = dense(sys);
    const Eigen::MatrixXd gi = d.gt.inverse();
    const Eigen::VectorXd c = (d.b.transpose() * gi * d.b).ldlt().solve(d.b.transpose() * gi * sys.F);
    const Eigen::VectorXd r = gi * (sys.F - d.b * c);

    solver_config cfg;
    cfg.inner_tol = 1e-13;
    const igrm_state zero{Eigen::VectorXd::Zero(sys.n_test()), Eigen::VectorXd::Zero(sys.n_trial())};
    const auto step = igrm_step(sys, zero, cfg);
    CHECK((step.next.u - c).norm() < 1e-7 * c.norm());
    CHECK((step.next.r - r).norm() < 1e-7 * std::max(1.0, r.norm()));
    // The corrected residual is orthogonal to the trial image.
    CHECK((d.b.transpose() * step.next.r).norm() < 1e-7 * std::max(1.0, (d.b.transpose() * r).cwiseAbs().sum()) + 1e-8);
}

TEST_CASE("exact solution is a fixed point and zero data stays at zero") {
    const auto sys = small_system(1e-2);
    const auto ref = dense_reference_solve(sys);
    solver_config cfg;
    cfg.inner_tol = 1e-13;
    const auto step = igrm_step(sys, ref, cfg);
    CHECK(step.c.norm() < 1e-8 * ref.u.norm());
    CHECK(step.d.norm() < 1e-8 * std::max(1.0, ref.r.norm()));

    auto quiet = small_system(1e-2);
    quiet.F.setZero();
    const auto sol = igrm_solve(quiet, cfg);
    CHECK(sol.u.norm() == 0.0);
    CHECK(sol.r.norm() == 0.0);
}

TEST_CASE("iterative, sparse direct and dense solves agree") {
    const auto sys = small_system(1e-3);
    const auto ref = dense_reference_solve(sys);
    const auto d = dense(sys);
    CHECK((d.g * ref.r + d.b * ref.u - sys.F).norm() < 1e-9 * sys.F.norm());
    CHECK((d.b.transpose() * ref.r).norm() < 1e-9 * sys.F.norm());

    solver_config cfg;
    cfg.outer_tol = 1e-11;
    cfg.outer_max = 2000;
    const auto it = igrm_solve(sys, cfg);
    CHECK(it.report.converged);
    CHECK((it.u - ref.u).norm() < 1e-7 * ref.u.norm());

    const auto dir = direct_solve(sys);
    CHECK((dir.u - ref.u).norm() < 1e-9 * ref.u.norm());
    CHECK((dir.r - ref.r).norm() < 1e-9 * std::max(1.0, ref.r.norm()));
    CHECK(dir.report.outer_iters == 0);
    CHECK(dir.report.residual_check);
}

TEST_CASE("dimension mismatches and bad settings are rejected") {
    const auto sys = small_system(1e-2);
    solver_config cfg;
    CHECK_THROWS_AS(igrm_step(sys, {Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(sys.n_trial())}, cfg),
                    std::invalid_argument);
    cfg.outer_max = 0;
    CHECK_THROWS_AS(igrm_solve(sys, cfg), std::invalid_argument);
    CHECK_THROWS_AS(build_saddle_system(manufactured_problem(10), square(4, 2, 1), square(2, 3, 1), 1e-2),
                    std::invalid_argument);
}

TEST_CASE("report bookkeeping") {
    const auto sys = small_system(1e-2);
    solver_config cfg;
    cfg.outer_max = 3;
    cfg.outer_tol = 1e-300;
    const auto sol = igrm_solve(sys, cfg);
    CHECK(sol.report.outer_iters == 3);
    CHECK_FALSE(sol.report.converged);
    CHECK(sol.report.inner_iters.size() == 3);
    int total = 0;
    for (int k : sol.report.inner_iters) total += k;
    CHECK(sol.report.inner_iters_total == total);
    CHECK(sol.report.residual_history.size() == 3);
    CHECK(sol.report.dof_total == sys.n_trial() + sys.n_test());
}

TEST_CASE("quadratic solutions are reproduced exactly by residual minimization") {
    problem_definition pr;
    pr.name = "quadratic";
    pr.domain = {0, 1, 0, 1};
    pr.beta = [](double, double) { return vec2{1.0, 0.5}; };
    pr.epsilon = 1e-3;
    pr.boundary = [](double x, double y) { return x + y * y + x * x; };
    pr.exact = exact_solution{[](double x, double y) { return x + y * y + x * x; },
                              [](double x, double y) { return vec2{1 + 2 * x, 2 * y}; }, nullptr};
    // beta . grad u - eps lap u with lap u = 4.
    pr.forcing = [](double x, double y) { return 1 + 2 * x + y - 4e-3; };
    const auto sys = build_saddle_system(pr, square(3, 2, 1), square(3, 3, 1), 1e-2);
    const auto sol = direct_solve(sys);
    const auto err = error_norms(sol.u, sys.trial, *pr.exact);
    CHECK(err.l2_rel_pct < 1e-8);
    CHECK(err.h1_rel_pct < 1e-8);
    CHECK(sol.r.norm() < 1e-10);
}
