#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"

#include "igrm/kron.hpp"

using namespace igrm;

namespace {

tensor_space square(int n, int p, int c) {
    return {make_space(uniform_breakpoints(0, 1, n), p, c), make_space(uniform_breakpoints(0, 1, n), p, c)};
}

struct dense_split {
    Eigen::MatrixXd gt, kt, g;
};

dense_split dense(const tensor_space& t, double eta) {
    const auto mx = oracle::matrix_1d(t.x.breakpoints(), t.x.degree(), t.x.continuity(), 0);
    const auto kx = oracle::matrix_1d(t.x.breakpoints(), t.x.degree(), t.x.continuity(), 1);
    const auto my = oracle::matrix_1d(t.y.breakpoints(), t.y.degree(), t.y.continuity(), 0);
    const auto ky = oracle::matrix_1d(t.y.breakpoints(), t.y.degree(), t.y.continuity(), 1);
    const Eigen::MatrixXd ax = mx + eta * kx;
    const Eigen::MatrixXd ay = my + eta * ky;
    return {oracle::kron(ax, ay), eta * eta * oracle::kron(kx, ky),
            oracle::kron(mx, my) + eta * (oracle::kron(kx, my) + oracle::kron(mx, ky))};
}

}  // namespace

TEST_CASE("single-function spaces invert by a scalar") {
    const tensor_space t{make_space({0.0, 1.0}, 1, 0), make_space({0.0, 1.0}, 1, 0)};
    const auto f = factorize(assemble_gramm(t, 0.5));
    const Eigen::VectorXd v = Eigen::VectorXd::Constant(t.dim(), 1.0);
    CHECK((f.apply(apply_Gtilde_inverse(f, v)) - v).norm() < 1e-13);
}

TEST_CASE("split factors match the explicit Kronecker product") {
    const auto t = square(4, 2, 0);
    const double eta = 0.03;
    const auto gr = assemble_gramm(t, eta);
    const auto f = factorize(gr);
    const auto d = dense(t, eta);
    CHECK((oracle::kron(f.ax().to_dense(), f.ay().to_dense()) - d.gt).norm() < 1e-12 * d.gt.norm());

    const Eigen::MatrixXd inv = d.gt.inverse();
    oracle::gen g(1);
    for (int k = 0; k < 5; ++k) {
        const Eigen::VectorXd v = g.vector(t.dim());
        CHECK((apply_Gtilde_inverse(f, v) - inv * v).norm() < 1e-10 * (inv * v).norm());
        CHECK((apply_Ktilde(gr, v) - d.kt * v).norm() < 1e-11 * std::max(1.0, (d.kt * v).norm()));
        CHECK((gr.apply(v) - (f.apply(v) - apply_Ktilde(gr, v))).norm() < 1e-11 * std::max(1.0, v.norm()));
    }
    CHECK(apply_Ktilde(gr, Eigen::VectorXd::Ones(t.dim())).norm() < 1e-12);
}

TEST_CASE("inverse round trip on random anisotropic meshes") {
    oracle::gen g(6);
    for (int trial = 0; trial < 10; ++trial) {
        const int p = g.integer(1, 4);
        const tensor_space t{make_space(g.breakpoints(g.integer(1, 6)), p, g.integer(-1, p - 1)),
                             make_space(g.breakpoints(g.integer(1, 6)), p, g.integer(-1, p - 1))};
        const double eta = std::pow(10.0, g.real(-6, 1));
        const auto f = factorize(assemble_gramm(t, eta));
        const Eigen::VectorXd w = g.vector(t.dim());
        CHECK((apply_Gtilde_inverse(f, f.apply(w)) - w).norm() < 1e-10 * w.norm());
        Eigen::VectorXd x = f.apply(w);
        f.apply_inverse_in_place(x);
        CHECK((x - w).norm() < 1e-10 * w.norm());
    }
    const auto f = factorize(assemble_gramm(square(2, 2, 1), 1.0));
    CHECK_THROWS_AS(f.apply_inverse(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("closed-form spectral radius equals the dense eigensolve") {
    for (int n : {2, 4, 8}) {
        for (double eta = 1e-1; eta > 1e-9; eta /= 10) {
            const auto r = spectral_radius(assemble_gramm(square(n, 2, 0), eta));
            CAPTURE(n);
            CAPTURE(eta);
            CHECK(std::abs(r.rho_formula - r.rho_numeric) < 1e-9);
            CHECK(r.rho_formula > 0.0);
            CHECK(r.rho_formula < 1.0);
        }
    }
}

TEST_CASE("spectral radius decreases with eta") {
    const auto t = square(8, 2, 0);
    double prev = 1.0;
    for (double eta = 1e-1; eta > 1e-9; eta /= 10) {
        const double rho = spectral_radius(assemble_gramm(t, eta)).rho_formula;
        CHECK(rho < prev);
        prev = rho;
    }
}

TEST_CASE("generalized eigenvalues of a linear element") {
    // K v = lambda M v on one linear element: eigenvalues 0 and 12.
    const auto s = make_space({0.0, 1.0}, 1, 0);
    const auto ev = generalized_eigenvalues(assemble_stiffness_1d(s), assemble_mass_1d(s));
    CHECK(std::abs(ev.minCoeff()) < 1e-12);
    CHECK(ev.maxCoeff() == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("spectral diagnostic refuses large spaces") {
    CHECK_THROWS_AS(spectral_radius(assemble_gramm(square(256, 2, 1), 1e-4)), std::invalid_argument);
}
