#include <cmath>
#include <numeric>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"

#include "igrm/splines.hpp"

using namespace igrm;

TEST_CASE("dimension follows the knot multiplicities") {
    CHECK(make_space(uniform_breakpoints(0, 1, 8), 2, 1).dim() == 10);
    CHECK(make_space(uniform_breakpoints(0, 1, 1), 1, 0).dim() == 2);
    CHECK(make_space(uniform_breakpoints(0, 1, 8), 2, 0).dim() == 17);
    CHECK(make_space(uniform_breakpoints(0, 1, 8), 2, 0).dim() * make_space(uniform_breakpoints(0, 1, 8), 2, 0).dim()
              + 100
          == 389);
}

TEST_CASE("dimension formula holds for random spaces") {
    oracle::gen g(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = g.integer(1, 12);
        const int p = g.integer(1, 6);
        const int c = g.integer(-1, p - 1);
        const auto s = make_space(g.breakpoints(n), p, c);
        CHECK(s.dim() == n * (p - c) + c + 1);
        CHECK(s.knots() == oracle::knots(s.breakpoints(), p, c));
    }
}

TEST_CASE("invalid spaces are rejected") {
    CHECK_THROWS_AS(make_space({0.0, 1.0}, 0, -1), std::invalid_argument);
    CHECK_THROWS_AS(make_space({0.0, 1.0}, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(make_space({0.0, 1.0}, 2, -2), std::invalid_argument);
    CHECK_THROWS_AS(make_space({0.0}, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_space({0.0, 0.5, 0.5, 1.0}, 2, 1), std::invalid_argument);
    const auto s = make_space({0.0, 1.0}, 2, 1);
    CHECK_THROWS_AS(eval_basis(s, 1.5, 0), std::out_of_range);
    CHECK_THROWS_AS(eval_basis(s, -0.1, 0), std::out_of_range);
}

TEST_CASE("element lookup assigns the right end point to the last element") {
    const auto s = make_space(uniform_breakpoints(0, 1, 4), 2, 1);
    CHECK(s.find_element(0.0) == 0);
    CHECK(s.find_element(0.25) == 1);
    CHECK(s.find_element(0.9) == 3);
    CHECK(s.find_element(1.0) == 3);
}

TEST_CASE("quadratic C1 basis at an element midpoint") {
    const auto s = make_space(uniform_breakpoints(0, 1, 8), 2, 1);
    const auto b = eval_basis(s, 3.5 / 8.0, 0);
    CHECK(b.values(0, 0) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(b.values(0, 1) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(b.values(0, 2) == doctest::Approx(0.125).epsilon(1e-12));
    const auto t = oracle::knots(s.breakpoints(), 2, 1);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(b.values(0, k) - oracle::bspline(t, b.first_index + k, 2, 3.5 / 8.0)) < 1e-12);
    }
}

TEST_CASE("basis and derivatives agree with the recursive definition") {
    oracle::gen g(3);
    for (int trial = 0; trial < 60; ++trial) {
        const int p = g.integer(1, 5);
        const int c = g.integer(-1, p - 1);
        const auto s = make_space(g.breakpoints(g.integer(1, 7)), p, c);
        const auto& t = s.knots();
        for (int k = 0; k < 5; ++k) {
            const double x = g.real(s.begin(), s.end());
            const auto b = eval_basis(s, x, std::min(p, 3));
            for (int d = 0; d <= std::min(p, 3); ++d) {
                for (int j = 0; j <= p; ++j) {
                    const double ref = oracle::bspline(t, b.first_index + j, p, x, d);
                    CHECK(std::abs(b.values(d, j) - ref) < 1e-9 * std::max(1.0, std::abs(ref)));
                }
            }
        }
    }
}

TEST_CASE("partition of unity and vanishing derivative sum") {
    oracle::gen g(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = g.integer(1, 6);
        const auto s = make_space(g.breakpoints(g.integer(1, 10)), p, g.integer(-1, p - 1));
        const double x = trial % 17 == 0 ? s.end() : g.real(s.begin(), s.end());
        const auto b = eval_basis(s, x, 1);
        CHECK(std::abs(b.values.row(0).sum() - 1.0) < 1e-13);
        CHECK(std::abs(b.values.row(1).sum()) < 1e-12 * std::max(1.0, b.values.row(1).cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("derivatives match central differences") {
    oracle::gen g(8);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = g.integer(2, 5);
        const auto s = make_space(g.breakpoints(g.integer(1, 6)), p, p - 1);
        const int e = g.integer(0, s.elements() - 1);
        const double h = 1e-6;
        const double x = g.real(s.element_begin(e) + 10 * h, s.element_end(e) - 10 * h);
        const auto b = eval_basis_on_element(s, e, x, 1);
        const auto bp = eval_basis_on_element(s, e, x + h, 0);
        const auto bm = eval_basis_on_element(s, e, x - h, 0);
        for (int j = 0; j <= p; ++j) {
            const double fd = (bp.values(0, j) - bm.values(0, j)) / (2 * h);
            CHECK(std::abs(fd - b.values(1, j)) < 1e-5 * std::max(1.0, std::abs(b.values(1, j))));
        }
    }
}

TEST_CASE("eval_spline with all-one coefficients is one") {
    const auto s = make_space(uniform_breakpoints(-1, 2, 5), 3, 1);
    const std::vector<double> ones(s.dim(), 1.0);
    for (double x : {-1.0, -0.3, 0.4, 1.99, 2.0}) {
        CHECK(eval_spline(s, ones, x) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("halving the last interval") {
    CHECK(refine_halve_last(make_space({0.0, 0.5, 1.0}, 2, 1)).breakpoints() == std::vector<double>{0.0, 0.5, 0.75, 1.0});
    CHECK(refine_halve_last(make_space({0.0, 1.0}, 2, 1)).breakpoints() == std::vector<double>{0.0, 0.5, 1.0});
    auto s = make_space({0.0, 1.0}, 2, 1);
    for (int i = 0; i < 20; ++i) {
        s = refine_halve_last(s);
    }
    const auto& bp = s.breakpoints();
    CHECK(bp[bp.size() - 2] == doctest::Approx(0.9999990463).epsilon(1e-10));
    CHECK(bp[bp.size() - 2] == 1.0 - std::ldexp(1.0, -20));
}

TEST_CASE("refinement preserves the spline it refines") {
    // The refined space contains the coarse one, so its best fit of a coarse
    // spline reproduces it pointwise.
    oracle::gen g(21);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = g.integer(1, 4);
        const int c = g.integer(0, p - 1);
        const auto coarse = make_space(g.breakpoints(g.integer(1, 5)), p, c);
        const auto fine = refine_halve_last(coarse);
        REQUIRE(fine.dim() == coarse.dim() + p - c);
        std::vector<double> coef(coarse.dim());
        for (auto& v : coef) v = g.real(-1, 1);

        const int m = 4 * fine.dim();
        Eigen::MatrixXd a(m, fine.dim());
        Eigen::VectorXd rhs(m);
        for (int i = 0; i < m; ++i) {
            const double x = coarse.begin() + (coarse.end() - coarse.begin()) * (i + 0.5) / m;
            const auto b = eval_basis(fine, x, 0);
            a.row(i).setZero();
            for (int j = 0; j <= p; ++j) a(i, b.first_index + j) = b.values(0, j);
            rhs[i] = eval_spline(coarse, coef, x);
        }
        const Eigen::VectorXd fit = a.colPivHouseholderQr().solve(rhs);
        for (int k = 0; k < 10; ++k) {
            const double x = g.real(coarse.begin(), coarse.end());
            const std::vector<double> f(fit.data(), fit.data() + fit.size());
            CHECK(std::abs(eval_spline(fine, f, x) - eval_spline(coarse, coef, x)) < 1e-9);
        }
    }
}

TEST_CASE("tensor index is x-major") {
    const tensor_space t{make_space(uniform_breakpoints(0, 1, 2), 2, 1), make_space(uniform_breakpoints(0, 1, 3), 2, 1)};
    CHECK(t.dim() == 4 * 5);
    CHECK(t.index(0, 0) == 0);
    CHECK(t.index(1, 0) == 5);
    CHECK(t.index(3, 4) == 19);
}
