// Independent reference implementations for the tests. Nothing here calls the
// library's evaluation, quadrature or assembly code.
#ifndef IGRM_TESTS_ORACLES_HPP_
#define IGRM_TESTS_ORACLES_HPP_

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "igrm/assembly.hpp"
#include "igrm/problems.hpp"
#include "igrm/splines.hpp"

namespace oracle {

/// Open knot vector built from scratch.
inline std::vector<double> knots(const std::vector<double>& bp, int p, int c) {
    std::vector<double> t(p + 1, bp.front());
    for (std::size_t i = 1; i + 1 < bp.size(); ++i) {
        t.insert(t.end(), p - c, bp[i]);
    }
    t.insert(t.end(), p + 1, bp.back());
    return t;
}

/// k-th derivative of N_{i,p} by the textbook recursion. The last non-empty
/// span is closed on the right so that the right end point is covered.
inline double bspline(const std::vector<double>& t, int i, int p, double x, int k = 0) {
    if (k > 0) {
        if (p == 0) {
            return 0.0;
        }
        double out = 0.0;
        const double l = t[i + p] - t[i];
        const double r = t[i + p + 1] - t[i + 1];
        if (l > 0.0) out += p / l * bspline(t, i, p - 1, x, k - 1);
        if (r > 0.0) out -= p / r * bspline(t, i + 1, p - 1, x, k - 1);
        return out;
    }
    if (p == 0) {
        const bool last = t[i + 1] == t.back() && t[i] < t[i + 1];
        return (t[i] <= x && (x < t[i + 1] || (last && x == t[i + 1]))) ? 1.0 : 0.0;
    }
    double out = 0.0;
    const double l = t[i + p] - t[i];
    const double r = t[i + p + 1] - t[i + 1];
    if (l > 0.0) out += (x - t[i]) / l * bspline(t, i, p - 1, x);
    if (r > 0.0) out += (t[i + p + 1] - x) / r * bspline(t, i + 1, p - 1, x);
    return out;
}

struct node {
    double x, w;
};

/// Gauss-Legendre nodes on [-1, 1] from the eigenvalues of the Jacobi matrix.
inline std::vector<node> golub_welsch(int q) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(q, q);
    for (int k = 1; k < q; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        j(k, k - 1) = j(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    std::vector<node> out(q);
    for (int k = 0; k < q; ++k) {
        const double v = es.eigenvectors()(0, k);
        out[k] = {es.eigenvalues()[k], 2.0 * v * v};
    }
    return out;
}

/// Per-element Gauss nodes (10 points unless stated) over a breakpoint list.
inline std::vector<std::vector<node>> element_nodes(const std::vector<double>& bp, int q = 10) {
    const auto ref = golub_welsch(q);
    std::vector<std::vector<node>> out(bp.size() - 1);
    for (std::size_t e = 0; e + 1 < bp.size(); ++e) {
        const double a = bp[e], b = bp[e + 1];
        for (const auto& n : ref) {
            out[e].push_back({0.5 * (a + b) + 0.5 * (b - a) * n.x, 0.5 * (b - a) * n.w});
        }
    }
    return out;
}

/// Dense 1D mass (k = 0) or stiffness (k = 1) matrix by over-integration.
inline Eigen::MatrixXd matrix_1d(const std::vector<double>& bp, int p, int c, int k) {
    const auto t = knots(bp, p, c);
    const int n = static_cast<int>(t.size()) - p - 1;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& el : element_nodes(bp)) {
        for (const auto& nd : el) {
            for (int i = 0; i < n; ++i) {
                const double bi = bspline(t, i, p, nd.x, k);
                for (int j = 0; j < n; ++j) {
                    m(i, j) += nd.w * bi * bspline(t, j, p, nd.x, k);
                }
            }
        }
    }
    return m;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Tensor basis function values at one point: [k](index) with k = value, dx,
/// dy, dxx, dyy.
struct space2d {
    std::vector<double> bx, by;
    int px, cx, py, cy;
    std::vector<double> tx, ty;
    int nx, ny;

    space2d(std::vector<double> x, std::vector<double> y, int p, int c)
    : bx(std::move(x)), by(std::move(y)), px(p), cx(c), py(p), cy(c) {
        tx = knots(bx, px, cx);
        ty = knots(by, py, cy);
        nx = static_cast<int>(tx.size()) - px - 1;
        ny = static_cast<int>(ty.size()) - py - 1;
    }
    int dim() const { return nx * ny; }

    struct point_values {
        Eigen::VectorXd v, dx, dy, lap;
    };

    point_values at(double x, double y) const {
        point_values out{Eigen::VectorXd(dim()), Eigen::VectorXd(dim()), Eigen::VectorXd(dim()), Eigen::VectorXd(dim())};
        for (int a = 0; a < nx; ++a) {
            const double fx = bspline(tx, a, px, x), gx = bspline(tx, a, px, x, 1), hx = bspline(tx, a, px, x, 2);
            for (int b = 0; b < ny; ++b) {
                const double fy = bspline(ty, b, py, y), gy = bspline(ty, b, py, y, 1), hy = bspline(ty, b, py, y, 2);
                const int i = a * ny + b;
                out.v[i] = fx * fy;
                out.dx[i] = gx * fy;
                out.dy[i] = fx * gy;
                out.lap[i] = hx * fy + fx * hy;
            }
        }
        return out;
    }
};

/// Which boundary contributions to include and how, mirroring the library's
/// configuration knobs.
struct boundary_rule {
    bool enabled = true;
    int penalty_sign = 1;
    double penalty_coefficient = 3.0;
    bool scale_with_eps = true;
    bool inflow_only = true;
    int advective_sign = 1;
    int penalty_degree = 0;  // 0: test degree
};

inline boundary_rule rule_from(const igrm::weak_form_config& cfg) {
    return {cfg.boundary_terms,    cfg.penalty_sign,   cfg.penalty_coefficient, cfg.penalty_scales_with_diffusion,
            cfg.inflow_only_advective_boundary, cfg.advective_sign, cfg.penalty_degree};
}

/// SUPG parameter written out independently.
inline double tau(double hx, double hy, double bx, double by, double eps, int p) {
    double adv = bx / hx + by / hy;
    if (adv < 0.0) adv = std::abs(bx) / hx + std::abs(by) / hy;
    return 1.0 / (adv + 3.0 * p * p * eps / (hx * hx + hy * hy));
}

struct supg_rule {
    bool enabled = false;
    int laplacian_sign = -1;
};

struct edge {
    bool vertical;  // x = const
    bool at_end;
    double nx, ny;
};

inline const edge edges[4] = {{true, false, -1, 0}, {true, true, 1, 0}, {false, false, 0, -1}, {false, true, 0, 1}};

/// Entrywise brute-force B (test x trial) and load vector with q Gauss
/// points per element and edge. Data that is not polynomial only agrees
/// with a production rule of the same size.
struct system {
    Eigen::MatrixXd B;
    Eigen::VectorXd F;
};

inline system assemble(const igrm::problem_definition& pr, const space2d& trial, const space2d& test,
                       const boundary_rule& br, const supg_rule& sr = {}, int q = 10) {
    system out{Eigen::MatrixXd::Zero(test.dim(), trial.dim()), Eigen::VectorXd::Zero(test.dim())};
    const double eps = pr.epsilon;
    const auto ex = element_nodes(trial.bx, q);
    const auto ey = element_nodes(trial.by, q);
    const int p_tau = std::max(trial.px, trial.py);
    for (std::size_t i = 0; i < ex.size(); ++i) {
        for (std::size_t j = 0; j < ey.size(); ++j) {
            const double hx = trial.bx[i + 1] - trial.bx[i];
            const double hy = trial.by[j + 1] - trial.by[j];
            const auto bc = pr.beta(0.5 * (trial.bx[i] + trial.bx[i + 1]), 0.5 * (trial.by[j] + trial.by[j + 1]));
            const double t = sr.enabled ? tau(hx, hy, bc[0], bc[1], eps, p_tau) : 0.0;
            for (const auto& nx : ex[i]) {
                for (const auto& ny : ey[j]) {
                    const double w = nx.w * ny.w;
                    const auto u = trial.at(nx.x, ny.x);
                    const auto v = test.at(nx.x, ny.x);
                    const auto b = pr.beta(nx.x, ny.x);
                    const double f = pr.forcing(nx.x, ny.x);
                    const Eigen::VectorXd adv = b[0] * u.dx + b[1] * u.dy;
                    out.B += w * (v.v * adv.transpose() + eps * (v.dx * u.dx.transpose() + v.dy * u.dy.transpose()));
                    out.F += w * f * v.v;
                    if (sr.enabled) {
                        const Eigen::VectorXd sv = b[0] * v.dx + b[1] * v.dy;
                        out.B += w * t * sv * (adv + sr.laplacian_sign * eps * u.lap).transpose();
                        out.F += w * t * f * sv;
                    }
                }
            }
        }
    }
    if (!br.enabled) {
        return out;
    }
    const int pdeg = br.penalty_degree > 0 ? br.penalty_degree : std::max(test.px, test.py);
    for (const auto& e : edges) {
        const auto& along = e.vertical ? trial.by : trial.bx;
        const auto& across = e.vertical ? trial.bx : trial.by;
        const double coord = e.at_end ? across.back() : across.front();
        const double h = e.at_end ? across[across.size() - 1] - across[across.size() - 2] : across[1] - across[0];
        for (const auto& el : element_nodes(along, q)) {
            for (const auto& nd : el) {
                const double x = e.vertical ? coord : nd.x;
                const double y = e.vertical ? nd.x : coord;
                const auto u = trial.at(x, y);
                const auto v = test.at(x, y);
                const auto b = pr.beta(x, y);
                const double bn = b[0] * e.nx + b[1] * e.ny;
                double mass = br.penalty_sign * br.penalty_coefficient * pdeg * pdeg * (br.scale_with_eps ? eps : 1.0) / h;
                if (!br.inflow_only || bn < 0.0) mass += br.advective_sign * bn;
                const Eigen::VectorXd dun = e.nx * u.dx + e.ny * u.dy;
                const Eigen::VectorXd dvn = e.nx * v.dx + e.ny * v.dy;
                out.B += nd.w * (-eps * v.v * dun.transpose() - eps * dvn * u.v.transpose() + mass * v.v * u.v.transpose());
                const double g = pr.boundary(x, y);
                out.F += nd.w * g * (mass * v.v - eps * dvn);
            }
        }
    }
    return out;
}

/// Deterministic generators for the property tests.
struct gen {
    std::mt19937_64 rng;
    explicit gen(std::uint64_t seed) : rng(seed) { }

    double real(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

    /// Strictly increasing breakpoints with element sizes varying up to 10x.
    std::vector<double> breakpoints(int elements, double a = 0.0, double b = 1.0) {
        std::vector<double> w(elements);
        for (auto& x : w) x = real(0.1, 1.0);
        double total = 0.0;
        for (double x : w) total += x;
        std::vector<double> bp{a};
        double acc = 0.0;
        for (int i = 0; i < elements; ++i) {
            acc += w[i];
            bp.push_back(i + 1 == elements ? b : a + (b - a) * acc / total);
        }
        return bp;
    }

    Eigen::VectorXd vector(int n) {
        Eigen::VectorXd v(n);
        for (auto& x : v) x = real(-1.0, 1.0);
        return v;
    }
};

}  // namespace oracle

#endif  // IGRM_TESTS_ORACLES_HPP_
