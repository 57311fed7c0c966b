#include "igrm/assembly.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "igrm/quadrature.hpp"

namespace igrm {

namespace {

// Basis values at every quadrature point of every element of one direction.
struct basis_table {
    std::vector<std::vector<basis_values>> at;  // [element][point]

    basis_table(const spline_space& space, const quadrature_rule& rule, int derivs) {
        const int d = std::min(derivs, space.degree());
        at.resize(space.elements());
        for (int e = 0; e < space.elements(); ++e) {
            at[e].reserve(rule[e].size());
            for (const auto& pt : rule[e]) {
                auto b = eval_basis_on_element(space, e, pt.x, d);
                if (d < derivs) {
                    b.values.conservativeResize(derivs + 1, Eigen::NoChange);
                    b.values.bottomRows(derivs - d).setZero();
                }
                at[e].push_back(std::move(b));
            }
        }
    }
};

basis_values eval_padded(const spline_space& space, int e, double x, int derivs) {
    const int d = std::min(derivs, space.degree());
    auto b = eval_basis_on_element(space, e, x, d);
    if (d < derivs) {
        b.values.conservativeResize(derivs + 1, Eigen::NoChange);
        b.values.bottomRows(derivs - d).setZero();
    }
    return b;
}

void check_compatible(const tensor_space& trial, const tensor_space& test) {
    if (trial.x.breakpoints() != test.x.breakpoints() || trial.y.breakpoints() != test.y.breakpoints()) {
        throw std::invalid_argument("trial and test spaces must share breakpoints in each direction");
    }
}

void check_problem(const problem_definition& problem) {
    if (!problem.beta || !problem.forcing || !problem.boundary) {
        throw std::invalid_argument("problem fields are not defined");
    }
}

// Tensor-product shape values of one 2D space at a point: value, d/dx, d/dy,
// and (optionally) the Laplacian, for the local functions (i, j) -> i * ny + j.
struct local_shapes {
    Eigen::VectorXd v, dx, dy, lap;

    void fill(const basis_values& bx, const basis_values& by, bool with_laplacian) {
        const auto nx = bx.values.cols();
        const auto ny = by.values.cols();
        v.resize(nx * ny);
        dx.resize(nx * ny);
        dy.resize(nx * ny);
        if (with_laplacian) {
            lap.resize(nx * ny);
        }
        for (Eigen::Index i = 0; i < nx; ++i) {
            for (Eigen::Index j = 0; j < ny; ++j) {
                const auto k = i * ny + j;
                v[k] = bx.values(0, i) * by.values(0, j);
                dx[k] = bx.values(1, i) * by.values(0, j);
                dy[k] = bx.values(0, i) * by.values(1, j);
                if (with_laplacian) {
                    lap[k] = bx.values(2, i) * by.values(0, j) + bx.values(0, i) * by.values(2, j);
                }
            }
        }
    }
};

struct boundary_side {
    bool along_y;  // true: edge x = const, integrate over y
    bool at_end;   // true: x = x1 or y = y1
    vec2 normal;
};

constexpr boundary_side sides[] = {
    {true, false, {-1.0, 0.0}},
    {true, true, {1.0, 0.0}},
    {false, false, {0.0, -1.0}},
    {false, true, {0.0, 1.0}},
};

int penalty_degree(const weak_form_config& cfg, const tensor_space& test) {
    return cfg.penalty_degree > 0 ? cfg.penalty_degree : std::max(test.x.degree(), test.y.degree());
}

// Visits every boundary quadrature point with the local basis of the
// boundary element evaluated on the edge.
template <typename Visitor>
void for_each_boundary_point(const tensor_space& space, int q, int derivs, Visitor&& visit) {
    for (const auto& side : sides) {
        const spline_space& normal_space = side.along_y ? space.x : space.y;
        const spline_space& tangent_space = side.along_y ? space.y : space.x;
        const int en = side.at_end ? normal_space.elements() - 1 : 0;
        const double coord = side.at_end ? normal_space.end() : normal_space.begin();
        const double h_normal = normal_space.element_size(en);
        const auto bn = eval_padded(normal_space, en, coord, derivs);
        const auto rule = make_rule(tangent_space.breakpoints(), q);
        for (int et = 0; et < tangent_space.elements(); ++et) {
            for (const auto& pt : rule[et]) {
                const auto bt = eval_padded(tangent_space, et, pt.x, derivs);
                if (side.along_y) {
                    visit(side, en, et, coord, pt.x, pt.weight, h_normal, bn, bt);
                } else {
                    visit(side, et, en, pt.x, coord, pt.weight, h_normal, bt, bn);
                }
            }
        }
    }
}

double penalty_weight(const weak_form_config& cfg, int pdeg, double eps) {
    const double scale = cfg.penalty_scales_with_diffusion ? eps : 1.0;
    return cfg.penalty_sign * cfg.penalty_coefficient * pdeg * pdeg * scale;
}

bool advective_active(const weak_form_config& cfg, double beta_n) {
    return !cfg.inflow_only_advective_boundary || beta_n < 0.0;
}

}  // namespace

Eigen::VectorXd sparse_operator::apply(const Eigen::VectorXd& x) const {
    if (x.size() != m_.cols()) {
        throw std::invalid_argument("operator applied to a vector of the wrong size");
    }
    return m_ * x;
}

Eigen::VectorXd sparse_operator::apply_transpose(const Eigen::VectorXd& y) const {
    if (y.size() != m_.rows()) {
        throw std::invalid_argument("transposed operator applied to a vector of the wrong size");
    }
    return m_.transpose() * y;
}

namespace {

banded_matrix assemble_1d(const spline_space& space, int deriv) {
    const auto rule = make_rule(space.breakpoints(), space.degree() + 1);
    const basis_table table(space, rule, 1);
    banded_matrix m(space.dim(), space.degree());
    for (int e = 0; e < space.elements(); ++e) {
        for (std::size_t k = 0; k < rule[e].size(); ++k) {
            const auto& b = table.at[e][k];
            const double w = rule[e][k].weight;
            for (int i = 0; i <= space.degree(); ++i) {
                for (int j = 0; j <= space.degree(); ++j) {
                    m(b.first_index + i, b.first_index + j) += w * b.values(deriv, i) * b.values(deriv, j);
                }
            }
        }
    }
    return m;
}

}  // namespace

banded_matrix assemble_mass_1d(const spline_space& space) {
    return assemble_1d(space, 0);
}

banded_matrix assemble_stiffness_1d(const spline_space& space) {
    return assemble_1d(space, 1);
}

sparse_operator assemble_B(const problem_definition& problem, const tensor_space& trial, const tensor_space& test,
                           const weak_form_config& cfg, const streamline_stabilization* stab) {
    check_compatible(trial, test);
    check_problem(problem);

    const double eps = problem.epsilon;
    const int derivs = stab ? 2 : 1;
    const auto rx = stab ? streamline_rule(trial.x, test.x) : gauss_rule(trial.x, test.x);
    const auto ry = stab ? streamline_rule(trial.y, test.y) : gauss_rule(trial.y, test.y);
    const basis_table ux_tab(trial.x, rx, derivs), uy_tab(trial.y, ry, derivs);
    const basis_table vx_tab(test.x, rx, 1), vy_tab(test.y, ry, 1);

    const int n_trial_loc = (trial.x.degree() + 1) * (trial.y.degree() + 1);
    const int n_test_loc = (test.x.degree() + 1) * (test.y.degree() + 1);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(trial.x.elements()) * trial.y.elements() * n_trial_loc * n_test_loc);

    Eigen::MatrixXd local(n_test_loc, n_trial_loc);
    local_shapes u, v;

    auto scatter = [&](const basis_values& vx, const basis_values& vy, const basis_values& ux, const basis_values& uy) {
        const auto tny = vy.values.cols();
        const auto uny = uy.values.cols();
        for (Eigen::Index i = 0; i < local.rows(); ++i) {
            const int row = test.index(vx.first_index + static_cast<int>(i / tny), vy.first_index + static_cast<int>(i % tny));
            for (Eigen::Index j = 0; j < local.cols(); ++j) {
                if (local(i, j) != 0.0) {
                    const int col =
                        trial.index(ux.first_index + static_cast<int>(j / uny), uy.first_index + static_cast<int>(j % uny));
                    triplets.emplace_back(row, col, local(i, j));
                }
            }
        }
    };

    for (int ex = 0; ex < trial.x.elements(); ++ex) {
        for (int ey = 0; ey < trial.y.elements(); ++ey) {
            local.setZero();
            const double tau = stab ? stab->tau(ex, ey) : 0.0;
            for (std::size_t kx = 0; kx < rx[ex].size(); ++kx) {
                for (std::size_t ky = 0; ky < ry[ey].size(); ++ky) {
                    const double x = rx[ex][kx].x;
                    const double y = ry[ey][ky].x;
                    const double w = rx[ex][kx].weight * ry[ey][ky].weight;
                    const auto beta = problem.beta(x, y);
                    u.fill(ux_tab.at[ex][kx], uy_tab.at[ey][ky], stab != nullptr);
                    v.fill(vx_tab.at[ex][kx], vy_tab.at[ey][ky], false);
                    const Eigen::VectorXd adv = beta[0] * u.dx + beta[1] * u.dy;
                    local.noalias() += w * (v.v * adv.transpose() + eps * (v.dx * u.dx.transpose() + v.dy * u.dy.transpose()));
                    if (stab) {
                        const Eigen::VectorXd stream_v = beta[0] * v.dx + beta[1] * v.dy;
                        const Eigen::VectorXd resid_u = adv + stab->laplacian_sign * eps * u.lap;
                        local.noalias() += (w * tau) * stream_v * resid_u.transpose();
                    }
                }
            }
            scatter(vx_tab.at[ex][0], vy_tab.at[ey][0], ux_tab.at[ex][0], uy_tab.at[ey][0]);
        }
    }

    if (cfg.boundary_terms) {
        const int q = std::max(std::max(trial.x.degree(), test.x.degree()), std::max(trial.y.degree(), test.y.degree())) + 1;
        const int pdeg = penalty_degree(cfg, test);
        for_each_boundary_point(trial, q, 1, [&](const boundary_side& side, int ex, int ey, double x, double y, double w,
                                                 double h_normal, const basis_values& ux, const basis_values& uy) {
            const auto vx = eval_padded(test.x, ex, x, 1);
            const auto vy = eval_padded(test.y, ey, y, 1);
            u.fill(ux, uy, false);
            v.fill(vx, vy, false);
            const auto beta = problem.beta(x, y);
            const auto& n = side.normal;
            const double beta_n = beta[0] * n[0] + beta[1] * n[1];
            double mass = penalty_weight(cfg, pdeg, eps) / h_normal;
            if (advective_active(cfg, beta_n)) {
                mass += cfg.advective_sign * beta_n;
            }
            const Eigen::VectorXd du_n = n[0] * u.dx + n[1] * u.dy;
            const Eigen::VectorXd dv_n = n[0] * v.dx + n[1] * v.dy;
            local.noalias() = w * (-eps * v.v * du_n.transpose() - eps * dv_n * u.v.transpose() + mass * v.v * u.v.transpose());
            scatter(vx, vy, ux, uy);
        });
    }

    sparse_operator::storage m(test.dim(), trial.dim());
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return sparse_operator(std::move(m));
}

Eigen::VectorXd assemble_rhs(const problem_definition& problem, const tensor_space& test, const weak_form_config& cfg,
                             const streamline_stabilization* stab) {
    check_problem(problem);
    const double eps = problem.epsilon;
    const auto rx = stab ? streamline_rule(test.x, test.x) : gauss_rule(test.x, test.x);
    const auto ry = stab ? streamline_rule(test.y, test.y) : gauss_rule(test.y, test.y);
    const basis_table vx_tab(test.x, rx, 1), vy_tab(test.y, ry, 1);

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(test.dim());
    local_shapes v;
    auto scatter = [&](const basis_values& vx, const basis_values& vy, const Eigen::VectorXd& local) {
        const auto tny = vy.values.cols();
        for (Eigen::Index i = 0; i < local.size(); ++i) {
            rhs[test.index(vx.first_index + static_cast<int>(i / tny), vy.first_index + static_cast<int>(i % tny))] += local[i];
        }
    };

    Eigen::VectorXd local;
    for (int ex = 0; ex < test.x.elements(); ++ex) {
        for (int ey = 0; ey < test.y.elements(); ++ey) {
            local.setZero((test.x.degree() + 1) * (test.y.degree() + 1));
            const double tau = stab ? stab->tau(ex, ey) : 0.0;
            for (std::size_t kx = 0; kx < rx[ex].size(); ++kx) {
                for (std::size_t ky = 0; ky < ry[ey].size(); ++ky) {
                    const double x = rx[ex][kx].x;
                    const double y = ry[ey][ky].x;
                    const double w = rx[ex][kx].weight * ry[ey][ky].weight;
                    const double f = problem.forcing(x, y);
                    if (f == 0.0) {
                        continue;
                    }
                    v.fill(vx_tab.at[ex][kx], vy_tab.at[ey][ky], false);
                    local.noalias() += (w * f) * v.v;
                    if (stab) {
                        const auto beta = problem.beta(x, y);
                        local.noalias() += (w * f * tau) * (beta[0] * v.dx + beta[1] * v.dy);
                    }
                }
            }
            scatter(vx_tab.at[ex][0], vy_tab.at[ey][0], local);
        }
    }

    if (cfg.boundary_terms) {
        const int q = std::max(test.x.degree(), test.y.degree()) + 1;
        const int pdeg = penalty_degree(cfg, test);
        for_each_boundary_point(test, q, 1, [&](const boundary_side& side, int, int, double x, double y, double w,
                                                double h_normal, const basis_values& vx, const basis_values& vy) {
            const double g = problem.boundary(x, y);
            if (g == 0.0) {
                return;
            }
            v.fill(vx, vy, false);
            const auto beta = problem.beta(x, y);
            const auto& n = side.normal;
            const double beta_n = beta[0] * n[0] + beta[1] * n[1];
            double mass = penalty_weight(cfg, pdeg, eps) / h_normal;
            if (advective_active(cfg, beta_n)) {
                mass += cfg.advective_sign * beta_n;
            }
            const Eigen::VectorXd dv_n = n[0] * v.dx + n[1] * v.dy;
            local = (w * g) * (mass * v.v - eps * dv_n);
            scatter(vx, vy, local);
        });
    }
    return rhs;
}

Eigen::VectorXd kron_apply(const banded_matrix& a, const banded_matrix& b, const Eigen::VectorXd& v) {
    const int nx = a.size();
    const int ny = b.size();
    if (v.size() != static_cast<Eigen::Index>(nx) * ny) {
        throw std::invalid_argument("Kronecker operand has the wrong size");
    }
    Eigen::VectorXd tmp(v.size());
    a.apply_rows(v.data(), tmp.data(), ny);
    Eigen::VectorXd out(v.size());
    for (int i = 0; i < nx; ++i) {
        b.apply(std::span<const double>(tmp.data() + i * ny, ny), std::span<double>(out.data() + i * ny, ny));
    }
    return out;
}

Eigen::MatrixXd kron_dense(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return k;
}

Eigen::VectorXd gramm_operator::apply(const Eigen::VectorXd& v) const {
    return kron_apply(mx, my, v) + eta * (kron_apply(kx, my, v) + kron_apply(mx, ky, v));
}

gramm_operator assemble_gramm(const tensor_space& test, double eta) {
    if (!(eta > 0.0)) {
        throw std::invalid_argument("Gramm weight eta must be positive");
    }
    return gramm_operator{assemble_mass_1d(test.x), assemble_stiffness_1d(test.x), assemble_mass_1d(test.y),
                          assemble_stiffness_1d(test.y), eta};
}

}  // namespace igrm
