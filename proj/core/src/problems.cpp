#include "igrm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "igrm/quadrature.hpp"

namespace igrm {

namespace {

constexpr double pi = std::numbers::pi;

bool on_line(double v, double line) {
    return std::abs(v - line) <= 1e-12 * std::max(1.0, std::abs(line));
}

// Boundary layer profile t + (e^{Pe t} - 1) / (1 - e^{Pe}), written with
// exponentials shifted to the outflow end so it never overflows.
struct layer_profile {
    double pe;
    double scale;  // 1 / (1 - e^{-Pe})

    explicit layer_profile(double peclet)
    : pe(peclet)
    , scale(1.0 / -std::expm1(-peclet)) { }

    double value(double t) const { return t - (std::exp(pe * (t - 1.0)) - std::exp(-pe)) * scale; }
    double d1(double t) const { return 1.0 - pe * std::exp(pe * (t - 1.0)) * scale; }
    double d2(double t) const { return -pe * pe * std::exp(pe * (t - 1.0)) * scale; }
};

}  // namespace

problem_definition manufactured_problem(double peclet) {
    if (!(peclet > 0.0) || !std::isfinite(peclet)) {
        throw std::invalid_argument("Peclet number must be positive and finite");
    }
    const layer_profile phi(peclet);
    const double eps = 1.0 / peclet;

    problem_definition prob;
    prob.name = "manufactured";
    prob.domain = {0.0, 1.0, 0.0, 1.0};
    prob.beta = [](double, double) { return vec2{1.0, 1.0}; };
    prob.epsilon = eps;
    prob.forcing = [phi, eps](double x, double y) {
        const double px = phi.value(x);
        const double py = phi.value(y);
        const double dx = phi.d1(x);
        const double dy = phi.d1(y);
        return dx * py + px * dy - eps * (phi.d2(x) * py + px * phi.d2(y));
    };
    prob.boundary = [](double, double) { return 0.0; };
    prob.exact = exact_solution{
        [phi](double x, double y) { return phi.value(x) * phi.value(y); },
        [phi](double x, double y) {
            return vec2{phi.d1(x) * phi.value(y), phi.value(x) * phi.d1(y)};
        },
        [phi](double x, double y) { return phi.d2(x) * phi.value(y) + phi.value(x) * phi.d2(y); },
    };
    return prob;
}

problem_definition eriksson_problem(double peclet) {
    if (!(peclet > 0.0) || !std::isfinite(peclet)) {
        throw std::invalid_argument("Peclet number must be positive and finite");
    }
    const double eps = 1.0 / peclet;
    const double root = std::sqrt(1.0 + 4.0 * pi * pi * eps * eps);
    const double r1 = (1.0 + root) / (2.0 * eps);
    const double r2 = -2.0 * pi * pi * eps / (1.0 + root);
    const double denom = std::exp(-r1) - std::exp(-r2);

    struct profile {
        double r1, r2, denom;
        double e1(double x) const { return std::exp(r1 * (x - 1.0)); }
        double e2(double x) const { return std::exp(r2 * (x - 1.0)); }
        double value(double x) const { return (e1(x) - e2(x)) / denom; }
        double d1(double x) const { return (r1 * e1(x) - r2 * e2(x)) / denom; }
        double d2(double x) const { return (r1 * r1 * e1(x) - r2 * r2 * e2(x)) / denom; }
    };
    const profile px{r1, r2, denom};

    problem_definition prob;
    prob.name = "eriksson";
    prob.domain = {0.0, 1.0, 0.0, 1.0};
    prob.beta = [](double, double) { return vec2{1.0, 0.0}; };
    prob.epsilon = eps;
    prob.forcing = [](double, double) { return 0.0; };
    prob.boundary = [](double x, double y) { return on_line(x, 0.0) ? std::sin(pi * y) : 0.0; };
    prob.exact = exact_solution{
        [px](double x, double y) { return std::sin(pi * y) * px.value(x); },
        [px](double x, double y) {
            return vec2{std::sin(pi * y) * px.d1(x), pi * std::cos(pi * y) * px.value(x)};
        },
        [px](double x, double y) { return std::sin(pi * y) * (px.d2(x) - pi * pi * px.value(x)); },
    };
    return prob;
}

problem_definition vortical_problem(double peclet, double wind, bool mirror) {
    if (!(peclet > 0.0) || !(wind > 0.0)) {
        throw std::invalid_argument("Peclet number and wind force must be positive");
    }
    const double eps = 1.0 / peclet;

    problem_definition prob;
    prob.name = "vortical";
    prob.domain = {0.0, 1.0, -1.0, 1.0};
    prob.beta = [](double x, double y) { return vec2{-y, x}; };
    prob.epsilon = eps;
    prob.forcing = [](double, double) { return 0.0; };
    prob.boundary = [eps, wind, mirror](double x, double y) {
        if (!on_line(x, 0.0)) {
            return 0.0;
        }
        const double s = mirror ? std::abs(y) : y;
        const double ay = std::abs(y);
        if (s >= 0.0 && s <= 0.5) {
            return 0.5 * (std::tanh((ay - 0.35) * wind / eps) + 1.0);
        }
        if (s > 0.5 && s <= 1.0) {
            return 0.5 * (0.65 - std::tanh(ay * wind / eps) + 1.0);
        }
        return 0.0;
    };
    return prob;
}

double evaluate(const Eigen::VectorXd& coeffs, const tensor_space& space, double x, double y) {
    if (coeffs.size() != space.dim()) {
        throw std::invalid_argument("coefficient count does not match the space dimension");
    }
    const auto bx = eval_basis(space.x, x, 0);
    const auto by = eval_basis(space.y, y, 0);
    double sum = 0.0;
    for (int i = 0; i < bx.values.cols(); ++i) {
        for (int j = 0; j < by.values.cols(); ++j) {
            sum += coeffs[space.index(bx.first_index + i, by.first_index + j)] * bx.values(0, i) * by.values(0, j);
        }
    }
    return sum;
}

error_norms_result error_norms(const Eigen::VectorXd& coeffs, const tensor_space& space, const exact_solution& exact) {
    if (coeffs.size() != space.dim()) {
        throw std::invalid_argument("coefficient count does not match the space dimension");
    }
    const int q = std::max(space.x.degree(), space.y.degree()) + 2;
    const auto qx = make_rule(space.x.breakpoints(), q);
    const auto qy = make_rule(space.y.breakpoints(), q);

    double err_l2 = 0.0, err_grad = 0.0, norm_l2 = 0.0, norm_grad = 0.0;
    for (int ex = 0; ex < space.x.elements(); ++ex) {
        for (const auto& px : qx[ex]) {
            const auto bx = eval_basis_on_element(space.x, ex, px.x, 1);
            for (int ey = 0; ey < space.y.elements(); ++ey) {
                for (const auto& py : qy[ey]) {
                    const auto by = eval_basis_on_element(space.y, ey, py.x, 1);
                    double u = 0.0, ux = 0.0, uy = 0.0;
                    for (int i = 0; i < bx.values.cols(); ++i) {
                        for (int j = 0; j < by.values.cols(); ++j) {
                            const double c = coeffs[space.index(bx.first_index + i, by.first_index + j)];
                            u += c * bx.values(0, i) * by.values(0, j);
                            ux += c * bx.values(1, i) * by.values(0, j);
                            uy += c * bx.values(0, i) * by.values(1, j);
                        }
                    }
                    const double w = px.weight * py.weight;
                    const double ue = exact.value(px.x, py.x);
                    const auto ge = exact.gradient(px.x, py.x);
                    err_l2 += w * (u - ue) * (u - ue);
                    err_grad += w * ((ux - ge[0]) * (ux - ge[0]) + (uy - ge[1]) * (uy - ge[1]));
                    norm_l2 += w * ue * ue;
                    norm_grad += w * (ge[0] * ge[0] + ge[1] * ge[1]);
                }
            }
        }
    }
    if (!(norm_l2 > 0.0)) {
        throw std::domain_error("exact solution has zero norm");
    }
    return {100.0 * std::sqrt(err_l2 / norm_l2), 100.0 * std::sqrt((err_l2 + err_grad) / (norm_l2 + norm_grad))};
}

std::vector<mesh_breakpoints> adaptive_sequence(const mesh_breakpoints& base, int steps, double switch_size) {
    if (steps < 1) {
        throw std::invalid_argument("adaptive sequence needs at least one step");
    }
    auto halve_last = [](std::vector<double> pts) {
        const double mid = 0.5 * (pts[pts.size() - 2] + pts.back());
        pts.insert(pts.end() - 1, mid);
        return pts;
    };
    auto smallest = [](const std::vector<double>& pts) {
        double h = pts[1] - pts[0];
        for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            h = std::min(h, pts[i + 1] - pts[i]);
        }
        return h;
    };

    std::vector<mesh_breakpoints> meshes;
    meshes.reserve(steps);
    meshes.push_back(base);
    for (int k = 1; k < steps; ++k) {
        auto next = meshes.back();
        if (switch_size <= 0.0 || smallest(next.x) > switch_size) {
            next.x = halve_last(std::move(next.x));
        } else {
            next.y = halve_last(std::move(next.y));
        }
        meshes.push_back(std::move(next));
    }
    return meshes;
}

}  // namespace igrm
