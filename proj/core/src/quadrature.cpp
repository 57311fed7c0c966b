#include "igrm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace igrm {

std::vector<quad_point> gauss_legendre(int q) {
    if (q < 1) {
        throw std::invalid_argument("Gauss rule needs at least one point");
    }
    std::vector<quad_point> points(q);
    for (int i = 0; i < (q + 1) / 2; ++i) {
        // Newton on P_q starting from the Chebyshev-like guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= q; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute derivative at the converged root.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= q; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = q * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = {-x, w};
        points[q - 1 - i] = {x, w};
    }
    if (q % 2 == 1) {
        points[q / 2].x = 0.0;
    }
    return points;
}

quadrature_rule make_rule(const std::vector<double>& breakpoints, int q) {
    const auto ref = gauss_legendre(q);
    quadrature_rule rule;
    rule.points_per_element = q;
    rule.elements.resize(breakpoints.size() - 1);
    for (std::size_t e = 0; e + 1 < breakpoints.size(); ++e) {
        const double a = breakpoints[e];
        const double b = breakpoints[e + 1];
        const double half = 0.5 * (b - a);
        auto& pts = rule.elements[e];
        pts.reserve(q);
        for (const auto& r : ref) {
            pts.push_back({a + half * (r.x + 1.0), half * r.weight});
        }
    }
    return rule;
}

quadrature_rule gauss_rule(const spline_space& trial, const spline_space& test) {
    if (trial.breakpoints() != test.breakpoints()) {
        throw std::invalid_argument("trial and test spaces must share breakpoints");
    }
    return make_rule(trial.breakpoints(), std::max(trial.degree(), test.degree()) + 1);
}

quadrature_rule streamline_rule(const spline_space& trial, const spline_space& test) {
    if (trial.breakpoints() != test.breakpoints()) {
        throw std::invalid_argument("trial and test spaces must share breakpoints");
    }
    return make_rule(trial.breakpoints(), std::max(trial.degree(), test.degree()) + 2);
}

}  // namespace igrm
