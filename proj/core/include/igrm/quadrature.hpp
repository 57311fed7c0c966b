#ifndef IGRM_QUADRATURE_HPP_
#define IGRM_QUADRATURE_HPP_

#include <vector>

#include "igrm/splines.hpp"

namespace igrm {

struct quad_point {
    double x;
    double weight;
};

/// Gauss-Legendre points on [-1, 1].
std::vector<quad_point> gauss_legendre(int q);

/// Per-element Gauss rule over the breakpoint intervals of a direction.
struct quadrature_rule {
    int points_per_element = 0;
    std::vector<std::vector<quad_point>> elements;

    const std::vector<quad_point>& operator[](int e) const { return elements[e]; }
};

/// q Gauss points mapped onto every interval of breakpoints.
quadrature_rule make_rule(const std::vector<double>& breakpoints, int q);

/// Rule with max(p_trial, p_test) + 1 points per element; both spaces must
/// share breakpoints.
quadrature_rule gauss_rule(const spline_space& trial, const spline_space& test);

/// One point more than gauss_rule. The streamline product (beta . grad u)
/// (beta . grad v) of a linear wind has degree 2p + 2 in each direction.
quadrature_rule streamline_rule(const spline_space& trial, const spline_space& test);

}  // namespace igrm

#endif  // IGRM_QUADRATURE_HPP_
