#ifndef IGRM_PROBLEMS_HPP_
#define IGRM_PROBLEMS_HPP_

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "igrm/splines.hpp"

namespace igrm {

using vec2 = std::array<double, 2>;
using scalar_field = std::function<double(double, double)>;
using vector_field = std::function<vec2(double, double)>;

struct rectangle {
    double x0, x1;
    double y0, y1;
};

struct exact_solution {
    scalar_field value;
    vector_field gradient;
    scalar_field laplacian;  // optional, used for residual self-checks
};

/// Stationary advection-diffusion problem beta . grad u - eps lap u = f on a
/// rectangle with Dirichlet data g imposed weakly on the whole boundary.
struct problem_definition {
    std::string name;
    rectangle domain;
    vector_field beta;
    double epsilon;
    scalar_field forcing;
    scalar_field boundary;
    std::optional<exact_solution> exact;
};

/// u = phi(x) phi(y), phi(t) = t + (e^{Pe t} - 1) / (1 - e^{Pe}), beta = (1,1).
problem_definition manufactured_problem(double peclet);

/// beta = (1,0), f = 0, g = sin(pi y) on x = 0, zero elsewhere.
problem_definition eriksson_problem(double peclet);

/// Rotating wind beta = (-y, x) on (0,1) x (-1,1) with tanh inflow profiles.
/// With mirror set, the x = 0 profiles are also applied for negative y.
problem_definition vortical_problem(double peclet, double wind, bool mirror = false);

struct error_norms_result {
    double l2_rel_pct;
    double h1_rel_pct;
};

/// Relative L2 and H1 errors in percent, integrated with p + 2 Gauss points
/// per direction on each element.
error_norms_result error_norms(const Eigen::VectorXd& coeffs, const tensor_space& space, const exact_solution& exact);

/// Value of a tensor-product spline at (x, y).
double evaluate(const Eigen::VectorXd& coeffs, const tensor_space& space, double x, double y);

struct mesh_breakpoints {
    std::vector<double> x;
    std::vector<double> y;
};

/// Sequence of meshes refined towards x = x_end. Entry 0 is the base mesh;
/// entry k follows from entry k-1 by halving the last x interval while the
/// smallest x interval is larger than switch_size, and the last y interval
/// afterwards. A non-positive switch_size never switches direction.
std::vector<mesh_breakpoints> adaptive_sequence(const mesh_breakpoints& base, int steps, double switch_size);

}  // namespace igrm

#endif  // IGRM_PROBLEMS_HPP_
