#ifndef IGRM_SPLINES_HPP_
#define IGRM_SPLINES_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace igrm {

using knot_vector = std::vector<double>;

/// Degree/continuity pair, written (p,c) throughout the tables.
struct order {
    int degree;
    int continuity;

    friend bool operator==(const order&, const order&) = default;
};

/**
 * One-dimensional B-spline space on an open knot vector.
 *
 * Continuity is uniform at interior breakpoints, so every interior breakpoint
 * appears p - c times in the knot vector and the end points p + 1 times.
 */
class spline_space {
public:
    spline_space(std::vector<double> breakpoints, int degree, int continuity);

    int degree() const { return degree_; }
    int continuity() const { return continuity_; }
    int dim() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
    int elements() const { return static_cast<int>(breakpoints_.size()) - 1; }

    double begin() const { return breakpoints_.front(); }
    double end() const { return breakpoints_.back(); }

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const knot_vector& knots() const { return knots_; }

    double element_begin(int e) const { return breakpoints_[e]; }
    double element_end(int e) const { return breakpoints_[e + 1]; }
    double element_size(int e) const { return breakpoints_[e + 1] - breakpoints_[e]; }

    /// Index of the knot span [t_s, t_{s+1}) that coincides with element e.
    int element_span(int e) const { return degree_ + e * (degree_ - continuity_); }

    /// Global index of the first basis function supported on element e.
    int first_dof(int e) const { return e * (degree_ - continuity_); }

    /// Element containing x; the right end point belongs to the last element.
    int find_element(double x) const;

private:
    std::vector<double> breakpoints_;
    int degree_;
    int continuity_;
    knot_vector knots_;
};

/// Values of the p+1 basis functions supported at a point; row k holds the
/// k-th derivatives.
struct basis_values {
    int first_index = 0;
    Eigen::MatrixXd values;
};

spline_space make_space(std::vector<double> breakpoints, int degree, int continuity);

/// Uniform breakpoints on [a, b].
std::vector<double> uniform_breakpoints(double a, double b, int elements);

/// Evaluate basis functions and derivatives up to max_deriv at x. Points on
/// the right end of the domain are evaluated as limits from the left.
basis_values eval_basis(const spline_space& space, double x, int max_deriv);

/// Same as eval_basis, but uses the polynomial piece of element e (x may lie
/// on the element's closure).
basis_values eval_basis_on_element(const spline_space& space, int e, double x, int max_deriv);

/// Value of the spline with given coefficients at x.
double eval_spline(const spline_space& space, std::span<const double> coeffs, double x);

/// Insert the midpoint of the last breakpoint interval.
spline_space refine_halve_last(const spline_space& space);

/// Tensor product of two spaces; global index of (a, b) is a * dim_y + b.
struct tensor_space {
    spline_space x;
    spline_space y;

    int dim() const { return x.dim() * y.dim(); }
    int index(int a, int b) const { return a * y.dim() + b; }
};

}  // namespace igrm

#endif  // IGRM_SPLINES_HPP_
