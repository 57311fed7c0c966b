#include "igrm/splines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace igrm {

spline_space::spline_space(std::vector<double> breakpoints, int degree, int continuity)
: breakpoints_(std::move(breakpoints))
, degree_(degree)
, continuity_(continuity) {
    if (degree_ < 1) {
        throw std::invalid_argument("spline degree must be at least 1");
    }
    if (continuity_ < -1 || continuity_ > degree_ - 1) {
        throw std::invalid_argument("continuity " + std::to_string(continuity_) + " out of range for degree "
                                    + std::to_string(degree_));
    }
    if (breakpoints_.size() < 2) {
        throw std::invalid_argument("at least two breakpoints are required");
    }
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1])) {
            throw std::invalid_argument("breakpoints must be strictly increasing");
        }
    }

    const int mult = degree_ - continuity_;
    knots_.reserve(2 * (degree_ + 1) + (breakpoints_.size() - 2) * mult);
    knots_.insert(knots_.end(), degree_ + 1, breakpoints_.front());
    for (std::size_t i = 1; i + 1 < breakpoints_.size(); ++i) {
        knots_.insert(knots_.end(), mult, breakpoints_[i]);
    }
    knots_.insert(knots_.end(), degree_ + 1, breakpoints_.back());
}

int spline_space::find_element(double x) const {
    if (x < begin() || x > end()) {
        throw std::out_of_range("point " + std::to_string(x) + " outside the spline domain");
    }
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    int e = static_cast<int>(it - breakpoints_.begin()) - 1;
    return std::min(e, elements() - 1);
}

spline_space make_space(std::vector<double> breakpoints, int degree, int continuity) {
    return spline_space(std::move(breakpoints), degree, continuity);
}

std::vector<double> uniform_breakpoints(double a, double b, int elements) {
    if (elements < 1) {
        throw std::invalid_argument("number of elements must be positive");
    }
    std::vector<double> points(elements + 1);
    for (int i = 0; i <= elements; ++i) {
        points[i] = a + (b - a) * i / elements;
    }
    points.back() = b;
    return points;
}

basis_values eval_basis_on_element(const spline_space& space, int e, double x, int max_deriv) {
    const int p = space.degree();
    if (max_deriv < 0 || max_deriv > p) {
        throw std::invalid_argument("derivative order must lie in [0, degree]");
    }
    const auto& t = space.knots();
    const int span = space.element_span(e);

    // Cox-de Boor triangle with derivatives.
    Eigen::MatrixXd ndu(p + 1, p + 1);
    std::vector<double> left(p + 1), right(p + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[r + 1] + left[j - r];
            double tmp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        ndu(j, j) = saved;
    }

    basis_values out;
    out.first_index = span - p;
    out.values.resize(max_deriv + 1, p + 1);
    for (int j = 0; j <= p; ++j) {
        out.values(0, j) = ndu(j, p);
    }

    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0;
        int s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= max_deriv; ++k) {
            double d = 0.0;
            int rk = r - k;
            int pk = p - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            int j1 = rk >= -1 ? 1 : -rk;
            int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                d += a(s2, k) * ndu(r, pk);
            }
            out.values(k, r) = d;
            std::swap(s1, s2);
        }
    }

    double factor = p;
    for (int k = 1; k <= max_deriv; ++k) {
        out.values.row(k) *= factor;
        factor *= p - k;
    }
    return out;
}

basis_values eval_basis(const spline_space& space, double x, int max_deriv) {
    return eval_basis_on_element(space, space.find_element(x), x, max_deriv);
}

double eval_spline(const spline_space& space, std::span<const double> coeffs, double x) {
    if (static_cast<int>(coeffs.size()) != space.dim()) {
        throw std::invalid_argument("coefficient count does not match the space dimension");
    }
    auto b = eval_basis(space, x, 0);
    double sum = 0.0;
    for (int j = 0; j < b.values.cols(); ++j) {
        sum += coeffs[b.first_index + j] * b.values(0, j);
    }
    return sum;
}

spline_space refine_halve_last(const spline_space& space) {
    auto points = space.breakpoints();
    const double mid = 0.5 * (points[points.size() - 2] + points.back());
    points.insert(points.end() - 1, mid);
    return spline_space(std::move(points), space.degree(), space.continuity());
}

}  // namespace igrm
