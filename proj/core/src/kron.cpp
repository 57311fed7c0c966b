#include "igrm/kron.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace igrm {

kronecker_factor::kronecker_factor(const gramm_operator& gramm)
: ax_(gramm.mx.add_scaled(gramm.kx, gramm.eta))
, ay_(gramm.my.add_scaled(gramm.ky, gramm.eta))
, fx_(ax_)
, fy_(ay_)
, eta_(gramm.eta) { }

void kronecker_factor::apply_inverse_in_place(Eigen::VectorXd& v) const {
    const int nx = ax_.size();
    const int ny = ay_.size();
    if (v.size() != static_cast<Eigen::Index>(nx) * ny) {
        throw std::invalid_argument("vector size does not match the Kronecker factor");
    }
    fx_.solve_rows(v.data(), ny);
    for (int i = 0; i < nx; ++i) {
        fy_.solve(std::span<double>(v.data() + static_cast<std::ptrdiff_t>(i) * ny, ny));
    }
}

Eigen::VectorXd kronecker_factor::apply_inverse(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = v;
    apply_inverse_in_place(out);
    return out;
}

Eigen::VectorXd kronecker_factor::apply(const Eigen::VectorXd& v) const {
    return kron_apply(ax_, ay_, v);
}

kronecker_factor factorize(const gramm_operator& gramm) {
    if (!(gramm.eta > 0.0)) {
        throw std::invalid_argument("Gramm weight eta must be positive");
    }
    return kronecker_factor(gramm);
}

Eigen::VectorXd apply_Gtilde_inverse(const kronecker_factor& f, const Eigen::VectorXd& v) {
    return f.apply_inverse(v);
}

Eigen::VectorXd apply_Ktilde(const gramm_operator& gramm, const Eigen::VectorXd& v) {
    return gramm.eta * gramm.eta * kron_apply(gramm.kx, gramm.ky, v);
}

Eigen::VectorXd generalized_eigenvalues(const banded_matrix& k, const banded_matrix& m) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(k.to_dense(), m.to_dense(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("generalized eigensolve failed");
    }
    return solver.eigenvalues();
}

spectral_radius_result spectral_radius(const gramm_operator& gramm) {
    if (gramm.nx() > 200 || gramm.ny() > 200) {
        throw std::invalid_argument("spectral diagnostic is limited to 200 functions per direction");
    }
    const double eta = gramm.eta;
    const double lx = generalized_eigenvalues(gramm.kx, gramm.mx).maxCoeff();
    const double ly = generalized_eigenvalues(gramm.ky, gramm.my).maxCoeff();

    spectral_radius_result out;
    out.lambda_x_max = lx;
    out.lambda_y_max = ly;
    out.rho_formula = eta * eta * lx * ly / ((1.0 + eta * lx) * (1.0 + eta * ly));

    const Eigen::MatrixXd ax = gramm.mx.add_scaled(gramm.kx, eta).to_dense();
    const Eigen::MatrixXd ay = gramm.my.add_scaled(gramm.ky, eta).to_dense();
    const Eigen::MatrixXd gt = kron_dense(ax, ay);
    const Eigen::MatrixXd kt = eta * eta * kron_dense(gramm.kx.to_dense(), gramm.ky.to_dense());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(kt, gt, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("dense eigensolve of the split operator failed");
    }
    out.rho_numeric = solver.eigenvalues().cwiseAbs().maxCoeff();
    return out;
}

}  // namespace igrm
