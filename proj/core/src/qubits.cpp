#include "ewjn/qubits.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "ewjn/constants.hpp"
#include "ewjn/errors.hpp"

namespace ewjn {

void SpinQubit::validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("SpinQubit: omega must be > 0");
    if (!(moment.norm() > 0.0)) throw std::invalid_argument("SpinQubit: moment must be nonzero");
}

void DephasingRates::validate() const {
    for (double g : gamma_phi) {
        if (g < 0.0) throw std::invalid_argument("DephasingRates: rates must be >= 0");
    }
}

GmProvider film_gm_provider(const FilmStack& stack, const QuadratureSpec& quad, CrossMethod method) {
    stack.validate();
    quad.validate();
    return [stack, quad, method](const Vector3d& ri, const Vector3d& rj, double omega) {
        if ((ri - rj).norm() < 1e-15 * ri.z()) {
            return gm_self(ri.z(), omega, stack, quad).value;
        }
        return gm_cross(ri, rj, omega, stack, quad, method).value;
    };
}

DecayMatrix decay_matrix(const SpinQubit& q1, const SpinQubit& q2, const GmProvider& gm) {
    q1.validate();
    const bool q2_active = q2.moment.norm() > 0.0;
    if (!(q2.omega > 0.0)) throw std::invalid_argument("decay_matrix: q2.omega must be > 0");

    const double omega_plus = 0.5 * (q1.omega + q2.omega);
    if (std::abs(q1.omega - q2.omega) > 0.1 * (q1.omega + q2.omega)) {
        std::fprintf(stderr,
                     "decay_matrix: warning: |omega1 - omega2| exceeds 0.1 (omega1 + omega2); "
                     "the near-resonant master equation is marginal here\n");
    }

    const double pref = 2.0 * phys.mu_0 / phys.hbar * (omega_plus / phys.c) * (omega_plus / phys.c);
    auto bilinear = [&](const Vector3cd& mi, const Eigen::Matrix3d& img, const Vector3cd& mj) {
        return pref * (mi.transpose() * img.cast<cplx>() * mj.conjugate())(0, 0);
    };

    DecayMatrix out;
    out.omega_plus = omega_plus;
    const Eigen::Matrix3d g11 = gm(q1.position, q1.position, omega_plus).imag();
    out.gamma(0, 0) = bilinear(q1.moment, g11, q1.moment).real();
    if (q2_active) {
        const Eigen::Matrix3d g22 = gm(q2.position, q2.position, omega_plus).imag();
        const Eigen::Matrix3d g12 = gm(q1.position, q2.position, omega_plus).imag();
        out.gamma(1, 1) = bilinear(q2.moment, g22, q2.moment).real();
        out.gamma(0, 1) = bilinear(q1.moment, g12, q2.moment);
        out.gamma(1, 0) = std::conj(out.gamma(0, 1));
    } else {
        out.gamma(1, 1) = out.gamma(0, 1) = out.gamma(1, 0) = 0.0;
    }

    const Eigen::SelfAdjointEigenSolver<Matrix2cd> es(out.gamma);
    const double trace = out.gamma.real().trace();
    if (es.eigenvalues().minCoeff() < -1e-10 * trace) {
        throw numeric_error("decay_matrix: rate matrix is not PSD; Green's function provider is inconsistent",
                            es.eigenvalues().minCoeff());
    }
    return out;
}

std::vector<LindbladTerm> thermal_dissipator(const Eigen::MatrixXcd& gamma, double photon_n,
                                             const std::vector<Matrix4cd>& sigma_minus) {
    if (photon_n < 0.0) throw std::invalid_argument("thermal_dissipator: photon number must be >= 0");
    const auto n = static_cast<std::size_t>(gamma.rows());
    if (gamma.cols() != gamma.rows() || sigma_minus.size() != n) {
        throw std::invalid_argument("thermal_dissipator: gamma and jump-operator sizes disagree");
    }

    std::vector<LindbladTerm> terms;
    terms.reserve(2 * n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const cplx g = gamma(i, j);
            if (g == 0.0) continue;
            terms.push_back({sigma_minus[i], sigma_minus[j], (photon_n + 1.0) * g});
            if (photon_n > 0.0) {
                terms.push_back({sigma_minus[i].adjoint(), sigma_minus[j].adjoint(), photon_n * g});
            }
        }
    }
    return terms;
}

std::vector<LindbladTerm> dephasing_dissipator(const DephasingRates& rates,
                                               const std::vector<Matrix4cd>& sigma_z) {
    rates.validate();
    if (rates.gamma_phi.size() != sigma_z.size()) {
        throw std::invalid_argument("dephasing_dissipator: rate and operator counts disagree");
    }
    std::vector<LindbladTerm> terms;
    for (std::size_t i = 0; i < sigma_z.size(); ++i) {
        if (rates.gamma_phi[i] == 0.0) continue;
        terms.push_back({sigma_z[i], sigma_z[i], 0.5 * rates.gamma_phi[i]});
    }
    return terms;
}

}  // namespace ewjn
