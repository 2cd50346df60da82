#include "ewjn/fidelity.hpp"

#include <cmath>

#include "ewjn/constants.hpp"

namespace ewjn {

Matrix4cd ideal_cnot(SystemKind kind) {
    Matrix4cd u = Matrix4cd::Zero();
    if (kind == SystemKind::si_dqd) {
        u(0, 0) = 1.0;
        u(2, 2) = 1.0;
        u(1, 3) = 1.0;
        u(3, 1) = 1.0;
    } else {
        u(0, 0) = 1.0;
        u(1, 1) = 1.0;
        u(2, 3) = 1.0;
        u(3, 2) = 1.0;
    }
    return u;
}

namespace {

Matrix16cd kron44(const Matrix4cd& a, const Matrix4cd& b) {
    Matrix16cd out;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            out.block<4, 4>(4 * i, 4 * k) = a(i, k) * b;
    return out;
}

}  // namespace

Matrix16cd unitary_channel(const Matrix4cd& u) { return kron44(u, u.conjugate()); }

double cnot_fidelity(const Matrix16cd& channel, const Matrix4cd& u_target) {
    double f = 0.0;
    for (int k = 0; k < 4; ++k) {
        Matrix4cd rho0 = Matrix4cd::Zero();
        rho0(k, k) = 1.0;
        const Matrix4cd out = apply_channel_to_operator(channel, rho0);
        const Eigen::Vector4cd psi = u_target.col(k);
        f += (psi.adjoint() * out * psi)(0, 0).real();
    }
    return f / 4.0;
}

double cnot_fidelity(const Schedule& schedule, const Matrix4cd& u_target, double dt) {
    Block16 y0 = Block16::Zero(16, 4);
    for (int k = 0; k < 4; ++k) y0(5 * k, k) = 1.0;
    const Block16 out = propagate_block(y0, schedule, dt);
    double f = 0.0;
    for (int k = 0; k < 4; ++k) {
        const Matrix4cd rho = devectorize(out.col(k));
        const Eigen::Vector4cd psi = u_target.col(k);
        f += (psi.adjoint() * rho * psi)(0, 0).real();
    }
    return f / 4.0;
}

const std::array<Matrix4cd, 16>& pauli_basis() {
    static const std::array<Matrix4cd, 16> basis = [] {
        std::array<Eigen::Matrix2cd, 4> s;
        s[0] = Eigen::Matrix2cd::Identity();
        s[1] << 0.0, 1.0, 1.0, 0.0;
        s[2] << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
        s[3] << 1.0, 0.0, 0.0, -1.0;
        std::array<Matrix4cd, 16> b;
        for (int j = 0; j < 4; ++j) {
            for (int k = 0; k < 4; ++k) {
                Matrix4cd m;
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c) m.block<2, 2>(2 * r, 2 * c) = s[j](r, c) * s[k];
                b[4 * j + k] = m;
            }
        }
        return b;
    }();
    return basis;
}

double average_fidelity(const Matrix16cd& channel, const Matrix4cd& u_target) {
    const double d = 4.0;
    cplx acc = 0.0;
    for (const auto& ui : pauli_basis()) {
        const Matrix4cd lhs = u_target * ui.adjoint() * u_target.adjoint();
        const Matrix4cd eui = apply_channel_to_operator(channel, ui);
        acc += (lhs * eui).trace();
    }
    return (acc.real() + d * d) / (d * d * (d + 1.0));
}

Matrix16cd apply_output_unitary(const Matrix16cd& channel, const Matrix4cd& u) {
    return unitary_channel(u) * channel;
}

namespace {

Matrix4cd local_phase_matrix(double a, double b) {
    Matrix4cd c = Matrix4cd::Zero();
    c(0, 0) = 1.0;
    c(1, 1) = std::exp(cplx(0.0, b));
    c(2, 2) = std::exp(cplx(0.0, a));
    c(3, 3) = std::exp(cplx(0.0, a + b));
    return c;
}

}  // namespace

Matrix4cd calibrate_local_phases(const Matrix16cd& noiseless_channel, const Matrix4cd& u_target) {
    auto score = [&](double a, double b) {
        return average_fidelity(apply_output_unitary(noiseless_channel, local_phase_matrix(a, b)),
                                u_target);
    };

    double best_a = 0.0, best_b = 0.0, best = score(0.0, 0.0);
    const int n = 24;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double a = -pi + two_pi * i / n;
            const double b = -pi + two_pi * j / n;
            const double f = score(a, b);
            if (f > best) {
                best = f;
                best_a = a;
                best_b = b;
            }
        }
    }
    // Coordinate parabolic refinement; the objective is a low-order
    // trigonometric polynomial of (a, b), so this converges fast.
    double step = two_pi / n;
    for (int round = 0; round < 40 && step > 1e-12; ++round) {
        bool moved = false;
        for (int axis = 0; axis < 2; ++axis) {
            double& x = (axis == 0) ? best_a : best_b;
            const double f0 = score(best_a, best_b);
            const double x0 = x;
            x = x0 + step;
            const double fp = score(best_a, best_b);
            x = x0 - step;
            const double fm = score(best_a, best_b);
            const double denom = fp - 2.0 * f0 + fm;
            double xn = x0;
            if (std::abs(denom) > 1e-18) xn = x0 - 0.5 * step * (fp - fm) / denom;
            x = xn;
            if (score(best_a, best_b) < f0) {
                x = (fp > fm) ? x0 + step : (fm > f0 ? x0 - step : x0);
            }
            if (x != x0) moved = true;
        }
        if (!moved) step *= 0.5;
        step *= 0.7;
    }
    return local_phase_matrix(best_a, best_b);
}

Matrix16cd make_channel(const SystemModel& model, const PulseSequence& seq, const NoiseModel& noise,
                        double dt) {
    return channel_matrix(build_schedule(model, seq, noise), dt);
}

FidelityReport fidelity_report(const SystemModel& model, const PulseSequence& seq,
                               const NoiseModel& noise, bool with_average) {
    const Matrix4cd target = ideal_cnot(model.kind);
    const Matrix16cd noisy = make_channel(model, seq, noise);
    const Matrix16cd noiseless = make_channel(model, seq, NoiseModel{});

    FidelityReport rep;
    rep.F = cnot_fidelity(noisy, target);
    rep.F0 = cnot_fidelity(noiseless, target);
    rep.delta_F = rep.F0 - rep.F;
    if (with_average) {
        const Matrix4cd corr = calibrate_local_phases(noiseless, target);
        rep.F0_avg = average_fidelity(apply_output_unitary(noiseless, corr), target);
        rep.F_avg = average_fidelity(apply_output_unitary(noisy, corr), target);
        rep.delta_F_avg = *rep.F0_avg - *rep.F_avg;
    }
    return rep;
}

}  // namespace ewjn
