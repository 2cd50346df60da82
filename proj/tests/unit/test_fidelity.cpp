#include <doctest.h>

#include <cmath>

#include "ewjn/constants.hpp"
#include "ewjn/fidelity.hpp"
#include "haar.hpp"

using namespace ewjn;

namespace {

Matrix16cd depolarizing_channel() {
    // E(X) = Tr(X) I / 4.
    Matrix16cd m = Matrix16cd::Zero();
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) m(5 * i, 5 * k) = 0.25;
    return m;
}

Matrix16cd dephased_cnot_channel(SystemKind kind, double strength) {
    // Full dephasing of qubit-1 coherences by `strength`, then an exact CNOT.
    Matrix16cd deph = Matrix16cd::Identity();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const bool cross = (i / 2) != (j / 2);  // qubit-1 coherence block
            if (cross) deph(4 * i + j, 4 * i + j) = 1.0 - strength;
        }
    return unitary_channel(ideal_cnot(kind)) * deph;
}

}  // namespace

TEST_CASE("noiseless exact CNOT scores unit fidelity in both metrics") {
    for (SystemKind kind : {SystemKind::si_dqd, SystemKind::nv}) {
        const Matrix4cd u = ideal_cnot(kind);
        const Matrix16cd ch = unitary_channel(u);
        CHECK(cnot_fidelity(ch, u) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(average_fidelity(ch, u) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("identity channel scores one half on the basis-state metric") {
    const Matrix16cd id = Matrix16cd::Identity();
    CHECK(cnot_fidelity(id, ideal_cnot(SystemKind::si_dqd)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(cnot_fidelity(id, ideal_cnot(SystemKind::nv)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("depolarizing channel average fidelity is exactly 1/4") {
    const double f = average_fidelity(depolarizing_channel(), ideal_cnot(SystemKind::si_dqd));
    CHECK(std::abs(f - 0.25) < 1e-12);
}

TEST_CASE("pauli basis is ortha normalized tensor-product family") {
    const auto& basis = pauli_basis();
    for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
            const cplx tr = (basis[i].adjoint() * basis[j]).trace();
            if (i == j) {
                CHECK(tr.real() == doctest::Approx(4.0));
            } else {
                CHECK(std::abs(tr) < 1e-14);
            }
        }
    }
}

TEST_CASE("average-fidelity formula matches Haar Monte Carlo") {
    const Matrix4cd u = ideal_cnot(SystemKind::nv);
    const long samples = 20000;

    const Matrix16cd perfect = unitary_channel(u);
    auto est = oracle::haar_average_fidelity(perfect, u, samples, 17);
    CHECK(std::abs(average_fidelity(perfect, u) - est.mean) < 4.0 * std::max(est.sigma, 1e-12));

    const Matrix16cd noisy = dephased_cnot_channel(SystemKind::nv, 0.3);
    est = oracle::haar_average_fidelity(noisy, u, samples, 18);
    CHECK(std::abs(average_fidelity(noisy, u) - est.mean) < 4.0 * est.sigma);

    const Matrix16cd depol = depolarizing_channel();
    est = oracle::haar_average_fidelity(depol, u, samples, 19);
    CHECK(std::abs(0.25 - est.mean) < 4.0 * std::max(est.sigma, 1e-12));
}

TEST_CASE("local-phase calibration recovers a phase-corrupted CNOT") {
    const Matrix4cd u = ideal_cnot(SystemKind::si_dqd);
    Matrix4cd corrupt = Matrix4cd::Zero();
    corrupt.diagonal() << 1.0, std::exp(cplx(0.0, 0.4)), std::exp(cplx(0.0, -0.9)),
        std::exp(cplx(0.0, -0.5));
    const Matrix16cd ch = unitary_channel(Matrix4cd(corrupt * u));
    const double before = average_fidelity(ch, u);
    const Matrix4cd corr = calibrate_local_phases(ch, u);
    const double after = average_fidelity(apply_output_unitary(ch, corr), u);
    CHECK(after > before);
    CHECK(after == doctest::Approx(1.0).epsilon(1e-9));
    // Basis-state fidelity never moves under the calibration.
    CHECK(cnot_fidelity(apply_output_unitary(ch, corr), u) ==
          doctest::Approx(cnot_fidelity(ch, u)).epsilon(1e-14));
}

TEST_CASE("block-propagated basis fidelity matches the channel path") {
    SystemModel si;
    si.kind = SystemKind::si_dqd;
    PulseSequence seq;
    seq.segments.push_back({Segment::Kind::pulse, 1.2195e-6, 0.0, two_pi * 0.41e6});
    NoiseModel nm;
    nm.gamma = Eigen::MatrixXcd(2, 2);
    nm.gamma << 86.0, 80.0, 80.0, 86.0;
    nm.photon_n = 1.1;
    const Schedule sched = build_schedule(si, seq, nm);
    const Matrix4cd u = ideal_cnot(SystemKind::si_dqd);
    const double via_channel = cnot_fidelity(channel_matrix(sched), u);
    const double via_block = cnot_fidelity(sched, u);
    CHECK(via_block == doctest::Approx(via_channel).epsilon(1e-11));
}
