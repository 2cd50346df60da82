#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "ewjn/constants.hpp"
#include "ewjn/expm.hpp"
#include "ewjn/liouville.hpp"
#include "ewjn/systems.hpp"

using namespace ewjn;

namespace {

Matrix4cd sigma1_minus() {
    Matrix4cd s = Matrix4cd::Zero();
    s(0, 2) = 1.0;
    s(1, 3) = 1.0;
    return s;
}

Schedule static_schedule(const Matrix16cd& L, double duration, bool time_dependent = false) {
    Schedule s;
    s.pieces.push_back({duration, time_dependent, [L](double) { return L; }});
    s.default_dt = duration / 200.0;
    return s;
}

std::vector<LindbladTerm> damping_terms(double gamma, double photon_n = 0.0) {
    Eigen::MatrixXcd g(1, 1);
    g(0, 0) = gamma;
    return thermal_dissipator(g, photon_n, {sigma1_minus()});
}

}  // namespace

TEST_CASE("vectorization follows vec(A X B) = (A kron B^T) vec(X)") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    auto rand4 = [&] {
        Matrix4cd m;
        for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = cplx(n(rng), n(rng));
        return m;
    };
    const Matrix4cd a = rand4(), x = rand4(), b = rand4();
    const Vector16cd lhs = vectorize(a * x * b);
    Matrix16cd kron;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) kron.block<4, 4>(4 * i, 4 * k) = a(i, k) * b.transpose();
    CHECK((lhs - kron * vectorize(x)).norm() < 1e-12 * lhs.norm());
}

TEST_CASE("liouvillian of nothing is zero") {
    const Matrix16cd L = liouvillian(Matrix4cd::Zero(), {});
    CHECK(L.norm() == 0.0);
}

TEST_CASE("unitary-only liouvillian has purely imaginary spectrum") {
    const Matrix4cd h = si_dqd_hamiltonian(0.0, true, SiDqdParams::canonical());
    const Matrix16cd L = liouvillian(h, {});
    const Eigen::ComplexEigenSolver<Matrix16cd> es(L);
    // Oracle: eigenvalues are -i (E_i - E_j)/hbar for H eigenvalues E.
    const Eigen::SelfAdjointEigenSolver<Matrix4cd> hs(h);
    double emax = 0.0;
    for (int k = 0; k < 16; ++k) {
        const cplx lambda = es.eigenvalues()(k);
        double best = 1e300;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const cplx expect =
                    cplx(0.0, -1.0) * (hs.eigenvalues()(i) - hs.eigenvalues()(j)) / phys.hbar;
                best = std::min(best, std::abs(lambda - expect));
            }
        emax = std::max(emax, best);
    }
    CHECK(emax < 1e-6 * L.norm());
}

TEST_CASE("non-Hermitian Hamiltonian is rejected") {
    Matrix4cd h = Matrix4cd::Zero();
    h(0, 1) = 1e-20;  // no conjugate partner
    CHECK_THROWS_AS(liouvillian(h, {}), std::invalid_argument);
}

TEST_CASE("single amplitude-damping term matches the hand-assembled embedding") {
    const double gamma = 2.0e5;
    const Matrix16cd L = liouvillian(Matrix4cd::Zero(), damping_terms(gamma));

    // 2-level Liouvillian assembled by hand, then tensored onto qubit 1.
    Eigen::Matrix2cd sm;
    sm << 0.0, 1.0, 0.0, 0.0;
    const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
    const Eigen::Matrix2cd pdag = sm.adjoint() * sm;
    Eigen::Matrix4cd l1q = Eigen::Matrix4cd::Zero();
    auto kron2 = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
        Eigen::Matrix4cd out;
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) out.block<2, 2>(2 * i, 2 * k) = a(i, k) * b;
        return out;
    };
    l1q = gamma * (kron2(sm, sm.conjugate()) - 0.5 * kron2(id2, pdag.transpose()) -
                   0.5 * kron2(pdag, id2));

    Matrix16cd embedded = Matrix16cd::Zero();
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 2; ++i2)
            for (int j1 = 0; j1 < 2; ++j1)
                for (int j2 = 0; j2 < 2; ++j2)
                    for (int k1 = 0; k1 < 2; ++k1)
                        for (int l1 = 0; l1 < 2; ++l1) {
                            const int row = 4 * (2 * i1 + i2) + (2 * j1 + j2);
                            const int col = 4 * (2 * k1 + i2) + (2 * l1 + j2);
                            embedded(row, col) += l1q(2 * i1 + j1, 2 * k1 + l1);
                        }
    CHECK((L - embedded).norm() < 1e-12 * embedded.norm());
}

TEST_CASE("zero generator propagates to the identity map") {
    const Schedule s = static_schedule(Matrix16cd::Zero(), 1.0);
    Matrix4cd rho = Matrix4cd::Zero();
    rho(1, 1) = 0.25;
    rho(0, 0) = 0.75;
    rho(0, 1) = rho(1, 0) = 0.2;
    const Vector16cd out = propagate(vectorize(rho), s);
    CHECK((out - vectorize(rho)).norm() < 1e-14);
}

TEST_CASE("amplitude damping closed form at Gamma t = 1") {
    const double gamma = 1.0e6;
    const double t = 1.0 / gamma;
    const Matrix16cd L = liouvillian(Matrix4cd::Zero(), damping_terms(gamma));
    // |psi> = (|00> + |10>)/sqrt(2): excited population 1/2 on qubit 1.
    Matrix4cd rho = Matrix4cd::Zero();
    rho(0, 0) = rho(2, 2) = 0.5;
    rho(0, 2) = rho(2, 0) = 0.5;
    const Matrix4cd out = devectorize(propagate(vectorize(rho), static_schedule(L, t)));
    CHECK(out(2, 2).real() == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-8));
    CHECK(std::abs(out(0, 2)) == doctest::Approx(0.5 * std::exp(-0.5)).epsilon(1e-8));
    CHECK(out(0, 0).real() == doctest::Approx(1.0 - 0.5 * std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("thermal dissipator relaxes to the Gibbs-like population ratio") {
    const double gamma = 1.0e6;
    const double N = 0.7;
    const Matrix16cd L = liouvillian(Matrix4cd::Zero(), damping_terms(gamma, N));
    Matrix4cd rho = Matrix4cd::Zero();
    rho(2, 2) = 1.0;  // qubit 1 excited
    const double t = 40.0 / (gamma * (2.0 * N + 1.0));
    const Matrix4cd out = devectorize(propagate(vectorize(rho), static_schedule(L, t)));
    const double p_up = out(2, 2).real();
    const double p_down = out(0, 0).real();
    CHECK(p_up / p_down == doctest::Approx(N / (N + 1.0)).epsilon(1e-8));
}

TEST_CASE("time-stepped propagation matches one dense exponential for static generators") {
    const double gamma = 3.0e5;
    const Matrix4cd h = si_dqd_hamiltonian(0.0, true, SiDqdParams::canonical());
    const Matrix16cd L = liouvillian(h, damping_terms(gamma, 0.3));
    const double t = 2.0e-6;

    Matrix4cd rho = Matrix4cd::Zero();
    rho(3, 3) = 0.5;
    rho(0, 0) = 0.5;
    rho(0, 3) = rho(3, 0) = 0.3;
    const Vector16cd stepped =
        propagate(vectorize(rho), static_schedule(L, t, /*time_dependent=*/true), t / 400.0);
    const Vector16cd dense = Matrix16cd((L * t).exp()) * vectorize(rho);
    CHECK((stepped - dense).norm() < 1e-10);
}

TEST_CASE("trace functional annihilates every assembled generator") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Matrix2cd raw;
    for (int i = 0; i < 4; ++i) raw(i / 2, i % 2) = cplx(n(rng), n(rng));
    const Eigen::MatrixXcd gamma = (raw.adjoint() * raw) * 1e5;  // PSD

    const auto jumps = si_dqd_jump_ops(1.3e-7, SiDqdParams::canonical());
    const auto terms = thermal_dissipator(gamma, 1.5, {jumps[0], jumps[1]});
    const Matrix16cd L =
        liouvillian(si_dqd_hamiltonian(1.3e-7, true, SiDqdParams::canonical()), terms);

    for (int trial = 0; trial < 8; ++trial) {
        Matrix4cd m;
        for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = cplx(n(rng), n(rng));
        const Matrix4cd rho = m + m.adjoint();
        const Matrix4cd lrho = devectorize(L * vectorize(rho));
        CHECK(std::abs(lrho.trace()) < 1e-12 * L.norm() * rho.norm());
    }
}

TEST_CASE("dephasing leaves populations invariant and damps coherences") {
    DephasingRates rates;
    rates.gamma_phi = {2.0e5, 0.0};
    const auto sz = si_sigma_z();
    const auto terms = dephasing_dissipator(rates, {sz[0], sz[1]});
    const Matrix16cd L = liouvillian(Matrix4cd::Zero(), terms);
    const double t = 3.0e-6;

    Matrix4cd rho = Matrix4cd::Zero();
    rho(0, 0) = 0.4;
    rho(2, 2) = 0.6;
    rho(0, 2) = rho(2, 0) = 0.35;
    const Matrix4cd out = devectorize(propagate(vectorize(rho), static_schedule(L, t)));
    CHECK(out(0, 0).real() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(out(2, 2).real() == doctest::Approx(0.6).epsilon(1e-12));
    // sigma_z rho sigma_z flips the (0,2) coherence sign: decay rate 2 * (gamma/2).
    CHECK(std::abs(out(0, 2)) ==
          doctest::Approx(0.35 * std::exp(-2.0e5 * t)).epsilon(1e-10));

    // Diagonal rho stays exactly put.
    Matrix4cd diag = Matrix4cd::Zero();
    diag(1, 1) = 1.0;
    const Matrix4cd out2 = devectorize(propagate(vectorize(diag), static_schedule(L, t)));
    CHECK((out2 - diag).norm() < 1e-12);

    // Gamma_phi = 0 produces no terms at all.
    DephasingRates zero;
    zero.gamma_phi = {0.0, 0.0};
    CHECK(dephasing_dissipator(zero, {sz[0], sz[1]}).empty());
}

TEST_CASE("channel action on operators is linear and consistent with propagate") {
    const double gamma = 4.0e5;
    const Matrix16cd L = liouvillian(Matrix4cd::Zero(), damping_terms(gamma, 0.2));
    const Schedule s = static_schedule(L, 1.0e-6);
    const Matrix16cd channel = channel_matrix(s);

    // X = identity: trace preserved at 4.
    const Matrix4cd eid = apply_channel_to_operator(channel, Matrix4cd::Identity());
    CHECK(eid.trace().real() == doctest::Approx(4.0).epsilon(1e-12));

    // X = density matrix: identical to propagate.
    Matrix4cd rho = Matrix4cd::Zero();
    rho(2, 2) = 1.0;
    const Matrix4cd via_channel = apply_channel_to_operator(channel, rho);
    const Matrix4cd via_prop = devectorize(propagate(vectorize(rho), s));
    CHECK((via_channel - via_prop).norm() < 1e-12);
}

TEST_CASE("sigma_x on qubit 1 decays at the dephasing rate under the channel") {
    DephasingRates rates;
    rates.gamma_phi = {1.5e5, 0.0};
    const auto sz = si_sigma_z();
    const Matrix16cd L = liouvillian(Matrix4cd::Zero(), dephasing_dissipator(rates, {sz[0], sz[1]}));
    const double t = 2.0e-6;
    const Matrix16cd channel = channel_matrix(static_schedule(L, t));

    Matrix4cd x1 = Matrix4cd::Zero();  // sigma_x (x) identity
    x1(0, 2) = x1(2, 0) = 1.0;
    x1(1, 3) = x1(3, 1) = 1.0;
    const Matrix4cd out = apply_channel_to_operator(channel, x1);
    CHECK((out - std::exp(-1.5e5 * t) * x1).norm() < 1e-10);
}

TEST_CASE("density matrix stays positive through a noisy schedule") {
    const Matrix4cd h = si_dqd_hamiltonian(0.0, true, SiDqdParams::canonical());
    const Matrix16cd L = liouvillian(h, damping_terms(2.0e4, 1.0));
    Matrix4cd rho = Matrix4cd::Zero();
    rho(1, 1) = 1.0;
    Vector16cd v = vectorize(rho);
    const Schedule s = static_schedule(L, 0.3e-6);
    for (int k = 0; k < 8; ++k) {
        v = propagate(v, s);
        const Eigen::SelfAdjointEigenSolver<Matrix4cd> es(devectorize(v));
        CHECK(es.eigenvalues().minCoeff() > -1e-9);
    }
}

TEST_CASE("expm16 agrees with Eigen's matrix exponential") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0.0, 1.0);
    for (double scale : {1e-3, 0.1, 1.0, 8.0}) {
        Matrix16cd a;
        for (int i = 0; i < 256; ++i) a(i / 16, i % 16) = scale * cplx(n(rng), n(rng)) / 16.0;
        const Matrix16cd mine = expm16(a);
        const Matrix16cd ref = a.exp();
        CHECK((mine - ref).norm() < 1e-12 * ref.norm());
    }
}
