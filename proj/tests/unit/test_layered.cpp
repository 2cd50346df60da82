#include <doctest.h>

#include <cmath>
#include <random>

#include "ewjn/constants.hpp"
#include "ewjn/errors.hpp"
#include "ewjn/layered.hpp"
#include "oracle_quadrature.hpp"

using namespace ewjn;
using Eigen::Matrix3cd;
using Eigen::Vector3d;

namespace {

const double omega_si = two_pi * 39.33e9;
const LindhardMetal aluminum{1.75e16, 3.65e13, 2.02e6};

FilmStack aluminum_film_local() {
    FilmStack s;
    s.thickness = 100e-9;
    s.material = LocalMetal::from_conductivity(1.0, 6.8e7);
    return s;
}

FilmStack aluminum_film_nonlocal() {
    FilmStack s;
    s.thickness = 100e-9;
    s.material = aluminum;
    return s;
}

double rel_diff(const cplx& a, const cplx& b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("fresnel_film vanishes without contrast") {
    auto [rs, rp] = fresnel_film(1e6, omega_si, cplx(1.0, 0.0), 100e-9);
    CHECK(rs == cplx(0.0, 0.0));
    CHECK(rp == cplx(0.0, 0.0));
}

TEST_CASE("fresnel_film reduces to half-space normal-incidence coefficients") {
    const cplx eps(1.0, 31078236.556001002);
    auto [rs, rp] = fresnel_film(0.0, omega_si, eps, 1.0);  // 1 m thick: cot -> -i
    const cplx se = std::sqrt(eps);
    const cplx rs_ref = (1.0 - se) / (1.0 + se);
    const cplx rp_ref = (se - 1.0) / (se + 1.0);
    CHECK(rel_diff(rs, rs_ref) < 1e-12);
    CHECK(rel_diff(rp, rp_ref) < 1e-12);
}

TEST_CASE("fresnel_film matches the extended-precision reference") {
    // sigma = 6.8e7 S/m, eps_r = 1, t = 100 nm, omega = 2 pi x 39.33 GHz, q = 1e7.
    const cplx eps(1.0, 31078236.556001002);
    auto [rs, rp] = fresnel_film(1e7, omega_si, eps, 100e-9);
    CHECK(rel_diff(rs, cplx(-0.0032911024514107333, 0.045393276624782501)) < 1e-10);
    CHECK(rel_diff(rp, cplx(1.0000000040009774, 8.4547344195036039e-8)) < 1e-10);
}

TEST_CASE("nonlocal coefficients agree with local Drude when v_F is scaled down") {
    LindhardMetal slow = aluminum;
    slow.v_F = aluminum.v_F * 1e-3;
    const cplx drude = drude_permittivity(slow, omega_si);
    for (double q : {1e7, 5e7, 2e8}) {
        auto [rs_n, rp_n] = nonlocal_film_coefficients(q, omega_si, slow, 100e-9, 64);
        auto [rs_l, rp_l] = fresnel_film(q, omega_si, drude, 100e-9);
        CHECK(rel_diff(rs_n, rs_l) < 1e-3);
        CHECK(rel_diff(rp_n, rp_l) < 1e-3);
    }
}

TEST_CASE("nonlocal coefficients are converged in the mode count") {
    auto [rs1, rp1] = nonlocal_film_coefficients(2e7, omega_si, aluminum, 100e-9, 64);
    auto [rs2, rp2] = nonlocal_film_coefficients(2e7, omega_si, aluminum, 100e-9, 128);
    CHECK(rel_diff(rp1, rp2) < 1e-6);
    CHECK(rel_diff(rs1, rs2) < 1e-6);
}

TEST_CASE("nonlocal coefficient domain errors") {
    CHECK_THROWS_AS(nonlocal_film_coefficients(0.0, omega_si, aluminum, 100e-9, 64),
                    std::domain_error);
    CHECK_THROWS_AS(nonlocal_film_coefficients(1e7, omega_si, aluminum, 100e-9, 0),
                    std::domain_error);
}

TEST_CASE("gm_self is diagonal with xx = yy and zero without contrast") {
    QuadratureSpec quad;
    FilmStack vacuum;
    vacuum.thickness = 100e-9;
    vacuum.material = LocalMetal::from_conductivity(1.0, 0.0);
    const auto g0 = gm_self(50e-9, omega_si, vacuum, quad);
    CHECK(g0.value.norm() == 0.0);

    const auto g = gm_self(50e-9, omega_si, aluminum_film_local(), quad);
    CHECK(g.value(0, 0) == g.value(1, 1));
    CHECK(std::abs(g.value(0, 1)) == 0.0);
    CHECK(std::abs(g.value(0, 2)) == 0.0);
}

TEST_CASE("gm_self matches the extended-precision reference values") {
    QuadratureSpec quad;
    quad.rel_tol = 1e-10;
    quad.q_max_factor = 60.0;
    const auto g50 = gm_self(50e-9, omega_si, aluminum_film_local(), quad);
    CHECK(rel_diff(g50.value(0, 0), cplx(-222867472409.4494, 1986157069149.496)) < 1e-8);
    CHECK(rel_diff(g50.value(2, 2), cplx(-445735833857.5087, 3972314249485.895)) < 1e-8);
    const auto g10 = gm_self(10e-9, omega_si, aluminum_film_local(), quad);
    CHECK(rel_diff(g10.value(0, 0), cplx(-418435280890.0163, 13956862530745.3)) < 1e-8);
    CHECK(rel_diff(g10.value(2, 2), cplx(-836874643502.2412, 27913725216791.11)) < 1e-8);
}

TEST_CASE("gm_self agrees with the tanh-sinh oracle") {
    QuadratureSpec quad;
    const FilmStack film = aluminum_film_local();
    const auto g = gm_self(30e-9, omega_si, film, quad);
    const Matrix3cd ref = oracle::gm_self_reference(30e-9, omega_si, film);
    CHECK((g.value - ref).norm() / ref.norm() < 1e-7);
}

TEST_CASE("gm_self magnitude decreases with distance (aluminum, Fig-2 range)") {
    QuadratureSpec quad;
    const FilmStack film = aluminum_film_local();
    double prev = 1e300;
    for (double d = 10e-9; d <= 90e-9; d += 20e-9) {
        const double mag = gm_self(d, omega_si, film, quad).value.norm();
        CHECK(mag < prev);
        prev = mag;
    }
}

TEST_CASE("Im gm_self is positive semidefinite on dipole vectors") {
    QuadratureSpec quad;
    const auto g = gm_self(25e-9, omega_si, aluminum_film_nonlocal(), quad);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 32; ++i) {
        Eigen::Vector3cd m;
        for (int k = 0; k < 3; ++k) m(k) = cplx(u(rng), u(rng));
        const double q = (m.adjoint() * g.value.imag().cast<cplx>() * m)(0, 0).real();
        CHECK(q >= -1e-12 * g.value.imag().norm() * m.squaredNorm());
    }
}

TEST_CASE("gm_cross reduces to gm_self at coincidence") {
    QuadratureSpec quad;
    const FilmStack film = aluminum_film_local();
    const Vector3d r(0.0, 0.0, 50e-9);
    const auto self = gm_self(50e-9, omega_si, film, quad);
    const auto cross = gm_cross(r, r, omega_si, film, quad);
    CHECK((cross.value - self.value).norm() / self.value.norm() < 1e-10);

    // Small but nonzero separation goes through the full 2D path and stays
    // continuous with the coincidence limit.
    const Vector3d r2(1e-9, 0.0, 50e-9);
    const auto near = gm_cross(r2, r, omega_si, film, quad, CrossMethod::bessel);
    CHECK((near.value - self.value).norm() / self.value.norm() < 0.02);
}

TEST_CASE("gm_cross direct2d and bessel paths agree") {
    QuadratureSpec quad;
    quad.rel_tol = 1e-8;
    const FilmStack film = aluminum_film_local();
    const Vector3d ri(0.0, 25e-9, 50e-9);
    const Vector3d rj(0.0, -25e-9, 50e-9);
    const auto a = gm_cross(ri, rj, omega_si, film, quad, CrossMethod::direct2d);
    const auto b = gm_cross(ri, rj, omega_si, film, quad, CrossMethod::bessel);
    CHECK((a.value - b.value).norm() / b.value.norm() < 1e-6);

    const Vector3d rk(30e-9, -20e-9, 40e-9);
    const auto c = gm_cross(ri, rk, omega_si, film, quad, CrossMethod::direct2d);
    const auto d = gm_cross(ri, rk, omega_si, film, quad, CrossMethod::bessel);
    CHECK((c.value - d.value).norm() / d.value.norm() < 1e-6);
}

TEST_CASE("gm_cross agrees with the tanh-sinh + Gauss-Legendre oracle") {
    QuadratureSpec quad;
    const FilmStack film = aluminum_film_local();
    const Vector3d ri(0.0, 25e-9, 50e-9);
    const Vector3d rj(0.0, -25e-9, 50e-9);
    const auto g = gm_cross(ri, rj, omega_si, film, quad);
    const Matrix3cd ref = oracle::gm_cross_reference(ri, rj, omega_si, film);
    CHECK((g.value - ref).norm() / ref.norm() < 1e-6);
}

TEST_CASE("gm_cross satisfies reciprocity on random geometries") {
    QuadratureSpec quad;
    const FilmStack film = aluminum_film_local();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(10e-9, 80e-9);
    for (int i = 0; i < 5; ++i) {
        const Vector3d ri(u(rng), u(rng), u(rng));
        const Vector3d rj(u(rng), u(rng), u(rng));
        const auto gij = gm_cross(ri, rj, omega_si, film, quad);
        const auto gji = gm_cross(rj, ri, omega_si, film, quad);
        CHECK((gij.value - gji.value.transpose()).norm() / gij.value.norm() < 1e-8);
    }
}

TEST_CASE("cooperative-to-self ratio grows with distance at 50 nm separation") {
    QuadratureSpec quad;
    const FilmStack film = aluminum_film_local();
    double prev_ratio = 0.0;
    for (double d : {10e-9, 50e-9, 90e-9}) {
        const Vector3d ri(0.0, 25e-9, d);
        const Vector3d rj(0.0, -25e-9, d);
        const double self_xx = gm_self(d, omega_si, film, quad).value(0, 0).imag();
        const double cross_xx = gm_cross(ri, rj, omega_si, film, quad).value(0, 0).imag();
        const double ratio = cross_xx / self_xx;
        CHECK(ratio > prev_ratio);
        prev_ratio = ratio;
    }
}
