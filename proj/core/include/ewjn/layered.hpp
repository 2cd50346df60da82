#pragma once

#include <complex>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "ewjn/materials.hpp"
#include "ewjn/quadrature.hpp"

namespace ewjn {

// Metal film of finite thickness, normal along +z, vacuum on the qubit side.
// The host dielectric is treated as vacuum; only the metal response enters.
struct FilmStack {
    double thickness;  // m
    std::variant<LocalMetal, LindhardMetal> material;
    int nonlocal_start_terms = 64;  // initial +-n range for the mode sums

    void validate() const;
    bool nonlocal() const { return std::holds_alternative<LindhardMetal>(material); }
};

// 3x3 scattered magnetic dyadic Green's tensor (units 1/m) at (r_i, r_j, omega).
struct GreensTensor {
    Eigen::Matrix3cd value;
    Eigen::Vector3d r_i;
    Eigen::Vector3d r_j;
    double omega;
};

// Thin-film Fresnel coefficients for s and p polarization; local permittivity.
// Branches chosen with Im(k_z) >= 0 and Im(k_zm) >= 0.
std::pair<cplx, cplx> fresnel_film(double q, double omega, cplx eps, double t);

// Specular thin-film coefficients with the Lindhard non-local response, as
// mode sums over even/odd transverse wavenumbers p_n. Sums start at
// +-n_terms and are doubled until both coefficients move by less than
// rel_tol; failure to converge throws convergence_error with the residual.
std::pair<cplx, cplx> nonlocal_film_coefficients(double q, double omega, const LindhardMetal& metal,
                                                 double t, int n_terms, double rel_tol = 1e-10);

// Reflection coefficients for whatever material the stack holds.
std::pair<cplx, cplx> film_reflection(double q, double omega, const FilmStack& stack);

// Coincident-point tensor at height d above the film. Diagonal with xx = yy.
GreensTensor gm_self(double d, double omega, const FilmStack& stack, const QuadratureSpec& quad);

enum class CrossMethod {
    direct2d,  // radial Gauss-Kronrod x angular trapezoid (default)
    bessel,    // analytic angular reduction to J0/J1 (fast path)
};

// Two-point tensor; reduces to gm_self when r_i == r_j.
GreensTensor gm_cross(const Eigen::Vector3d& r_i, const Eigen::Vector3d& r_j, double omega,
                      const FilmStack& stack, const QuadratureSpec& quad,
                      CrossMethod method = CrossMethod::direct2d);

}  // namespace ewjn
