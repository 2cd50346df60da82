#pragma once

#include <Eigen/Dense>

#include "ewjn/materials.hpp"

namespace ewjn {

// Scattered magnetic dyadic Green's tensor of a homogeneous sphere centered at
// the origin, from the vector-spherical-wave expansion with Mie reflection
// coefficients. Valid for source and observation outside the sphere and
// k0 * r << 1 (the quasistatic regime of all gate geometries here); radial
// functions are evaluated in scaled form so high multipole orders neither
// underflow nor overflow.
Eigen::Matrix3cd sphere_gm_analytic(double radius, cplx eps, double omega,
                                    const Eigen::Vector3d& source_pos,
                                    const Eigen::Vector3d& obs_pos, double term_tol = 1e-10);

namespace detail {

// Free-space magnetic dyadic Green's function by the same multipole machinery
// (regular waves at the inner radius); used to validate normalization against
// the closed form.
Eigen::Matrix3cd sphere_gm_free_series(double omega, const Eigen::Vector3d& r_small,
                                       const Eigen::Vector3d& r_large, int n_max);

// Closed-form free-space dyadic for the comparison.
Eigen::Matrix3cd gm_free_closed(double omega, const Eigen::Vector3d& r1,
                                const Eigen::Vector3d& r2);

}  // namespace detail

}  // namespace ewjn
