#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ewjn/layered.hpp"
#include "ewjn/materials.hpp"

namespace ewjn {

using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::Vector3cd;
using Eigen::Vector3d;

struct SpinQubit {
    Vector3d position;  // m
    Vector3cd moment;   // J/T
    double omega;       // rad/s

    void validate() const;
};

// Hermitian, PSD rate matrix of spontaneous (diagonal) and cooperative
// (off-diagonal) decay rates, s^-1, evaluated at omega_plus.
struct DecayMatrix {
    Matrix2cd gamma;
    double omega_plus;
};

struct DephasingRates {
    std::vector<double> gamma_phi;  // s^-1 per qubit

    void validate() const;
};

// Scattered magnetic dyadic Green's tensor at (r_i, r_j, omega).
using GmProvider = std::function<Eigen::Matrix3cd(const Vector3d&, const Vector3d&, double)>;

GmProvider film_gm_provider(const FilmStack& stack, const QuadratureSpec& quad,
                            CrossMethod method = CrossMethod::direct2d);

// Gamma_ij = (2 mu_0/hbar) (omega_+/c)^2 m_i . Im G_m(r_i, r_j, omega_+) . m_j^dag.
// Throws numeric_error if the result is not PSD beyond 1e-10 * trace, which
// signals an inconsistent Green's-function provider.
DecayMatrix decay_matrix(const SpinQubit& q1, const SpinQubit& q2, const GmProvider& gm);

// One generalized Lindblad term: weight * (A rho B^dag - 1/2 {B^dag A, rho}).
struct LindbladTerm {
    Matrix4cd A;
    Matrix4cd B;
    cplx weight;
};

// Downward terms weighted (N+1) Gamma_ij and upward terms weighted N Gamma_ij,
// in the completely positive (Kossakowski) ordering. gamma may be 1x1 (single
// decaying qubit) or 2x2; sigma_minus supplies the matching jump operators.
std::vector<LindbladTerm> thermal_dissipator(const Eigen::MatrixXcd& gamma, double photon_n,
                                             const std::vector<Matrix4cd>& sigma_minus);

// (Gamma_phi/2) [sigma_z rho sigma_z - rho] per qubit; populations invariant.
std::vector<LindbladTerm> dephasing_dissipator(const DephasingRates& rates,
                                               const std::vector<Matrix4cd>& sigma_z);

}  // namespace ewjn
