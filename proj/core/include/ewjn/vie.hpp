#pragma once

#include <memory>

#include <Eigen/Dense>

#include "ewjn/materials.hpp"
#include "ewjn/mesh.hpp"

namespace ewjn {

// SWG degrees of freedom: one per interior face, plus (half-SWG) one per
// boundary face so normal D can be nonzero at the metal surface.
struct SWGSpace {
    std::vector<int> dof_face;  // mesh face id per dof
    std::vector<int> face_dof;  // dof id per mesh face (-1 if none)
    int n_interior = 0;
    int n_total = 0;
};

SWGSpace build_swg_space(const TetMesh& mesh, bool half_swg = true);

struct VIEOptions {
    int dof_budget = 20000;     // capacity guard for the dense matrix
    double near_factor = 2.0;   // centroid distance (in diameters) for quadrature upgrades
    bool half_swg = true;
    int touching_outer_subdiv = 1;  // octasection levels for self/adjacent outer integrals
    int jobs = 0;               // 0: hardware_concurrency
};

// Dense Galerkin system for the D-field volume integral equation at one
// frequency. eps is the relative metal permittivity (Im eps >= 0, exp(-iwt)).
struct VIESystem {
    TetMesh mesh;
    SWGSpace swg;
    cplx eps;
    cplx kappa;  // (eps - 1)/eps
    double omega;
    VIEOptions options;
    Eigen::MatrixXcd matrix;

    // LU factorization cache (LAPACK getrf layout).
    std::shared_ptr<Eigen::MatrixXcd> lu;
    std::shared_ptr<std::vector<int>> pivots;

    int size() const { return swg.n_total; }
};

struct DipoleSource {
    Eigen::Vector3d position;
    Eigen::Vector3cd moment;  // A m^2
    double omega;
};

VIESystem assemble(const TetMesh& mesh, cplx eps, double omega, const VIEOptions& options = {});

// Solves for the SWG coefficients under a point-magnetic-dipole excitation.
Eigen::VectorXcd solve_dipole(VIESystem& system, const DipoleSource& source);

// Scattered magnetic field at obs for a given coefficient vector.
Eigen::Vector3cd scattered_h(const VIESystem& system, const Eigen::VectorXcd& coeffs,
                             const Eigen::Vector3d& obs);

// Scattered magnetic dyadic Green's tensor G_m(obs, source): three solves
// (x, y, z unit dipoles) sharing one factorization.
Eigen::Matrix3cd solve_gm(VIESystem& system, const Eigen::Vector3d& source_pos,
                          const Eigen::Vector3d& obs_pos);

// Reciprocal-space-free reference: condition estimate of the factored matrix.
double condition_estimate(const VIESystem& system);

}  // namespace ewjn
