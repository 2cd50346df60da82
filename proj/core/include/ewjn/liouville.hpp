#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ewjn/qubits.hpp"

namespace ewjn {

using Matrix16cd = Eigen::Matrix<cplx, 16, 16>;
using Vector16cd = Eigen::Matrix<cplx, 16, 1>;

// Row-major vectorization: v[4 i + j] = rho(i, j).
Vector16cd vectorize(const Matrix4cd& rho);
Matrix4cd devectorize(const Vector16cd& v);

// L = -(i/hbar)(H x I - I x H^T) + sum_k w_k [A x conj(B) - 1/2 {B^dag A} terms].
// H is in joules and must be Hermitian to 1e-12 (relative).
Matrix16cd liouvillian(const Matrix4cd& hamiltonian, const std::vector<LindbladTerm>& terms);

// Piecewise-defined generator; `generator` receives absolute time and returns
// the full Liouvillian. Pieces with time_dependent = false are propagated by
// a single matrix exponential.
struct SchedulePiece {
    double duration;
    bool time_dependent;
    std::function<Matrix16cd(double)> generator;
};

struct Schedule {
    std::vector<SchedulePiece> pieces;
    double default_dt = 0.0;  // 0: single-exponential static pieces only

    double total_duration() const;
};

// Sampled state during propagation, for trajectory dumps.
struct TrajectorySample {
    double t;
    Eigen::Vector4d populations;
    Eigen::Matrix<double, 6, 1> coherences;  // |rho_01 .. rho_23| row-major upper triangle
};
using TrajectoryCallback = std::function<void(const TrajectorySample&)>;

// Product of per-step midpoint exponentials; dt == 0 uses schedule.default_dt.
Matrix16cd channel_matrix(const Schedule& schedule, double dt = 0.0);

// Propagates a density matrix. Verifies trace preservation to 1e-10 and, if a
// callback is given, reports samples every `stride` steps.
Vector16cd propagate(const Vector16cd& rho0, const Schedule& schedule, double dt = 0.0,
                     const TrajectoryCallback& cb = nullptr, int stride = 1);

// Channel action on an arbitrary operator via vectorization.
Matrix4cd apply_channel_to_operator(const Matrix16cd& channel, const Matrix4cd& x);
Matrix4cd apply_channel_to_operator(const Schedule& schedule, const Matrix4cd& x, double dt = 0.0);

// Evolves several vectorized operators at once without forming the per-step
// exponentials; identical stepping policy to channel_matrix. This is thehot
// path of the pulse optimizer (4 basis states per objective evaluation).
using Block16 = Eigen::Matrix<cplx, 16, Eigen::Dynamic>;
Block16 propagate_block(const Block16& y0, const Schedule& schedule, double dt = 0.0);

// Convergence probe: |F(dt) - F(dt/2)| style comparison on the final state.
double dt_halving_difference(const Vector16cd& rho0, const Schedule& schedule, double dt);

}  // namespace ewjn
