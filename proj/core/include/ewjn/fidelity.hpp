#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "ewjn/systems.hpp"

namespace ewjn {

// Basis-permutation CNOT targets. Si DQD: the resonant block flips qubit 1
// conditioned on qubit 2 being |1> (|01> <-> |11>). NV: the nuclear target
// flips conditioned on the electron being in |-1> (|-1,up> <-> |-1,down>).
Matrix4cd ideal_cnot(SystemKind kind);

// Superoperator of rho -> U rho U^dag.
Matrix16cd unitary_channel(const Matrix4cd& u);

// Eq.-(5)-style fidelity: average overlap over the four computational basis
// inputs between the channel output and the ideal-CNOT output.
double cnot_fidelity(const Matrix16cd& channel, const Matrix4cd& u_target);

// Same quantity evaluated by block propagation of the four basis projectors;
// avoids forming per-step exponentials (optimizer hot path).
double cnot_fidelity(const Schedule& schedule, const Matrix4cd& u_target, double dt = 0.0);

// Haar-average gate fidelity via the Pauli-basis identity,
// F = (sum_i Tr[U U_i^dag U^dag E(U_i)] + D^2) / (D^2 (D + 1)), D = 4.
double average_fidelity(const Matrix16cd& channel, const Matrix4cd& u_target);

// sigma_j (x) sigma_k in lexicographic (j, k) order, sigma_0 = I.
const std::array<Matrix4cd, 16>& pauli_basis();

// Local-Z calibration: diag(1, e^{i b}, e^{i a}, e^{i(a+b)}) maximizing the
// average fidelity of corr * channel. Computed on the noiseless channel and
// then applied unchanged to noisy runs; basis-state fidelity is insensitive
// to it, so only averaged figures move.
Matrix4cd calibrate_local_phases(const Matrix16cd& noiseless_channel, const Matrix4cd& u_target);
Matrix16cd apply_output_unitary(const Matrix16cd& channel, const Matrix4cd& u);

struct FidelityReport {
    double F = 0.0;
    double F0 = 0.0;
    double delta_F = 0.0;
    std::optional<double> F_avg;
    std::optional<double> F0_avg;
    std::optional<double> delta_F_avg;
    std::map<std::string, double> meta;  // sweep coordinates
    std::string error;                   // nonempty if this grid point failed
};

// Full noisy channel for a system + sequence + rates; F0 callers pass an
// empty NoiseModel.
Matrix16cd make_channel(const SystemModel& model, const PulseSequence& seq, const NoiseModel& noise,
                        double dt = 0.0);

// Convenience: F, F0 and delta_F for one configuration, with optional
// averaged fidelities (calibrated local phases).
FidelityReport fidelity_report(const SystemModel& model, const PulseSequence& seq,
                               const NoiseModel& noise, bool with_average = false);

}  // namespace ewjn
