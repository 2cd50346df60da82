#pragma once

#include <array>
#include <string>
#include <vector>

#include "ewjn/liouville.hpp"
#include "ewjn/qubits.hpp"

namespace ewjn {

enum class SystemKind { si_dqd, nv };

SystemKind parse_system_kind(const std::string& name);  // "si" | "nv"

// Exchange-coupled silicon double-quantum-dot pair in the doubly rotating
// frame. Frequencies named *_over_h are plain Hz; Omega is angular.
struct SiDqdParams {
    double theta;          // rad
    double J_over_h;       // Hz
    double Ebar_z_over_h;  // Hz
    double dEz_over_h;     // Hz
    double Omega;          // rad/s
    double pulse_length;   // s

    void validate() const;
    static SiDqdParams canonical();
};

// NV electron + 13C nuclear pair in the electron rotating frame; truncated
// electron subspace {|0>, |-1>}, basis ordered (e, n) with e slowest.
struct NvParams {
    double nu_c;     // rad/s
    double A_zz;     // rad/s
    double A_zx;     // rad/s
    double omega_1;  // rad/s

    void validate() const;
    static NvParams canonical();
};

struct Segment {
    enum class Kind { delay, pulse };
    Kind kind;
    double duration;         // s
    double phase = 0.0;      // rad, pulses only
    double amplitude = 0.0;  // rad/s, pulses only
};

struct PulseSequence {
    std::vector<Segment> segments;

    double total_duration() const;
    void validate() const;
};

// Frame Hamiltonian (joules). With Omega = 0 the frame absorbs everything.
Matrix4cd si_dqd_hamiltonian(double t, bool pulse_on, const SiDqdParams& p);

// sigma_1^{R,-}(t), sigma_2^{R,-}(t): entries have fixed moduli, phases rotate.
std::array<Matrix4cd, 2> si_dqd_jump_ops(double t, const SiDqdParams& p);

// Delay segments: dipolar frame Hamiltonian only; pulses add the MW drive at
// the segment phase (joules).
Matrix4cd nv_hamiltonian(const Segment& segment, const NvParams& p);

Matrix4cd nv_jump_op();                   // electron sigma^- (x) identity
Matrix4cd nv_sigma_z_electron();          // dephasing operator, electron only
std::array<Matrix4cd, 2> si_sigma_z();    // per-qubit sigma_z

// Appendix-style parameter vectors. NV: [t1..t4, tau1..tau3 (us), phi1..phi3
// (rad)], 4 delays interleaving 3 pulses. Si: [rotation angle Omega*t (rad),
// pulse length (us)], a single pulse.
std::vector<double> default_lower_bounds(SystemKind kind);
std::vector<double> default_upper_bounds(SystemKind kind);
std::vector<double> default_initial_point(SystemKind kind);

PulseSequence build_sequence(const std::vector<double>& x, SystemKind kind,
                             double nv_pulse_amplitude = NvParams::canonical().omega_1);
PulseSequence build_sequence(const std::vector<double>& x, SystemKind kind,
                             const std::vector<double>& lower, const std::vector<double>& upper,
                             double nv_pulse_amplitude = NvParams::canonical().omega_1);

// Rates entering the master equation; gamma may be 0x0 (closed system),
// 1x1 (NV electron) or 2x2 (Si pair).
struct NoiseModel {
    Eigen::MatrixXcd gamma;
    double photon_n = 0.0;
    DephasingRates dephasing;  // empty: no dephasing
};

struct SystemModel {
    SystemKind kind = SystemKind::si_dqd;
    SiDqdParams si = SiDqdParams::canonical();
    NvParams nv = NvParams::canonical();
};

// Assembles the Liouville-space schedule, including the default step policy
// dt = min(shortest segment / 200, 1 / (50 * fastest angular rate)).
Schedule build_schedule(const SystemModel& model, const PulseSequence& seq, const NoiseModel& noise);

}  // namespace ewjn
