#include "ewjn/systems.hpp"

#include <cmath>

#include "ewjn/constants.hpp"
#include "ewjn/errors.hpp"

namespace ewjn {

SystemKind parse_system_kind(const std::string& name) {
    if (name == "si" || name == "si_dqd") return SystemKind::si_dqd;
    if (name == "nv") return SystemKind::nv;
    throw std::invalid_argument("unknown system kind: " + name);
}

void SiDqdParams::validate() const {
    if (!(J_over_h > 0.0) || !(Ebar_z_over_h > 0.0) || !(dEz_over_h > 0.0)) {
        throw std::invalid_argument("SiDqdParams: frequencies must be > 0");
    }
    if (!(theta >= 0.0 && theta < 0.5 * pi)) {
        throw std::invalid_argument("SiDqdParams: theta must lie in [0, pi/2)");
    }
    if (Omega < 0.0 || !(pulse_length > 0.0)) {
        throw std::invalid_argument("SiDqdParams: Omega must be >= 0, pulse_length > 0");
    }
}

SiDqdParams SiDqdParams::canonical() {
    SiDqdParams p;
    p.theta = 0.097;
    p.J_over_h = 1.59e6;
    p.Ebar_z_over_h = 39.33e9;
    p.dEz_over_h = 13.35e6;
    p.Omega = two_pi * 0.41e6;
    p.pulse_length = 1.2195e-6;
    return p;
}

void NvParams::validate() const {
    if (!(omega_1 > 0.0)) throw std::invalid_argument("NvParams: omega_1 must be > 0");
}

NvParams NvParams::canonical() {
    NvParams p;
    p.nu_c = two_pi * 0.158e6;
    p.A_zz = -two_pi * 0.152e6;
    p.A_zx = two_pi * 0.110e6;
    p.omega_1 = two_pi * 0.5e6;
    return p;
}

double PulseSequence::total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
}

void PulseSequence::validate() const {
    for (const auto& s : segments) {
        if (!(s.duration > 0.0)) throw std::invalid_argument("PulseSequence: durations must be > 0");
        if (s.kind == Segment::Kind::pulse && s.amplitude < 0.0) {
            throw std::invalid_argument("PulseSequence: pulse amplitude must be >= 0");
        }
    }
}

Matrix4cd si_dqd_hamiltonian(double t, bool pulse_on, const SiDqdParams& p) {
    p.validate();
    Matrix4cd h = Matrix4cd::Zero();
    if (!pulse_on || p.Omega == 0.0) return h;
    const double lambda = (1.0 - std::tan(0.5 * p.theta)) / (1.0 + std::tan(0.5 * p.theta));
    const double j_rad = two_pi * p.J_over_h;
    const cplx on_res = 0.5 * phys.hbar * p.Omega;
    const cplx off_res = 0.5 * phys.hbar * lambda * p.Omega * std::exp(cplx(0.0, j_rad * t));
    h(1, 3) = on_res;
    h(3, 1) = std::conj(on_res);
    h(0, 2) = off_res;
    h(2, 0) = std::conj(off_res);
    return h;
}

std::array<Matrix4cd, 2> si_dqd_jump_ops(double t, const SiDqdParams& p) {
    const double j = two_pi * p.J_over_h;
    const double dez = two_pi * p.dEz_over_h;
    const double ebar = two_pi * p.Ebar_z_over_h;
    const cplx ph0 = std::exp(cplx(0.0, -ebar * t));
    const cplx a = std::exp(cplx(0.0, 0.5 * (dez - j) * t));
    const cplx b = std::exp(cplx(0.0, -0.5 * (dez + j) * t));
    const double c = std::cos(0.5 * p.theta);
    const double s = std::sin(0.5 * p.theta);

    Matrix4cd s1 = Matrix4cd::Zero();
    s1(1, 0) = a * s;
    s1(2, 0) = b * c;
    s1(3, 1) = std::conj(a) * c;
    s1(3, 2) = -std::conj(b) * s;
    s1 *= ph0;

    Matrix4cd s2 = Matrix4cd::Zero();
    s2(1, 0) = a * c;
    s2(2, 0) = -b * s;
    s2(3, 1) = std::conj(a) * s;
    s2(3, 2) = std::conj(b) * c;
    s2 *= ph0;
    return {s1, s2};
}

Matrix4cd nv_hamiltonian(const Segment& segment, const NvParams& p) {
    p.validate();
    Matrix4cd h = Matrix4cd::Zero();
    // |0><0| (x) (-nu_c I_z)
    h(0, 0) = -0.5 * p.nu_c;
    h(1, 1) = 0.5 * p.nu_c;
    // |-1><-1| (x) (-(nu_c + A_zz) I_z - A_zx I_x)
    h(2, 2) = -0.5 * (p.nu_c + p.A_zz);
    h(3, 3) = 0.5 * (p.nu_c + p.A_zz);
    h(2, 3) = -0.5 * p.A_zx;
    h(3, 2) = -0.5 * p.A_zx;
    if (segment.kind == Segment::Kind::pulse) {
        const cplx drive = 0.5 * segment.amplitude * std::exp(cplx(0.0, -segment.phase));
        h(0, 2) += drive;
        h(1, 3) += drive;
        h(2, 0) += std::conj(drive);
        h(3, 1) += std::conj(drive);
    }
    return phys.hbar * h;
}

Matrix4cd nv_jump_op() {
    Matrix4cd s = Matrix4cd::Zero();
    s(0, 2) = 1.0;
    s(1, 3) = 1.0;
    return s;
}

Matrix4cd nv_sigma_z_electron() {
    Matrix4cd z = Matrix4cd::Zero();
    z.diagonal() << 1.0, 1.0, -1.0, -1.0;
    return z;
}

std::array<Matrix4cd, 2> si_sigma_z() {
    Matrix4cd z1 = Matrix4cd::Zero();
    z1.diagonal() << 1.0, 1.0, -1.0, -1.0;
    Matrix4cd z2 = Matrix4cd::Zero();
    z2.diagonal() << 1.0, -1.0, 1.0, -1.0;
    return {z1, z2};
}

std::vector<double> default_lower_bounds(SystemKind kind) {
    if (kind == SystemKind::nv) {
        return {0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, -pi, -pi, -pi};
    }
    return {0.1 * pi, 0.0};
}

std::vector<double> default_upper_bounds(SystemKind kind) {
    if (kind == SystemKind::nv) {
        return {5.0, 5.0, 5.0, 5.0, 4.0, 4.0, 4.0, pi, pi, pi};
    }
    return {pi, 10.0};
}

std::vector<double> default_initial_point(SystemKind kind) {
    if (kind == SystemKind::nv) {
        return {3.78, 2.11, 2.15, 0.63, 1.88, 3.96, 1.90, 0.0, pi / 5.0, pi / 2.0};
    }
    return {0.8 * pi, 1.25};
}

namespace {

const char* nv_component_name(std::size_t i) {
    static const char* names[] = {"t_1", "t_2", "t_3", "t_4", "tau_1",
                                  "tau_2", "tau_3", "phi_1", "phi_2", "phi_3"};
    return names[i];
}

}  // namespace

PulseSequence build_sequence(const std::vector<double>& x, SystemKind kind,
                             double nv_pulse_amplitude) {
    return build_sequence(x, kind, default_lower_bounds(kind), default_upper_bounds(kind),
                          nv_pulse_amplitude);
}

PulseSequence build_sequence(const std::vector<double>& x, SystemKind kind,
                             const std::vector<double>& lower, const std::vector<double>& upper,
                             double nv_pulse_amplitude) {
    const std::size_t expect = (kind == SystemKind::nv) ? 10 : 2;
    if (x.size() != expect || lower.size() != expect || upper.size() != expect) {
        throw std::invalid_argument("build_sequence: parameter vector has wrong length");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lower[i] || x[i] > upper[i]) {
            const std::string name =
                (kind == SystemKind::nv) ? nv_component_name(i) : (i == 0 ? "rotation_angle" : "pulse_length");
            throw std::invalid_argument("build_sequence: component " + name + " = " +
                                        std::to_string(x[i]) + " is outside its bounds");
        }
    }

    PulseSequence seq;
    if (kind == SystemKind::nv) {
        const double us = 1e-6;
        for (int k = 0; k < 3; ++k) {
            seq.segments.push_back({Segment::Kind::delay, x[k] * us, 0.0, 0.0});
            seq.segments.push_back({Segment::Kind::pulse, x[4 + k] * us, x[7 + k], nv_pulse_amplitude});
        }
        seq.segments.push_back({Segment::Kind::delay, x[3] * us, 0.0, 0.0});
    } else {
        // x = [rotation angle (rad), pulse length (us)]
        const double length = x[1] * 1e-6;
        if (!(length > 0.0)) {
            throw std::invalid_argument("build_sequence: component pulse_length must be > 0");
        }
        seq.segments.push_back({Segment::Kind::pulse, length, 0.0, x[0] / length});
    }
    seq.validate();
    return seq;
}

namespace {

// Sparse accumulation of the Si Liouvillian; equivalent to
// liouvillian(si_dqd_hamiltonian(t), thermal + dephasing terms) but ~20x
// cheaper per step, which dominates the optimizer runtime.
struct SiGeneratorContext {
    SiDqdParams params;
    bool pulse = false;
    bool has_thermal = false;
    Eigen::Matrix2cd gamma;
    double photon_n = 0.0;
    Matrix16cd static_dephasing = Matrix16cd::Zero();
};

void add_unitary_entry(Matrix16cd& L, int r, int c, cplx h_over_hbar) {
    const cplx w = cplx(0.0, -1.0) * h_over_hbar;
    for (int j = 0; j < 4; ++j) L(4 * r + j, 4 * c + j) += w;
    for (int i = 0; i < 4; ++i) L(4 * i + c, 4 * i + r) -= w;
}

// weight * (A rho B^dag - 1/2 {B^dag A, rho}) for sparse A, B given as entry
// lists {row, col, value}.
struct SparseEntry {
    int r, c;
    cplx v;
};

void add_dissipator(Matrix16cd& L, const SparseEntry* a, const SparseEntry* b, cplx weight) {
    for (int ia = 0; ia < 4; ++ia) {
        const SparseEntry& ea = a[ia];
        for (int ib = 0; ib < 4; ++ib) {
            const SparseEntry& eb = b[ib];
            L(4 * ea.r + eb.r, 4 * ea.c + eb.c) += weight * ea.v * std::conj(eb.v);
        }
    }
    // M = B^dag A: accumulate sparse product.
    cplx m[4][4] = {};
    for (int ib = 0; ib < 4; ++ib) {
        const SparseEntry& eb = b[ib];
        for (int ia = 0; ia < 4; ++ia) {
            const SparseEntry& ea = a[ia];
            if (eb.r == ea.r) m[eb.c][ea.c] += std::conj(eb.v) * ea.v;
        }
    }
    const cplx half = -0.5 * weight;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            if (m[r][c] == 0.0) continue;
            for (int i = 0; i < 4; ++i) L(4 * i + c, 4 * i + r) += half * m[r][c];  // I x M^T
            for (int j = 0; j < 4; ++j) L(4 * r + j, 4 * c + j) += half * m[r][c];  // M x I
        }
    }
}

Matrix16cd si_liouvillian_fast(const SiGeneratorContext& ctx, double t) {
    const auto& p = ctx.params;
    Matrix16cd L = ctx.static_dephasing;

    if (ctx.pulse && p.Omega > 0.0) {
        const double lambda = (1.0 - std::tan(0.5 * p.theta)) / (1.0 + std::tan(0.5 * p.theta));
        const double j_rad = two_pi * p.J_over_h;
        const cplx on_res = 0.5 * p.Omega;
        const cplx off_res = 0.5 * lambda * p.Omega * std::exp(cplx(0.0, j_rad * t));
        add_unitary_entry(L, 1, 3, on_res);
        add_unitary_entry(L, 3, 1, std::conj(on_res));
        add_unitary_entry(L, 0, 2, off_res);
        add_unitary_entry(L, 2, 0, std::conj(off_res));
    }

    if (ctx.has_thermal) {
        const double j = two_pi * p.J_over_h;
        const double dez = two_pi * p.dEz_over_h;
        const double ebar = two_pi * p.Ebar_z_over_h;
        const cplx ph0 = std::exp(cplx(0.0, -ebar * t));
        const cplx a = std::exp(cplx(0.0, 0.5 * (dez - j) * t));
        const cplx b = std::exp(cplx(0.0, -0.5 * (dez + j) * t));
        const double ch = std::cos(0.5 * p.theta);
        const double sh = std::sin(0.5 * p.theta);
        const SparseEntry s1[4] = {{1, 0, ph0 * a * sh},
                                   {2, 0, ph0 * b * ch},
                                   {3, 1, ph0 * std::conj(a) * ch},
                                   {3, 2, -ph0 * std::conj(b) * sh}};
        const SparseEntry s2[4] = {{1, 0, ph0 * a * ch},
                                   {2, 0, -ph0 * b * sh},
                                   {3, 1, ph0 * std::conj(a) * sh},
                                   {3, 2, ph0 * std::conj(b) * ch}};
        const SparseEntry* ops[2] = {s1, s2};
        SparseEntry s1d[4], s2d[4];
        for (int k = 0; k < 4; ++k) {
            s1d[k] = {s1[k].c, s1[k].r, std::conj(s1[k].v)};
            s2d[k] = {s2[k].c, s2[k].r, std::conj(s2[k].v)};
        }
        const SparseEntry* ops_dag[2] = {s1d, s2d};
        for (int i = 0; i < 2; ++i) {
            for (int jx = 0; jx < 2; ++jx) {
                const cplx g = ctx.gamma(i, jx);
                if (g == 0.0) continue;
                add_dissipator(L, ops[i], ops[jx], (ctx.photon_n + 1.0) * g);
                if (ctx.photon_n > 0.0) {
                    add_dissipator(L, ops_dag[i], ops_dag[jx], ctx.photon_n * g);
                }
            }
        }
    }
    return L;
}

double fastest_rate(const SystemModel& model, const PulseSequence& seq) {
    if (model.kind == SystemKind::si_dqd) {
        const double j = two_pi * model.si.J_over_h;
        const double dez = two_pi * model.si.dEz_over_h;
        double amp = 0.0;
        for (const auto& s : seq.segments) amp = std::max(amp, s.amplitude);
        return std::max({j, 0.5 * (dez + j), amp});
    }
    const auto& p = model.nv;
    double amp = p.omega_1;
    for (const auto& s : seq.segments) amp = std::max(amp, s.amplitude);
    return std::max({std::abs(p.nu_c), std::abs(p.nu_c + p.A_zz) + std::abs(p.A_zx), amp});
}

}  // namespace

Schedule build_schedule(const SystemModel& model, const PulseSequence& seq, const NoiseModel& noise) {
    seq.validate();
    noise.dephasing.validate();
    if (noise.photon_n < 0.0) throw std::invalid_argument("NoiseModel: photon_n must be >= 0");

    Schedule sched;
    double min_seg = std::numeric_limits<double>::max();
    for (const auto& s : seq.segments) min_seg = std::min(min_seg, s.duration);
    const double rate = fastest_rate(model, seq);
    sched.default_dt = std::min(min_seg / 200.0, rate > 0.0 ? 1.0 / (50.0 * rate) : min_seg / 200.0);

    const bool has_thermal = noise.gamma.size() > 0;
    const bool has_dephasing = !noise.dephasing.gamma_phi.empty();

    if (model.kind == SystemKind::si_dqd) {
        if (has_thermal && noise.gamma.rows() != 2) {
            throw std::invalid_argument("build_schedule: si_dqd expects a 2x2 decay matrix");
        }
        if (has_dephasing && noise.dephasing.gamma_phi.size() != 2) {
            throw std::invalid_argument("build_schedule: si_dqd expects two dephasing rates");
        }
        const auto sz = si_sigma_z();
        Matrix16cd dephasing = Matrix16cd::Zero();
        if (has_dephasing) {
            dephasing = liouvillian(Matrix4cd::Zero(),
                                    dephasing_dissipator(noise.dephasing, {sz[0], sz[1]}));
        }
        for (const auto& seg : seq.segments) {
            SiGeneratorContext ctx;
            ctx.params = model.si;
            ctx.pulse = seg.kind == Segment::Kind::pulse;
            if (ctx.pulse) ctx.params.Omega = seg.amplitude;
            ctx.params.validate();
            ctx.has_thermal = has_thermal;
            if (has_thermal) ctx.gamma = noise.gamma;
            ctx.photon_n = noise.photon_n;
            ctx.static_dephasing = dephasing;
            SchedulePiece piece;
            piece.duration = seg.duration;
            piece.time_dependent = true;  // jump-operator phases run on delays too
            piece.generator = [ctx](double t) { return si_liouvillian_fast(ctx, t); };
            sched.pieces.push_back(std::move(piece));
        }
        return sched;
    }

    // NV: every segment is time-independent in the rotating frame.
    if (has_thermal && noise.gamma.rows() != 1) {
        throw std::invalid_argument("build_schedule: nv expects a 1x1 decay matrix (electron)");
    }
    if (has_dephasing && noise.dephasing.gamma_phi.size() != 1) {
        throw std::invalid_argument("build_schedule: nv expects one dephasing rate (electron)");
    }
    for (const auto& seg : seq.segments) {
        const NvParams p = model.nv;
        SchedulePiece piece;
        piece.duration = seg.duration;
        piece.time_dependent = false;
        const Segment seg_copy = seg;
        piece.generator = [p, seg_copy, noise, has_thermal, has_dephasing](double) {
            std::vector<LindbladTerm> terms;
            if (has_thermal) {
                terms = thermal_dissipator(noise.gamma, noise.photon_n, {nv_jump_op()});
            }
            if (has_dephasing) {
                auto deph = dephasing_dissipator(noise.dephasing, {nv_sigma_z_electron()});
                terms.insert(terms.end(), deph.begin(), deph.end());
            }
            return liouvillian(nv_hamiltonian(seg_copy, p), terms);
        };
        sched.pieces.push_back(std::move(piece));
    }
    return sched;
}

}  // namespace ewjn
