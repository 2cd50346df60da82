#include "ewjn/liouville.hpp"

#include <cmath>

#include "ewjn/expm.hpp"

#include "ewjn/constants.hpp"
#include "ewjn/errors.hpp"

namespace ewjn {

namespace {

Matrix16cd kron44(const Matrix4cd& a, const Matrix4cd& b) {
    Matrix16cd out;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            out.block<4, 4>(4 * i, 4 * k) = a(i, k) * b;
    return out;
}

}  // namespace

Vector16cd vectorize(const Matrix4cd& rho) {
    Vector16cd v;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v(4 * i + j) = rho(i, j);
    return v;
}

Matrix4cd devectorize(const Vector16cd& v) {
    Matrix4cd m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = v(4 * i + j);
    return m;
}

Matrix16cd liouvillian(const Matrix4cd& hamiltonian, const std::vector<LindbladTerm>& terms) {
    const double hnorm = hamiltonian.norm();
    if ((hamiltonian - hamiltonian.adjoint()).norm() > 1e-12 * std::max(hnorm, 1e-300)) {
        throw std::invalid_argument("liouvillian: Hamiltonian is not Hermitian");
    }
    const Matrix4cd id = Matrix4cd::Identity();
    const Matrix4cd h = hamiltonian / phys.hbar;
    Matrix16cd L = cplx(0.0, -1.0) * (kron44(h, id) - kron44(id, h.transpose()));
    for (const auto& term : terms) {
        const Matrix4cd bda = term.B.adjoint() * term.A;
        L += term.weight * (kron44(term.A, term.B.conjugate()) -
                            0.5 * kron44(id, bda.transpose()) - 0.5 * kron44(bda, id));
    }

    // The trace functional must be a left null vector.
    Eigen::Matrix<cplx, 1, 16> trace_row = Eigen::Matrix<cplx, 1, 16>::Zero();
    for (int i = 0; i < 4; ++i) trace_row += L.row(5 * i);
    const double scale = std::max(L.norm(), 1e-300);
    if (trace_row.norm() > 1e-12 * scale) {
        throw numeric_error("liouvillian: generator is not trace-preserving", trace_row.norm() / scale);
    }
    return L;
}

double Schedule::total_duration() const {
    double t = 0.0;
    for (const auto& p : pieces) t += p.duration;
    return t;
}

namespace {

// Shared stepping core: accumulates the channel matrix and optionally pushes a
// state vector (for trajectory output).
void run_schedule(const Schedule& schedule, double dt, Matrix16cd* channel, Vector16cd* state,
                  const TrajectoryCallback& cb, int stride) {
    if (dt <= 0.0) dt = schedule.default_dt;
    double t0 = 0.0;
    long step_index = 0;

    auto emit = [&](double t) {
        if (!cb || !state) return;
        const Matrix4cd rho = devectorize(*state);
        TrajectorySample s;
        s.t = t;
        for (int i = 0; i < 4; ++i) s.populations(i) = rho(i, i).real();
        int k = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) s.coherences(k++) = std::abs(rho(i, j));
        cb(s);
    };

    emit(0.0);
    for (const auto& piece : schedule.pieces) {
        if (piece.duration <= 0.0) {
            throw std::invalid_argument("schedule: piece durations must be > 0");
        }
        if (!piece.time_dependent) {
            const Matrix16cd L = piece.generator(t0 + 0.5 * piece.duration);
            const Matrix16cd U = expm16(L * piece.duration);
            if (channel) *channel = U * *channel;
            if (state) *state = U * *state;
            emit(t0 + piece.duration);
        } else {
            if (!(dt > 0.0)) {
                throw std::invalid_argument("schedule: time-dependent pieces need dt > 0");
            }
            const long n = std::max<long>(1, static_cast<long>(std::ceil(piece.duration / dt)));
            const double h = piece.duration / static_cast<double>(n);
            for (long k = 0; k < n; ++k) {
                const double tm = t0 + (static_cast<double>(k) + 0.5) * h;
                const Matrix16cd U = expm16(piece.generator(tm) * h);
                if (channel) *channel = U * *channel;
                if (state) *state = U * *state;
                ++step_index;
                if (cb && (step_index % stride == 0)) emit(t0 + (k + 1) * h);
            }
        }
        t0 += piece.duration;
    }
}

}  // namespace

Matrix16cd channel_matrix(const Schedule& schedule, double dt) {
    Matrix16cd channel = Matrix16cd::Identity();
    run_schedule(schedule, dt, &channel, nullptr, nullptr, 1);
    return channel;
}

Vector16cd propagate(const Vector16cd& rho0, const Schedule& schedule, double dt,
                     const TrajectoryCallback& cb, int stride) {
    Vector16cd state = rho0;
    run_schedule(schedule, dt, nullptr, &state, cb, std::max(1, stride));

    cplx trace = 0.0;
    for (int i = 0; i < 4; ++i) trace += state(5 * i);
    cplx trace0 = 0.0;
    for (int i = 0; i < 4; ++i) trace0 += rho0(5 * i);
    if (std::abs(trace - trace0) > 1e-10 * std::max(1.0, std::abs(trace0))) {
        throw numeric_error("propagate: trace not preserved", std::abs(trace - trace0));
    }
    return state;
}

Matrix4cd apply_channel_to_operator(const Matrix16cd& channel, const Matrix4cd& x) {
    return devectorize(channel * vectorize(x));
}

namespace {

double block_norm_inf(const Matrix16cd& a) {
    double best = 0.0;
    for (int i = 0; i < 16; ++i) {
        double row = 0.0;
        for (int j = 0; j < 16; ++j) row += std::abs(a(i, j));
        best = std::max(best, row);
    }
    return best;
}

// y <- exp(L h) y by direct series when ||L h|| is small, else via expm16.
void apply_step(const Matrix16cd& L, double h, Block16& y) {
    const double nrm = block_norm_inf(L) * h;
    int order = 0;
    if (nrm < 0.05) order = 8;
    else if (nrm < 0.25) order = 11;
    if (order == 0) {
        y = expm16(Matrix16cd(L * h)) * y;
        return;
    }
    Block16 term = y;
    for (int k = 1; k <= order; ++k) {
        term = (L * term) * (h / static_cast<double>(k));
        y += term;
    }
}

}  // namespace

Block16 propagate_block(const Block16& y0, const Schedule& schedule, double dt) {
    if (dt <= 0.0) dt = schedule.default_dt;
    Block16 y = y0;
    double t0 = 0.0;
    for (const auto& piece : schedule.pieces) {
        if (piece.duration <= 0.0) {
            throw std::invalid_argument("schedule: piece durations must be > 0");
        }
        if (!piece.time_dependent) {
            const Matrix16cd L = piece.generator(t0 + 0.5 * piece.duration);
            y = expm16(Matrix16cd(L * piece.duration)) * y;
        } else {
            if (!(dt > 0.0)) throw std::invalid_argument("schedule: time-dependent pieces need dt > 0");
            const long n = std::max<long>(1, static_cast<long>(std::ceil(piece.duration / dt)));
            const double h = piece.duration / static_cast<double>(n);
            for (long k = 0; k < n; ++k) {
                apply_step(piece.generator(t0 + (static_cast<double>(k) + 0.5) * h), h, y);
            }
        }
        t0 += piece.duration;
    }
    return y;
}

Matrix4cd apply_channel_to_operator(const Schedule& schedule, const Matrix4cd& x, double dt) {
    return apply_channel_to_operator(channel_matrix(schedule, dt), x);
}

double dt_halving_difference(const Vector16cd& rho0, const Schedule& schedule, double dt) {
    const Vector16cd a = propagate(rho0, schedule, dt);
    const Vector16cd b = propagate(rho0, schedule, 0.5 * dt);
    return (a - b).norm();
}

}  // namespace ewjn
