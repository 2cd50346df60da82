#include "ewjn/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "ewjn/errors.hpp"

namespace ewjn {

void OptimizationProblem::validate() const {
    const std::size_t n = x0.size();
    if (n == 0 || lower.size() != n || upper.size() != n) {
        throw std::invalid_argument("OptimizationProblem: x0/lower/upper sizes disagree");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] < upper[i])) {
            throw std::invalid_argument("OptimizationProblem: lower must be < upper");
        }
        if (x0[i] < lower[i] || x0[i] > upper[i]) {
            throw std::invalid_argument("OptimizationProblem: x0 must lie within the bounds");
        }
    }
    if (!(barrier0 > 0.0) || !(barrier_reduction > 0.0 && barrier_reduction < 1.0)) {
        throw std::invalid_argument("OptimizationProblem: invalid barrier settings");
    }
    if (restarts < 0) throw std::invalid_argument("OptimizationProblem: restarts must be >= 0");
}

namespace {

using Vec = std::vector<double>;

struct Tracker {
    const std::function<double(const Vec&)>* f = nullptr;
    Vec lower, upper;
    long evaluations = 0;
    double best_f = -1e300;
    Vec best_x;

    Vec unscale(const Vec& y) const {
        Vec x(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) x[i] = lower[i] + y[i] * (upper[i] - lower[i]);
        return x;
    }

    // Objective in scaled coordinates; failures count as -inf.
    double eval(const Vec& y) {
        ++evaluations;
        const Vec x = unscale(y);
        double v;
        try {
            v = (*f)(x);
        } catch (const std::exception&) {
            return -1e300;
        }
        if (!std::isfinite(v)) return -1e300;
        if (v > best_f) {
            best_f = v;
            best_x = x;
        }
        return v;
    }
};

constexpr double y_margin = 1e-9;

void clamp_inside(Vec& y) {
    for (double& v : y) v = std::min(1.0 - y_margin, std::max(y_margin, v));
}

double barrier_value(const Vec& y, double mu, double fval) {
    double b = 0.0;
    for (double v : y) b += std::log(v) + std::log(1.0 - v);
    return -fval - mu * b;
}

// One barrier subproblem: BFGS minimization of -f - mu * sum log terms.
bool bfgs_inner(Tracker& tr, Vec& y, double mu, double tol, int max_iter, double fd_step,
                int& iterations) {
    const std::size_t n = y.size();
    auto phi = [&](const Vec& yy) { return barrier_value(yy, mu, tr.eval(yy)); };

    auto gradient = [&](const Vec& yy, Vec& g) {
        g.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            Vec yp = yy, ym = yy;
            yp[i] = std::min(1.0 - y_margin, yy[i] + fd_step);
            ym[i] = std::max(y_margin, yy[i] - fd_step);
            const double denom = yp[i] - ym[i];
            g[i] = (phi(yp) - phi(ym)) / denom;
        }
    };

    std::vector<Vec> h(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) h[i][i] = 1e-2;  // conservative initial scale

    Vec g(n), d(n), y_new(n), g_new(n), s(n), dg(n);
    double f_cur = phi(y);
    gradient(y, g);

    for (int it = 0; it < max_iter; ++it) {
        ++iterations;
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax < tol * std::max(1.0, std::abs(f_cur))) return true;

        for (std::size_t i = 0; i < n; ++i) {
            d[i] = 0.0;
            for (std::size_t j = 0; j < n; ++j) d[i] -= h[i][j] * g[j];
        }
        double descent = std::inner_product(d.begin(), d.end(), g.begin(), 0.0);
        if (descent >= 0.0) {  // reset to steepest descent
            for (std::size_t i = 0; i < n; ++i) {
                std::fill(h[i].begin(), h[i].end(), 0.0);
                h[i][i] = 1e-2;
                d[i] = -1e-2 * g[i];
            }
            descent = std::inner_product(d.begin(), d.end(), g.begin(), 0.0);
        }

        // Backtracking Armijo search, clamped inside the open box.
        double alpha = 1.0;
        double f_next = f_cur;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t i = 0; i < n; ++i) y_new[i] = y[i] + alpha * d[i];
            clamp_inside(y_new);
            f_next = phi(y_new);
            if (f_next <= f_cur + 1e-4 * alpha * descent) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) return false;

        gradient(y_new, g_new);
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = y_new[i] - y[i];
            dg[i] = g_new[i] - g[i];
            sy += s[i] * dg[i];
        }
        if (sy > 1e-14) {
            // Inverse BFGS update (I - rho s dg^T) H (I - rho dg s^T) + rho s s^T.
            const double rho = 1.0 / sy;
            Vec hdg(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) hdg[i] += h[i][j] * dg[j];
            const double dgh = std::inner_product(dg.begin(), dg.end(), hdg.begin(), 0.0);
            std::vector<Vec> hn(n, Vec(n, 0.0));
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    hn[i][j] = h[i][j] - rho * (s[i] * hdg[j] + hdg[i] * s[j]) +
                               rho * rho * dgh * s[i] * s[j] + rho * s[i] * s[j];
                }
            }
            h.swap(hn);
        }
        y = y_new;
        g = g_new;
        const double moved = std::abs(f_cur - f_next);
        f_cur = f_next;
        if (moved < 1e-15 * std::max(1.0, std::abs(f_cur))) return true;
    }
    return false;
}

}  // namespace

OptimizationResult maximize_box(const std::function<double(const Vec&)>& f,
                                const OptimizationProblem& settings) {
    settings.validate();
    const std::size_t n = settings.x0.size();

    Tracker tr;
    tr.f = &f;
    tr.lower = settings.lower;
    tr.upper = settings.upper;

    auto scale = [&](const Vec& x) {
        Vec y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = (x[i] - settings.lower[i]) / (settings.upper[i] - settings.lower[i]);
        }
        clamp_inside(y);
        return y;
    };

    std::vector<Vec> starts;
    starts.push_back(scale(settings.x0));
    // Latin hypercube restarts: one stratum per restart and dimension.
    std::mt19937_64 rng(settings.seed);
    if (settings.restarts > 0) {
        const int r = settings.restarts;
        std::vector<std::vector<int>> perms(n, std::vector<int>(r));
        for (std::size_t d = 0; d < n; ++d) {
            std::iota(perms[d].begin(), perms[d].end(), 0);
            std::shuffle(perms[d].begin(), perms[d].end(), rng);
        }
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < r; ++k) {
            Vec y(n);
            for (std::size_t d = 0; d < n; ++d) y[d] = (perms[d][k] + u(rng)) / r;
            clamp_inside(y);
            starts.push_back(std::move(y));
        }
    }
    for (const auto& x : settings.extra_starts) {
        if (x.size() == n) starts.push_back(scale(x));
    }

    OptimizationResult result;
    bool last_converged = false;
    for (const auto& start : starts) {
        Vec y = start;
        double mu = settings.barrier0;
        bool converged = true;
        for (int outer = 0; outer < settings.outer_iterations; ++outer) {
            converged = bfgs_inner(tr, y, mu, settings.inner_tol, settings.inner_max_iterations,
                                   settings.fd_step, result.iterations) &&
                        converged;
            mu *= settings.barrier_reduction;
        }
        last_converged = converged;
        result.best_trace.push_back(tr.best_f);
    }

    result.x_star = tr.best_x;
    result.F_star = tr.best_f;
    result.evaluations = tr.evaluations;
    result.converged = last_converged && result.F_star > -1e299;
    return result;
}

namespace {

NoiseModel noise_for(SystemKind kind, double gamma_relax, double gamma_phi, double photon_n) {
    NoiseModel nm;
    if (kind == SystemKind::si_dqd) {
        nm.gamma = Eigen::MatrixXcd(2, 2);
        // Cooperative rates at half the spontaneous rate, per the pulse
        // optimization setup used for the silicon pair.
        nm.gamma << gamma_relax, 0.5 * gamma_relax, 0.5 * gamma_relax, gamma_relax;
        nm.dephasing.gamma_phi = {gamma_phi, gamma_phi};
    } else {
        nm.gamma = Eigen::MatrixXcd(1, 1);
        nm.gamma(0, 0) = gamma_relax;
        nm.dephasing.gamma_phi = {gamma_phi};
    }
    nm.photon_n = photon_n;
    return nm;
}

std::function<double(const Vec&)> fidelity_objective(const OptimizationProblem& p,
                                                     const NoiseModel& noise) {
    const Matrix4cd target = ideal_cnot(p.model.kind);
    const SystemModel model = p.model;
    const std::vector<double> lower = p.lower;
    const std::vector<double> upper = p.upper;
    const double dtf = p.dt_factor;
    return [model, noise, target, lower, upper, dtf](const Vec& x) {
        const PulseSequence seq = build_sequence(x, model.kind, lower, upper);
        const Schedule sched = build_schedule(model, seq, noise);
        return cnot_fidelity(sched, target, sched.default_dt * dtf);
    };
}

}  // namespace

OptimizationResult optimize(const OptimizationProblem& problem) {
    problem.validate();
    const NoiseModel effective =
        (problem.objective == ObjectiveKind::hamiltonian) ? NoiseModel{} : problem.noise;
    return maximize_box(fidelity_objective(problem, effective), problem);
}

std::vector<ComparisonRow> engineering_comparison_sweep(const std::vector<double>& gamma_relax,
                                                        const std::vector<double>& gamma_phi,
                                                        SystemKind kind,
                                                        const OptimizationProblem& settings,
                                                        int jobs) {
    std::vector<ComparisonRow> rows(gamma_relax.size() * gamma_phi.size());
    std::vector<std::pair<double, double>> grid;
    for (double gr : gamma_relax)
        for (double gp : gamma_phi) grid.push_back({gr, gp});

    auto run_point = [&](std::size_t idx) {
        ComparisonRow& row = rows[idx];
        row.gamma_relax = grid[idx].first;
        row.gamma_phi = grid[idx].second;
        try {
            OptimizationProblem p = settings;
            p.model.kind = kind;
            p.x0 = settings.x0.empty() ? default_initial_point(kind) : settings.x0;
            p.lower = settings.lower.empty() ? default_lower_bounds(kind) : settings.lower;
            p.upper = settings.upper.empty() ? default_upper_bounds(kind) : settings.upper;
            p.noise = noise_for(kind, row.gamma_relax, row.gamma_phi, settings.noise.photon_n);

            const auto noisy_f = fidelity_objective(p, p.noise);
            row.f_baseline = noisy_f(p.x0);

            p.objective = ObjectiveKind::hamiltonian;
            const OptimizationResult ham = optimize(p);
            row.x_hamiltonian = ham.x_star;
            row.f_hamiltonian = noisy_f(ham.x_star);  // re-scored under noise

            p.objective = ObjectiveKind::lindbladian;
            p.extra_starts.push_back(ham.x_star);  // dominance over the re-scored solution
            const OptimizationResult lin = optimize(p);
            row.x_lindbladian = lin.x_star;
            row.f_lindbladian = lin.F_star;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) run_point(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= grid.size()) return;
                    run_point(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return rows;
}

}  // namespace ewjn
