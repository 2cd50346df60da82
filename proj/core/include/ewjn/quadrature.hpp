#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ewjn/errors.hpp"

namespace ewjn {

// Tolerances and kernel discretization knobs for the wavevector integrals.
struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    double q_max_factor = 40.0;  // integration cutoff q_max = factor / min(d, z_i + z_j)
    int angular_points = 64;     // base count for the 2D cross integral

    void validate() const {
        if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be > 0");
        if (!(q_max_factor >= 10.0)) throw std::invalid_argument("QuadratureSpec: q_max_factor must be >= 10");
        if (angular_points < 4) throw std::invalid_argument("QuadratureSpec: angular_points must be >= 4");
    }
};

inline double quad_norm(double v) { return std::abs(v); }
inline double quad_norm(const std::complex<double>& v) { return std::abs(v); }
template <typename Derived>
double quad_norm(const Eigen::MatrixBase<Derived>& m) {
    return m.norm();
}

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK constants).
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

}  // namespace detail

template <class F, class T = std::invoke_result_t<F, double>>
struct PanelResult {
    T value;
    double error;
};

// One Gauss-Kronrod 15(7) panel on [a, b].
template <class F, class T = std::invoke_result_t<F, double>>
PanelResult<F, T> gk15_panel(F&& f, double a, double b) {
    using detail::gk15_wg;
    using detail::gk15_wk;
    using detail::gk15_x;
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);

    T fc = f(c);
    T kron = gk15_wk[7] * fc;
    T gauss = gk15_wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        T fp = f(c + h * gk15_x[i]);
        T fm = f(c - h * gk15_x[i]);
        T s = fp + fm;
        kron = kron + gk15_wk[i] * s;
        if (i % 2 == 1) {
            gauss = gauss + gk15_wg[i / 2] * s;
        }
    }
    kron = h * kron;
    gauss = h * gauss;
    return {kron, quad_norm(T(kron - gauss))};
}

// Globally adaptive bisection driven by per-panel Kronrod error estimates.
// Throws numeric_error (carrying the achieved error) if the panel budget is
// exhausted before the tolerance is met.
template <class F, class T = std::invoke_result_t<F, double>>
T integrate_adaptive(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                     int max_panels = 4000) {
    struct Seg {
        double a, b, error;
        T value;
    };
    std::vector<Seg> segs;
    auto first = gk15_panel(f, a, b);
    segs.push_back({a, b, first.error, first.value});

    for (int iter = 0; iter < max_panels; ++iter) {
        T total = segs.front().value;
        double err = segs.front().error;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i) {
            total = total + segs[i].value;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        const double target = std::max(abs_tol, rel_tol * quad_norm(total));
        if (err <= target || err <= 1e-300) {
            // Deterministic final summation in interval order.
            std::sort(segs.begin(), segs.end(), [](const Seg& l, const Seg& r) { return l.a < r.a; });
            T out = segs.front().value;
            for (std::size_t i = 1; i < segs.size(); ++i) out = out + segs[i].value;
            return out;
        }
        Seg s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        if (mid <= s.a || mid >= s.b) {
            throw numeric_error("integrate_adaptive: interval collapsed before reaching tolerance", err);
        }
        auto left = gk15_panel(f, s.a, mid);
        auto right = gk15_panel(f, mid, s.b);
        segs[worst] = {s.a, mid, left.error, left.value};
        segs.push_back({mid, s.b, right.error, right.value});
    }

    double err = 0.0;
    for (const auto& s : segs) err += s.error;
    throw numeric_error("integrate_adaptive: failed to reach tolerance", err);
}

}  // namespace ewjn
