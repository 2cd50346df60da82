#include "ewjn/sphere.hpp"

#include <cmath>
#include <vector>

#include "ewjn/constants.hpp"
#include "ewjn/errors.hpp"

namespace ewjn {

namespace {

using Eigen::Matrix3cd;
using Eigen::Vector3cd;
using Eigen::Vector3d;

// Fully normalized associated Legendre functions (no Condon-Shortley phase)
// with the theta-derivative and m P/sin(theta); tables up to n_max inclusive.
struct AngularTable {
    int n_max;
    double cos_t, sin_t;
    bool pole;      // |sin| ~ 0
    double pole_sign;  // +1 at theta = 0, -1 at theta = pi
    // P[n][m], tau[n][m] = dPbar/dtheta, pi_m[n][m] = m Pbar / sin(theta).
    std::vector<std::vector<double>> p, tau, pi_m;
};

AngularTable angular_table(double theta, int n_max) {
    AngularTable t;
    t.n_max = n_max;
    t.cos_t = std::cos(theta);
    t.sin_t = std::sin(theta);
    t.pole = std::abs(t.sin_t) < 1e-10;
    t.pole_sign = (t.cos_t >= 0.0) ? 1.0 : -1.0;
    t.p.assign(n_max + 1, {});
    t.tau.assign(n_max + 1, {});
    t.pi_m.assign(n_max + 1, {});
    for (int n = 0; n <= n_max; ++n) {
        t.p[n].assign(n + 1, 0.0);
        t.tau[n].assign(n + 1, 0.0);
        t.pi_m[n].assign(n + 1, 0.0);
    }

    if (t.pole) {
        const double c = t.pole_sign;
        for (int n = 0; n <= n_max; ++n) {
            const double sgn = (c > 0.0) ? 1.0 : ((n % 2 == 0) ? 1.0 : -1.0);
            t.p[n][0] = sgn * std::sqrt((2.0 * n + 1.0) / 2.0);
            if (n >= 1) {
                const double lim = std::sqrt((2.0 * n + 1.0) / (2.0 * n * (n + 1.0))) * 0.5 * n *
                                   (n + 1.0);
                if (c > 0.0) {
                    t.pi_m[n][1] = lim;
                    t.tau[n][1] = lim;
                } else {
                    const double s = (n % 2 == 0) ? -1.0 : 1.0;
                    t.pi_m[n][1] = s * lim;
                    t.tau[n][1] = -s * lim;
                }
            }
        }
        return t;
    }

    const double x = t.cos_t, s = t.sin_t;
    // Diagonal and first off-diagonal.
    t.p[0][0] = std::sqrt(0.5);
    for (int m = 1; m <= n_max; ++m) {
        t.p[m][m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * t.p[m - 1][m - 1];
    }
    for (int m = 0; m + 1 <= n_max; ++m) {
        t.p[m + 1][m] = std::sqrt(2.0 * m + 3.0) * x * t.p[m][m];
    }
    for (int m = 0; m <= n_max; ++m) {
        for (int n = m + 2; n <= n_max; ++n) {
            const double a = std::sqrt((4.0 * n * n - 1.0) / (static_cast<double>(n) * n - m * m));
            const double b = std::sqrt((static_cast<double>(n - 1) * (n - 1) - m * m) /
                                       (4.0 * static_cast<double>(n - 1) * (n - 1) - 1.0));
            t.p[n][m] = a * (x * t.p[n - 1][m] - b * t.p[n - 2][m]);
        }
    }
    for (int n = 1; n <= n_max; ++n) {
        for (int m = 0; m <= n; ++m) {
            t.pi_m[n][m] = m * t.p[n][m] / s;
            const double c_nm =
                std::sqrt((static_cast<double>(n) * n - m * m) * (2.0 * n + 1.0) / (2.0 * n - 1.0));
            const double prev = (m <= n - 1) ? t.p[n - 1][m] : 0.0;
            t.tau[n][m] = (n * x * t.p[n][m] - c_nm * prev) / s;
        }
    }
    return t;
}

// Scaled radial factors; x = k0 r << 1 throughout this toolkit.
struct RadialOut {
    cplx h_hat;   // h_n(x) x^{n+1} / (2n-1)!!
    cplx dh_hat;  // xi'_n(x) x^{n+1} / (2n-1)!!
};
struct RadialReg {
    double j_hat;   // j_n(x) (2n+1)!!/x^n
    double dj_hat;  // psi'_n(x) (2n+1)!!/x^n   ~ (n+1)
};

RadialOut radial_out(int n, double x, double log_dfac_ratio) {
    // log_dfac_ratio = ln[(2n+1)!! (2n-1)!!] used only for the tiny j part.
    const double x2 = x * x;
    const double ys = 1.0 + x2 / (2.0 * (2.0 * n - 1.0)) +
                      x2 * x2 / (8.0 * (2.0 * n - 1.0) * (2.0 * n - 3.0));
    const double dys = n - (2.0 - n) * x2 / (2.0 * (2.0 * n - 1.0)) -
                       (4.0 - n) * x2 * x2 / (8.0 * (2.0 * n - 1.0) * (2.0 * n - 3.0));
    // Real (j_n) part, scaled by the same factor: x^{2n+1}/[(2n+1)!!(2n-1)!!].
    const double lx = (2.0 * n + 1.0) * std::log(x) - log_dfac_ratio;
    const double jpart = (lx > -700.0) ? std::exp(lx) : 0.0;
    RadialOut out;
    out.h_hat = cplx(jpart, -ys);
    out.dh_hat = cplx((n + 1.0) * jpart, dys);
    return out;
}

RadialReg radial_reg(int n, double x) {
    const double x2 = x * x;
    RadialReg out;
    out.j_hat = 1.0 - x2 / (2.0 * (2.0 * n + 3.0)) + x2 * x2 / (8.0 * (2.0 * n + 3.0) * (2.0 * n + 5.0));
    out.dj_hat = (n + 1.0) - (n + 3.0) * x2 / (2.0 * (2.0 * n + 3.0)) +
                 (n + 5.0) * x2 * x2 / (8.0 * (2.0 * n + 3.0) * (2.0 * n + 5.0));
    return out;
}

struct SphericalPoint {
    double r, theta, phi;
    Eigen::Matrix3d frame;  // columns r_hat, theta_hat, phi_hat in Cartesian
};

SphericalPoint to_spherical(const Vector3d& v) {
    SphericalPoint p;
    p.r = v.norm();
    p.theta = std::acos(std::clamp(v.z() / p.r, -1.0, 1.0));
    p.phi = std::atan2(v.y(), v.x());
    const double st = std::sin(p.theta), ct = std::cos(p.theta);
    const double sp = std::sin(p.phi), cp = std::cos(p.phi);
    p.frame.col(0) = Vector3d(st * cp, st * sp, ct);
    p.frame.col(1) = Vector3d(ct * cp, ct * sp, -st);
    p.frame.col(2) = Vector3d(-sp, cp, 0.0);
    return p;
}

// Spherical components of M and N waves at one point for (n, m, parity), with
// the common radial scale removed. rad_h: z_n-type factor; rad_dh: [x z]'-type.
struct WavePair {
    Vector3cd m_vec;
    Vector3cd n_vec;
};

WavePair wave_vectors(int n, int m, bool even, const AngularTable& ang, double x, cplx rad_h,
                      cplx rad_dh, double phi) {
    const double cmp = std::cos(m * phi);
    const double smp = std::sin(m * phi);
    const double pim = ang.pi_m[n][m];
    const double tau = ang.tau[n][m];
    const double pbar = ang.p[n][m];

    WavePair w;
    if (even) {
        w.m_vec = Vector3cd(0.0, -pim * smp * rad_h, -tau * cmp * rad_h);
        w.n_vec = Vector3cd(n * (n + 1.0) * pbar * cmp * rad_h / x, tau * cmp * rad_dh / x,
                            -pim * smp * rad_dh / x);
    } else {
        w.m_vec = Vector3cd(0.0, pim * cmp * rad_h, -tau * smp * rad_h);
        w.n_vec = Vector3cd(n * (n + 1.0) * pbar * smp * rad_h / x, tau * smp * rad_dh / x,
                            pim * cmp * rad_dh / x);
    }
    return w;
}

// Logarithmic derivative of the Riccati-Bessel psi at complex argument, by
// downward recursion.
std::vector<cplx> log_derivative(cplx y, int n_max) {
    const int start = n_max + 32;
    std::vector<cplx> d(start + 1);
    d[start] = 0.0;
    for (int k = start; k >= 1; --k) {
        const cplx ky = static_cast<double>(k) / y;
        d[k - 1] = ky - 1.0 / (d[k] + ky);
    }
    d.resize(n_max + 1);
    return d;
}

}  // namespace

Eigen::Matrix3cd sphere_gm_analytic(double radius, cplx eps, double omega,
                                    const Vector3d& source_pos, const Vector3d& obs_pos,
                                    double term_tol) {
    if (!(radius > 0.0) || !(omega > 0.0)) {
        throw std::domain_error("sphere_gm_analytic: radius and omega must be > 0");
    }
    const double k0 = omega / phys.c;
    const double xa = k0 * radius;
    if (xa > 0.05) {
        throw numeric_error("sphere_gm_analytic: k0 * radius outside the quasistatic regime", xa);
    }
    const SphericalPoint po = to_spherical(obs_pos);
    const SphericalPoint ps = to_spherical(source_pos);
    if (po.r <= radius || ps.r <= radius) {
        throw std::domain_error("sphere_gm_analytic: both points must lie outside the sphere");
    }
    if (eps == cplx(1.0, 0.0)) return Matrix3cd::Zero();

    const cplx se = std::sqrt(eps);
    const cplx y = se * xa;
    const int n_cap = 360;
    const auto dlog = log_derivative(y, n_cap);
    const AngularTable ang_o = angular_table(po.theta, n_cap);
    const AngularTable ang_s = angular_table(ps.theta, n_cap);

    const double xo = k0 * po.r;
    const double xs = k0 * ps.r;
    const double geom = radius * radius / (po.r * ps.r);

    Matrix3cd acc = Matrix3cd::Zero();
    double tail = 1e300;
    int quiet = 0;
    double log_dfac_ratio = 0.0;  // ln[(2n+1)!! (2n-1)!!]
    double t_geom = geom;         // (a^2 /(r r'))^{n+1} at n = 1

    for (int n = 1; n <= n_cap; ++n) {
        log_dfac_ratio += std::log(2.0 * n + 1.0) + ((n >= 1) ? std::log(std::max(1.0, 2.0 * n - 1.0)) : 0.0);
        t_geom *= geom;
        const double t_n = t_geom / ((2.0 * n + 1.0) * xa);

        const RadialReg ra = radial_reg(n, xa);
        const RadialOut ha = radial_out(n, xa, log_dfac_ratio);
        const cplx lam = y * dlog[n];
        const cplx b_n = (lam * ra.j_hat - ra.dj_hat) / (ha.dh_hat - lam * ha.h_hat);
        const cplx b_m = (xa * xa * ra.j_hat * dlog[n] - y * ra.dj_hat) /
                         (xa * xa * ha.h_hat * dlog[n] - y * ha.dh_hat);

        const RadialOut ro = radial_out(n, xo, log_dfac_ratio);
        const RadialOut rs = radial_out(n, xs, log_dfac_ratio);

        Matrix3cd term = Matrix3cd::Zero();
        for (int m = 0; m <= n; ++m) {
            const double w_nm = (m == 0 ? 1.0 : 2.0) * 2.0 / (n * (n + 1.0));
            for (int parity = 0; parity < 2; ++parity) {
                const bool even = parity == 0;
                if (m == 0 && !even) continue;  // sin(0) waves vanish
                const WavePair wo =
                    wave_vectors(n, m, even, ang_o, xo, ro.h_hat, ro.dh_hat, po.phi);
                const WavePair ws =
                    wave_vectors(n, m, even, ang_s, xs, rs.h_hat, rs.dh_hat, ps.phi);
                const Vector3cd mo = po.frame.cast<cplx>() * wo.m_vec;
                const Vector3cd no = po.frame.cast<cplx>() * wo.n_vec;
                const Vector3cd ms = ps.frame.cast<cplx>() * ws.m_vec;
                const Vector3cd ns = ps.frame.cast<cplx>() * ws.n_vec;
                term += w_nm * (-b_m * (mo * ms.transpose()) + b_n * (no * ns.transpose()));
            }
        }
        term *= cplx(0.0, 1.0) * k0 / (4.0 * pi) * t_n;
        acc += term;

        tail = term.norm();
        if (tail < term_tol * std::max(acc.norm(), 1e-300)) {
            if (++quiet >= 3) return acc;
        } else {
            quiet = 0;
        }
    }
    throw numeric_error("sphere_gm_analytic: multipole series did not converge", tail);
}

namespace detail {

Eigen::Matrix3cd sphere_gm_free_series(double omega, const Vector3d& r_small,
                                       const Vector3d& r_large, int n_max) {
    const double k0 = omega / phys.c;
    const SphericalPoint pi_ = to_spherical(r_small);
    const SphericalPoint po = to_spherical(r_large);
    const AngularTable ang_i = angular_table(pi_.theta, n_max);
    const AngularTable ang_o = angular_table(po.theta, n_max);
    const double xi = k0 * pi_.r;
    const double xo = k0 * po.r;

    Matrix3cd acc = Matrix3cd::Zero();
    double log_dfac_ratio = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        log_dfac_ratio += std::log(2.0 * n + 1.0) + std::log(std::max(1.0, 2.0 * n - 1.0));
        const double t_n = std::pow(pi_.r / po.r, n) / ((2.0 * n + 1.0) * xo);
        const RadialReg ri = radial_reg(n, xi);
        const RadialOut ro = radial_out(n, xo, log_dfac_ratio);
        for (int m = 0; m <= n; ++m) {
            const double w_nm = (m == 0 ? 1.0 : 2.0) * 2.0 / (n * (n + 1.0));
            for (int parity = 0; parity < 2; ++parity) {
                const bool even = parity == 0;
                if (m == 0 && !even) continue;
                const WavePair wi =
                    wave_vectors(n, m, even, ang_i, xi, ri.j_hat, ri.dj_hat, pi_.phi);
                const WavePair wo =
                    wave_vectors(n, m, even, ang_o, xo, ro.h_hat, ro.dh_hat, po.phi);
                const Vector3cd mi = pi_.frame.cast<cplx>() * wi.m_vec;
                const Vector3cd ni = pi_.frame.cast<cplx>() * wi.n_vec;
                const Vector3cd mo = po.frame.cast<cplx>() * wo.m_vec;
                const Vector3cd no = po.frame.cast<cplx>() * wo.n_vec;
                // G(r_<, r_>): regular waves at the first argument.
                acc += cplx(0.0, 1.0) * k0 / (4.0 * pi) * t_n * w_nm *
                       (mi * mo.transpose() + ni * no.transpose());
            }
        }
    }
    return acc;
}

Eigen::Matrix3cd gm_free_closed(double omega, const Vector3d& r1, const Vector3d& r2) {
    const double k0 = omega / phys.c;
    const Vector3d d = r1 - r2;
    const double r = d.norm();
    const Vector3d rh = d / r;
    const cplx ikr(0.0, k0 * r);
    const cplx g = std::exp(ikr) / (4.0 * pi * r);
    const cplx kr2 = ikr * ikr;  // -(k r)^2
    const cplx a = 1.0 + (ikr - 1.0) / (-kr2);
    const cplx b = (3.0 - 3.0 * ikr + kr2) / (-kr2);
    Matrix3cd out = Matrix3cd::Zero();
    const Eigen::Matrix3d rr = rh * rh.transpose();
    out = g * (a * Matrix3cd::Identity() + b * rr.cast<cplx>());
    return out;
}

}  // namespace detail

}  // namespace ewjn
