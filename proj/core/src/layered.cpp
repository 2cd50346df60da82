#include "ewjn/layered.hpp"

#include <cmath>

#include "ewjn/constants.hpp"
#include "ewjn/errors.hpp"

namespace ewjn {

namespace {

// sqrt with Im >= 0, so e^{i k_z z} stays bounded for z > 0.
cplx upper_sqrt(cplx z) {
    cplx s = std::sqrt(z);
    if (s.imag() < 0.0) s = -s;
    return s;
}

// cot(z) via decaying exponentials; valid branch for Im(z) >= 0.
cplx stable_cot(cplx z) {
    if (z.imag() >= 0.0) {
        const cplx e = std::exp(cplx(0.0, 2.0) * z);
        return cplx(0.0, 1.0) * (e + 1.0) / (e - 1.0);
    }
    const cplx e = std::exp(cplx(0.0, -2.0) * z);
    return cplx(0.0, -1.0) * (e + 1.0) / (e - 1.0);
}

cplx coth(cplx z) { return 1.0 / std::tanh(z); }

}  // namespace

void FilmStack::validate() const {
    if (!(thickness > 0.0)) throw std::invalid_argument("FilmStack: thickness must be > 0");
    if (nonlocal()) std::get<LindhardMetal>(material).validate();
    else std::get<LocalMetal>(material).validate();
}

std::pair<cplx, cplx> fresnel_film(double q, double omega, cplx eps, double t) {
    if (q < 0.0) throw std::domain_error("fresnel_film: q must be >= 0");
    if (!(omega > 0.0)) throw std::domain_error("fresnel_film: omega must be > 0");
    if (!(t > 0.0)) throw std::domain_error("fresnel_film: t must be > 0");

    const double k0 = omega / phys.c;
    const cplx kz2 = cplx(k0 * k0 - q * q, 0.0);
    const cplx kzm2 = eps * (k0 * k0) - q * q;
    const cplx kz = upper_sqrt(kz2);
    const cplx kzm = upper_sqrt(kzm2);
    const cplx ct = stable_cot(kzm * t);
    const cplx i2kk = cplx(0.0, 2.0) * kz * kzm * ct;

    const cplx rs = (kz2 - kzm2) / (kz2 + kzm2 + i2kk);
    const cplx rp = (eps * eps * kz2 - kzm2) / (eps * eps * kz2 + kzm2 + eps * i2kk);
    return {rs, rp};
}

namespace {

struct ModeSums {
    cplx s_even{0.0, 0.0}, s_odd{0.0, 0.0};  // sum of (exact - model), s polarization
    cplx p_even{0.0, 0.0}, p_odd{0.0, 0.0};  // sum of (exact - model), p polarization
};

// Model-subtracted terms for one transverse wavenumber p (only k^2 = q^2 + p^2
// enters). Both mode sums have slowly decaying tails (1/k^2); subtracting the
// eps -> const models termwise and restoring them via closed-form lattice sums
// leaves residuals that fall off like 1/k^5.
struct ModeTerm {
    cplx s, p;
};

ModeTerm mode_term(const LindhardMetal& metal, double omega, double q, double p, double k0,
                   double ks2) {
    const double k2 = q * q + p * p;
    const double k = std::sqrt(k2);
    const LindhardEps eps = lindhard_permittivity(metal, omega, k);
    ModeTerm t;
    t.s = 1.0 / (eps.transverse - k2 / (k0 * k0)) - 1.0 / (1.0 - k2 / (k0 * k0));
    t.p = 1.0 / (k2 * eps.longitudinal) - 1.0 / (k2 + ks2);
    return t;
}

}  // namespace

std::pair<cplx, cplx> nonlocal_film_coefficients(double q, double omega, const LindhardMetal& metal,
                                                 double t, int n_terms, double rel_tol) {
    metal.validate();
    if (!(q > 0.0)) throw std::domain_error("nonlocal_film_coefficients: q must be > 0");
    if (!(omega > 0.0)) throw std::domain_error("nonlocal_film_coefficients: omega must be > 0");
    if (!(t > 0.0)) throw std::domain_error("nonlocal_film_coefficients: t must be > 0");
    if (n_terms < 1) throw std::domain_error("nonlocal_film_coefficients: n_terms must be >= 1");

    const double k0 = omega / phys.c;
    const cplx kz = upper_sqrt(cplx(k0 * k0 - q * q, 0.0));
    // Thomas-Fermi scale of eps_l; the p-polarization model is 1/(k^2 + ks^2).
    const double ks2 = 3.0 * metal.omega_p * metal.omega_p / (metal.v_F * metal.v_F);
    const cplx qp = std::sqrt(cplx(q * q + ks2, 0.0));
    // s-polarization model is 1/(1 - k^2/k0^2) = -k0^2/(qs^2 + p_n^2).
    const cplx qs = cplx(0.0, -1.0) * kz;

    // Closed-form lattice sums of the models over all n.
    const cplx p_closed_even = t / (2.0 * qp) * coth(qp * t * 0.5);
    const cplx p_closed_odd = t / (2.0 * qp) * std::tanh(qp * t * 0.5);
    const cplx s_closed_even = -k0 * k0 * t / (2.0 * qs) * coth(qs * t * 0.5);
    const cplx s_closed_odd = -k0 * k0 * t / (2.0 * qs) * std::tanh(qs * t * 0.5);

    ModeSums sums;
    auto add_even = [&](int n_lo, int n_hi) {
        for (int n = n_lo; n <= n_hi; ++n) {
            const double p = 2.0 * pi * n / t;
            const double w = (n == 0) ? 1.0 : 2.0;
            const ModeTerm tm = mode_term(metal, omega, q, p, k0, ks2);
            sums.s_even += w * tm.s;
            sums.p_even += w * tm.p;
        }
    };
    // Odd family over n in [-N, N]: |p| pairs for n = 0..N-1 plus the lone
    // (2N+1) pi/t term at the upper end of the window.
    auto odd_value = [&](int N, cplx& s_out, cplx& p_out) {
        const double p_top = (2.0 * N + 1.0) * pi / t;
        const ModeTerm top = mode_term(metal, omega, q, p_top, k0, ks2);
        s_out = sums.s_odd + top.s;
        p_out = sums.p_odd + top.p;
    };
    auto add_odd_pairs = [&](int n_lo, int n_hi) {
        for (int n = n_lo; n <= n_hi; ++n) {
            const double p = (2.0 * n + 1.0) * pi / t;
            const ModeTerm tm = mode_term(metal, omega, q, p, k0, ks2);
            sums.s_odd += 2.0 * tm.s;
            sums.p_odd += 2.0 * tm.p;
        }
    };

    auto coefficients = [&](int N) -> std::pair<cplx, cplx> {
        cplx s_odd, p_odd;
        odd_value(N, s_odd, p_odd);
        const cplx fs = cplx(0.0, 2.0) * kz / (t * k0 * k0);
        const cplx se = fs * (sums.s_even + s_closed_even);
        const cplx so = fs * (s_odd + s_closed_odd);
        const cplx rs = 0.5 * ((se - 1.0) / (se + 1.0) + (so - 1.0) / (so + 1.0));

        const double fp = 2.0 * q / t;
        const cplx pe = fp * (sums.p_even + p_closed_even);
        const cplx po = fp * (p_odd + p_closed_odd);
        const cplx rp = 0.5 * ((1.0 - pe) / (1.0 + pe) + (1.0 - po) / (1.0 + po));
        return {rs, rp};
    };

    int N = n_terms;
    add_even(0, N);
    add_odd_pairs(0, N - 1);
    auto prev = coefficients(N);

    const int n_cap = 1 << 22;
    while (N < n_cap) {
        const int N2 = 2 * N;
        add_even(N + 1, N2);
        add_odd_pairs(N, N2 - 1);
        auto cur = coefficients(N2);
        const double ds = std::abs(cur.first - prev.first) / std::max(1e-300, std::abs(cur.first));
        const double dp = std::abs(cur.second - prev.second) / std::max(1e-300, std::abs(cur.second));
        N = N2;
        prev = cur;
        if (ds < rel_tol && dp < rel_tol) {
            return cur;
        }
    }
    const double res = std::abs(prev.first) + std::abs(prev.second);
    throw convergence_error("nonlocal_film_coefficients: mode sums did not converge", res);
}

std::pair<cplx, cplx> film_reflection(double q, double omega, const FilmStack& stack) {
    if (stack.nonlocal()) {
        if (q <= 0.0) return {cplx(0.0, 0.0), cplx(0.0, 0.0)};  // q = 0 ring has measure zero
        return nonlocal_film_coefficients(q, omega, std::get<LindhardMetal>(stack.material),
                                          stack.thickness, stack.nonlocal_start_terms);
    }
    const cplx eps = local_permittivity(std::get<LocalMetal>(stack.material), omega);
    return fresnel_film(q, omega, eps, stack.thickness);
}

namespace {

// Radial integration of kernel(q, k_z) q dq / k_z weighted by e^{i k_z Z},
// split at q = k0: q = k0 sin(phi) on the propagating side and
// q = k0 cosh(s) on the evanescent side.
template <class Kernel, class T = std::invoke_result_t<Kernel, double, cplx>>
T radial_integral(double omega, double Z, double q_max, const QuadratureSpec& quad, Kernel&& kernel) {
    const double k0 = omega / phys.c;
    const double s_max = std::acosh(std::max(q_max / k0, 2.0));

    auto evan = [&](double s) -> T {
        const double q = k0 * std::cosh(s);
        const cplx kz(0.0, k0 * std::sinh(s));
        const cplx w = cplx(0.0, -1.0) * k0 * std::cosh(s) * std::exp(-k0 * std::sinh(s) * Z);
        return T(w * kernel(q, kz));
    };
    T total = integrate_adaptive(evan, 0.0, s_max, quad.rel_tol, quad.abs_tol);

    const double evan_norm = quad_norm(total);
    auto prop = [&](double phi) -> T {
        const double q = k0 * std::sin(phi);
        const cplx kz(k0 * std::cos(phi), 0.0);
        const cplx w = k0 * std::sin(phi) * std::exp(cplx(0.0, 1.0) * kz * Z);
        return T(w * kernel(q, kz));
    };
    total = total + integrate_adaptive(prop, 0.0, 0.5 * pi, quad.rel_tol,
                                       std::max(quad.abs_tol, 0.1 * quad.rel_tol * evan_norm));
    return total;
}

Eigen::Matrix3cd gm_coincident(double Z, double omega, const FilmStack& stack,
                               const QuadratureSpec& quad) {
    const double k0 = omega / phys.c;
    const double q_max = quad.q_max_factor / (0.5 * Z);

    auto kernel = [&](double q, cplx kz) -> Eigen::Vector2cd {
        auto [rs, rp] = film_reflection(q, omega, stack);
        Eigen::Vector2cd v;
        v(0) = k0 * k0 * rp - kz * kz * rs;  // xx and yy
        v(1) = 2.0 * q * q * rs;             // zz
        return v;
    };
    const Eigen::Vector2cd I = radial_integral(omega, Z, q_max, quad, kernel);
    const cplx pref = cplx(0.0, 1.0) / (8.0 * pi * k0 * k0);

    Eigen::Matrix3cd g = Eigen::Matrix3cd::Zero();
    g(0, 0) = g(1, 1) = pref * I(0);
    g(2, 2) = pref * I(1);
    return g;
}

int angular_count(const QuadratureSpec& quad, double z) {
    int n = std::max(quad.angular_points, static_cast<int>(std::ceil(1.25 * z)) + 20);
    if (n % 2) ++n;
    return n;
}

}  // namespace

GreensTensor gm_self(double d, double omega, const FilmStack& stack, const QuadratureSpec& quad) {
    stack.validate();
    quad.validate();
    if (!(d > 0.0)) throw std::domain_error("gm_self: d must be > 0");
    if (!(omega > 0.0)) throw std::domain_error("gm_self: omega must be > 0");

    GreensTensor g;
    g.value = gm_coincident(2.0 * d, omega, stack, quad);
    g.r_i = g.r_j = Eigen::Vector3d(0.0, 0.0, d);
    g.omega = omega;
    return g;
}

GreensTensor gm_cross(const Eigen::Vector3d& r_i, const Eigen::Vector3d& r_j, double omega,
                      const FilmStack& stack, const QuadratureSpec& quad, CrossMethod method) {
    stack.validate();
    quad.validate();
    if (!(r_i.z() > 0.0) || !(r_j.z() > 0.0)) {
        throw std::domain_error("gm_cross: both points must be above the film (z > 0)");
    }
    if (!(omega > 0.0)) throw std::domain_error("gm_cross: omega must be > 0");

    const double k0 = omega / phys.c;
    const double Z = r_i.z() + r_j.z();
    const Eigen::Vector2d rho_vec(r_i.x() - r_j.x(), r_i.y() - r_j.y());
    const double rho = rho_vec.norm();
    const double q_max = quad.q_max_factor / std::min(std::min(r_i.z(), r_j.z()), Z);

    GreensTensor g;
    g.r_i = r_i;
    g.r_j = r_j;
    g.omega = omega;

    if (rho < 1e-15 * Z) {
        g.value = gm_coincident(Z, omega, stack, quad);
        return g;
    }

    const cplx pref = cplx(0.0, 1.0) / (8.0 * pi * pi);

    if (method == CrossMethod::direct2d) {
        const double cos_a = rho_vec.x() / rho;
        const double sin_a = rho_vec.y() / rho;
        auto kernel = [&](double q, cplx kz) -> Eigen::Matrix3cd {
            auto [rs, rp] = film_reflection(q, omega, stack);
            const int n = angular_count(quad, q * rho);
            const double dpsi = two_pi / n;
            Eigen::Matrix3cd acc = Eigen::Matrix3cd::Zero();
            for (int kphi = 0; kphi < n; ++kphi) {
                const double psi = dpsi * kphi;
                // Angle measured in the lab frame; the in-plane separation has
                // direction (cos_a, sin_a).
                const double cx = std::cos(psi), sy = std::sin(psi);
                const double qx = q * cx, qy = q * sy;
                const double dot = qx * rho * cos_a + qy * rho * sin_a;
                const cplx ph = std::exp(cplx(0.0, dot));
                const double q2 = q * q;
                Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
                const cplx wp = rp / q2;
                m(0, 0) += wp * (qy * qy);
                m(0, 1) += wp * (-qx * qy);
                m(1, 0) += wp * (-qx * qy);
                m(1, 1) += wp * (qx * qx);
                const cplx ws = rs / (k0 * k0 * q2);
                const cplx kz2 = kz * kz;
                m(0, 0) += ws * (-qx * qx * kz2);
                m(0, 1) += ws * (-qx * qy * kz2);
                m(1, 0) += ws * (-qx * qy * kz2);
                m(1, 1) += ws * (-qy * qy * kz2);
                m(0, 2) += ws * (-qx * kz * q2);
                m(1, 2) += ws * (-qy * kz * q2);
                m(2, 0) += ws * (q2 * qx * kz);
                m(2, 1) += ws * (q2 * qy * kz);
                m(2, 2) += ws * (q2 * q2);
                acc += ph * m;
            }
            return Eigen::Matrix3cd(dpsi * acc);
        };
        g.value = pref * radial_integral(omega, Z, q_max, quad, kernel);
        return g;
    }

    // Bessel fast path: angular integrals reduce to J0 and J1 in the frame
    // with the separation along +x, then rotate back.
    auto kernel = [&](double q, cplx kz) -> Eigen::Vector4cd {
        auto [rs, rp] = film_reflection(q, omega, stack);
        const double z = q * rho;
        const double j0 = std::cyl_bessel_j(0, z);
        const double j1 = std::cyl_bessel_j(1, z);
        const double j1z = (z < 1e-8) ? 0.5 - z * z / 16.0 : j1 / z;
        const cplx ws = rs * kz * kz / (k0 * k0);
        Eigen::Vector4cd v;
        v(0) = two_pi * (rp * j1z - ws * (j0 - j1z));            // xx'
        v(1) = two_pi * (rp * (j0 - j1z) - ws * j1z);            // yy'
        v(2) = two_pi * rs * q * q / (k0 * k0) * j0;             // zz'
        v(3) = -two_pi * cplx(0.0, 1.0) * j1 * rs * kz * q / (k0 * k0);  // xz' = -zx'
        return v;
    };
    const Eigen::Vector4cd I = pref * radial_integral(omega, Z, q_max, quad, kernel);

    Eigen::Matrix3cd rot_frame = Eigen::Matrix3cd::Zero();
    rot_frame(0, 0) = I(0);
    rot_frame(1, 1) = I(1);
    rot_frame(2, 2) = I(2);
    rot_frame(0, 2) = I(3);
    rot_frame(2, 0) = -I(3);

    const double ca = rho_vec.x() / rho;
    const double sa = rho_vec.y() / rho;
    Eigen::Matrix3d R;
    R << ca, -sa, 0.0, sa, ca, 0.0, 0.0, 0.0, 1.0;
    g.value = R.cast<cplx>() * rot_frame * R.transpose().cast<cplx>();
    return g;
}

}  // namespace ewjn
