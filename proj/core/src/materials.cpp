#include "ewjn/materials.hpp"

#include <cmath>

#include "ewjn/errors.hpp"

namespace ewjn {

LocalMetal LocalMetal::from_conductivity(double eps_real, double sigma) {
    LocalMetal m;
    m.eps_real = eps_real;
    m.conductivity = sigma;
    m.validate();
    return m;
}

LocalMetal LocalMetal::from_im_eps(double eps_real, double im_eps) {
    LocalMetal m;
    m.eps_real = eps_real;
    m.eps_imag_override = im_eps;
    m.validate();
    return m;
}

void LocalMetal::validate() const {
    if (conductivity.has_value() == eps_imag_override.has_value()) {
        throw std::invalid_argument(
            "LocalMetal: exactly one of {conductivity, eps_imag_override} must be set");
    }
    if (conductivity && *conductivity < 0.0) {
        throw std::invalid_argument("LocalMetal: conductivity must be >= 0");
    }
    if (eps_imag_override && *eps_imag_override < 0.0) {
        throw std::invalid_argument("LocalMetal: eps_imag_override must be >= 0");
    }
}

void LindhardMetal::validate() const {
    if (!(omega_p > 0.0) || !(nu > 0.0) || !(v_F > 0.0)) {
        throw std::invalid_argument("LindhardMetal: omega_p, nu, v_F must all be > 0");
    }
}

cplx local_permittivity(const LocalMetal& metal, double omega) {
    metal.validate();
    if (!(omega > 0.0)) {
        throw std::domain_error("local_permittivity: omega must be > 0");
    }
    const double im = metal.conductivity ? *metal.conductivity / (omega * phys.eps_0)
                                         : *metal.eps_imag_override;
    return {metal.eps_real, im};
}

namespace {

// F_l and F_t evaluated together. Principal-branch log of (u+1)/(u-1); for
// Im(u) > 0 the ratio stays in the lower half plane, so the branch cut is
// never crossed as omega, nu, or k vary. Large |u| switches to the series
// forms to avoid the 1 - (u/2)log(...) cancellation.
void lindhard_f(cplx u, cplx& f_l, cplx& f_t) {
    const double au = std::abs(u);
    if (au > 50.0) {
        const cplx w = 1.0 / (u * u);
        f_l = -w * (1.0 / 3.0 + w * (1.0 / 5.0 + w * (1.0 / 7.0 + w / 9.0)));
        f_t = 1.0 + w * (1.0 / 5.0 + w * (3.0 / 35.0 + w / 21.0));
        return;
    }
    const cplx L = std::log((u + 1.0) / (u - 1.0));
    f_l = 1.0 - 0.5 * u * L;
    f_t = 1.5 * u * u - 0.75 * u * (u * u - 1.0) * L;
}

}  // namespace

LindhardEps lindhard_permittivity(const LindhardMetal& metal, double omega, double k) {
    metal.validate();
    if (!(omega > 0.0)) {
        throw std::domain_error("lindhard_permittivity: omega must be > 0");
    }
    if (!(k > 0.0)) {
        throw std::domain_error("lindhard_permittivity: k must be > 0 (Drude limit is a separate call)");
    }
    const cplx onu(omega, metal.nu);
    const cplx u = onu / (k * metal.v_F);
    cplx f_l, f_t;
    lindhard_f(u, f_l, f_t);

    const double wp2 = metal.omega_p * metal.omega_p;
    LindhardEps eps;
    eps.longitudinal = 1.0 + 3.0 * wp2 / onu * (u * u * f_l) / (omega + cplx(0.0, metal.nu) * f_l);
    eps.transverse = 1.0 - wp2 / (omega * onu) * f_t;
    return eps;
}

cplx drude_permittivity(const LindhardMetal& metal, double omega) {
    metal.validate();
    if (!(omega > 0.0)) {
        throw std::domain_error("drude_permittivity: omega must be > 0");
    }
    return 1.0 - metal.omega_p * metal.omega_p / (omega * cplx(omega, metal.nu));
}

double mean_photon_number(double omega_plus, double temperature) {
    if (!(omega_plus > 0.0)) {
        throw std::domain_error("mean_photon_number: omega_plus must be > 0");
    }
    if (temperature < 0.0) {
        throw std::domain_error("mean_photon_number: temperature must be >= 0");
    }
    if (temperature == 0.0) {
        return 0.0;
    }
    const double x = phys.hbar * omega_plus / (phys.k_B * temperature);
    if (x > 700.0) {
        return 0.0;  // below double underflow anyway
    }
    return 1.0 / std::expm1(x);
}

}  // namespace ewjn
