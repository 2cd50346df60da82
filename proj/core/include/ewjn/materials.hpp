#pragma once

#include <complex>
#include <optional>

#include "ewjn/constants.hpp"

namespace ewjn {

using cplx = std::complex<double>;

// Local (wavevector-independent) metal response. The loss channel is supplied
// either by a DC conductivity or by a fixed Im(eps); never both.
struct LocalMetal {
    double eps_real = 1.0;
    std::optional<double> conductivity;       // S/m
    std::optional<double> eps_imag_override;  // dimensionless

    static LocalMetal from_conductivity(double eps_real, double sigma);
    static LocalMetal from_im_eps(double eps_real, double im_eps);
    void validate() const;
};

// Free-electron (Lindhard) metal parameters. All frequencies angular.
struct LindhardMetal {
    double omega_p;  // rad/s
    double nu;       // rad/s
    double v_F;      // m/s

    void validate() const;
};

struct LindhardEps {
    cplx longitudinal;
    cplx transverse;
};

// Relative permittivity eps_r + i sigma/(omega eps_0), time convention
// exp(-i omega t) so passive media have Im(eps) >= 0.
cplx local_permittivity(const LocalMetal& metal, double omega);

// Longitudinal/transverse Lindhard permittivity at (omega, k). k = 0 is a
// domain error; use drude_permittivity for the k -> 0 limit.
LindhardEps lindhard_permittivity(const LindhardMetal& metal, double omega, double k);

// k -> 0 limit of both Lindhard branches: 1 - omega_p^2 / (omega (omega + i nu)).
cplx drude_permittivity(const LindhardMetal& metal, double omega);

// Bose-Einstein occupation at the mean qubit frequency; exactly 0 at T = 0.
double mean_photon_number(double omega_plus, double temperature);

}  // namespace ewjn
