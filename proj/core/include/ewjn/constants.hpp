#pragma once

namespace ewjn {

// CODATA-2018 values, frozen here so that derived reference numbers stay
// reproducible. gamma_e is the magnitude of the electron gyromagnetic ratio.
struct PhysicalConstants {
    double hbar;     // J s
    double mu_0;     // H/m
    double eps_0;    // F/m
    double k_B;      // J/K
    double c;        // m/s
    double gamma_e;  // rad s^-1 T^-1
};

constexpr PhysicalConstants codata2018{
    1.054571817e-34,   // hbar
    1.25663706212e-6,  // mu_0
    8.8541878128e-12,  // eps_0
    1.380649e-23,      // k_B
    2.99792458e8,      // c
    1.76085963023e11,  // gamma_e
};

inline constexpr PhysicalConstants phys = codata2018;

constexpr double pi = 3.14159265358979323846;
constexpr double two_pi = 2.0 * pi;

}  // namespace ewjn
