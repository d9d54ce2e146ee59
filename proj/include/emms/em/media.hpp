#pragma once

#include <complex>

#include "emms/em/modes.hpp"

namespace emms::em {

using cdouble = std::complex<double>;

inline constexpr double c0 = 299792458.0;            // m/s
inline constexpr double mu0 = 1.25663706212e-6;      // H/m
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
inline const double eta0 = 376.730313668;            // ohm

// Homogeneous dielectric half-space or slab material.
struct Medium {
    double eps_r = 1.0;
    double tan_delta = 0.0;

    // e^{+j w t} convention: lossy permittivity carries a negative
    // imaginary part.
    cdouble epsilon_r() const { return {eps_r, -eps_r * tan_delta}; }

    bool operator==(const Medium&) const = default;
};

inline Medium air() { return {1.0, 0.0}; }
inline Medium rogers5880() { return {2.2, 0.0009}; }

// Longitudinal wavenumber of one harmonic, rad/m. Branch: Im(k_z) <= 0 so
// evanescent modes decay away from the screen.
cdouble longitudinal_k(const FloquetModeSet& modes, int q, const Medium& medium,
                       double freq_ghz);

// Modal wave admittance in siemens. TE: k_z/(w mu0); TM: w eps/k_z.
// Throws NumericalError at exact cutoff (k_z = 0).
cdouble modal_admittance(const FloquetModeSet& modes, int q, Pol pol,
                         const Medium& medium, double freq_ghz);

} // namespace emms::em
