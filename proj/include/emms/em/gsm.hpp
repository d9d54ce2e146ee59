#pragma once

#include <Eigen/Dense>

#include "emms/em/media.hpp"

namespace emms::em {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

// Generalized scattering matrix over one mode set at one frequency.
// Amplitudes are tangential-E field coefficients; blocks are (2M)x(2M)
// with TE entries first (mode order), then TM.
struct Gsm {
    MatrixXc s11, s12, s21, s22;
    Medium medium1;     // port 1 side
    Medium medium2;     // port 2 side
    double freq_ghz = 0.0;

    int dim() const { return static_cast<int>(s11.rows()); }
    int mode_count() const { return dim() / 2; }
};

// Diagonal of modal admittances for a medium, in block layout order.
VectorXc admittance_diagonal(const FloquetModeSet& modes, const Medium& medium,
                             double freq_ghz);

// Identity-transmission GSM (star-product identity element).
Gsm identity_gsm(const FloquetModeSet& modes, const Medium& medium, double freq_ghz);

// Homogeneous propagation section of length `thickness_mm`, same medium on
// both ports: S11 = S22 = 0, S12 = S21 = diag(exp(-j k_z d)).
Gsm slab_gsm(const Medium& medium, double thickness_mm, const FloquetModeSet& modes,
             double freq_ghz);

// Planar dielectric interface, per-mode Fresnel response in the
// field-amplitude convention: r = (Ya - Yb)/(Ya + Yb), t = 1 + r.
Gsm interface_gsm(const Medium& medium_a, const Medium& medium_b,
                  const FloquetModeSet& modes, double freq_ghz);

// Redheffer star product. Port-2 medium of `first` must match port-1 medium
// of `second`; frequencies must match. Throws NumericalError if the
// interaction matrix is numerically singular.
Gsm cascade(const Gsm& first, const Gsm& second, const FloquetModeSet& modes);

// Fundamental co-polarized transmission (TE, TM), power-wave normalized.
// Requires air on both ports.
struct Transmission {
    cdouble te;
    cdouble tm;
};
Transmission extract_transmission(const Gsm& g, const FloquetModeSet& modes);

// Blocks rescaled to the power-normalized modal convention
// (sqrt(Y) amplitude scaling per mode, principal branch for complex Y).
// Reciprocal structures satisfy S12 = S21^T in this convention.
Gsm power_normalized(const Gsm& g, const FloquetModeSet& modes);

} // namespace emms::em
