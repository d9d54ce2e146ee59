#include "emms/em/media.hpp"

#include <cmath>
#include <numbers>

namespace emms::em {

cdouble longitudinal_k(const FloquetModeSet& modes, int q, const Medium& medium,
                       double freq_ghz)
{
    if (!(std::isfinite(medium.eps_r)) || medium.eps_r == 0.0)
        throw InvalidArgument("medium permittivity must be finite and nonzero");
    const double w = 2.0 * std::numbers::pi * freq_ghz * 1e9;
    const double k0 = w / c0;
    const cdouble arg = k0 * k0 * medium.epsilon_r() - modes.kt_norm2(q);
    cdouble kz = std::sqrt(arg);
    // Principal sqrt has Re >= 0; flip onto the decaying branch if needed.
    if (kz.imag() > 0.0)
        kz = -kz;
    return kz;
}

cdouble modal_admittance(const FloquetModeSet& modes, int q, Pol pol,
                         const Medium& medium, double freq_ghz)
{
    const double w = 2.0 * std::numbers::pi * freq_ghz * 1e9;
    const cdouble kz = longitudinal_k(modes, q, medium, freq_ghz);
    if (std::abs(kz) == 0.0)
        throw NumericalError("mode exactly at cutoff (k_z = 0) at " +
                             std::to_string(freq_ghz) + " GHz");
    if (pol == Pol::TE)
        return kz / (w * mu0);
    return w * eps0 * medium.epsilon_r() / kz;
}

} // namespace emms::em
