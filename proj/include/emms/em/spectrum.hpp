#pragma once

#include <cmath>
#include <ostream>
#include <vector>

#include "emms/em/modes.hpp"

namespace emms::em {

// Wrap a phase in degrees to (-180, 180].
inline double wrap_deg(double phi)
{
    phi = std::fmod(phi, 360.0);
    if (phi <= -180.0)
        phi += 360.0;
    else if (phi > 180.0)
        phi -= 360.0;
    return phi;
}

// Degrees in (-180, 180] <-> normalized phase channel in (0, 1].
inline double normalize_phase_deg(double phi) { return (wrap_deg(phi) + 180.0) / 360.0; }
inline double denormalize_phase(double p) { return p * 360.0 - 180.0; }

// Per-frequency TE/TM transmission, stored as magnitude plus normalized
// phase channels. Channel order matches dataset storage:
// magTE, phaseTE, magTM, phaseTM.
struct SpectrumLabel {
    FrequencyGrid grid;
    std::vector<double> mag_te, phase_te, mag_tm, phase_tm;

    explicit SpectrumLabel(const FrequencyGrid& g = FrequencyGrid())
        : grid(g),
          mag_te(static_cast<std::size_t>(g.n_points), 0.0),
          phase_te(static_cast<std::size_t>(g.n_points), 0.5),
          mag_tm(static_cast<std::size_t>(g.n_points), 0.0),
          phase_tm(static_cast<std::size_t>(g.n_points), 0.5)
    {
    }

    int n_points() const { return grid.n_points; }
};

// CSV export: frequency_GHz, magTE, phaseTE_deg, magTM, phaseTM_deg.
inline void write_spectrum_csv(std::ostream& os, const SpectrumLabel& s)
{
    os << "frequency_GHz,magTE,phaseTE_deg,magTM,phaseTM_deg\n";
    for (int i = 0; i < s.n_points(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        os << s.grid.freq_ghz(i) << ',' << s.mag_te[k] << ','
           << wrap_deg(denormalize_phase(s.phase_te[k])) << ',' << s.mag_tm[k] << ','
           << wrap_deg(denormalize_phase(s.phase_tm[k])) << '\n';
    }
}

} // namespace emms::em
