#pragma once

#include <memory>

#include "emms/em/gsm.hpp"
#include "emms/sheet/mask.hpp"

namespace emms::sheet {

// Media surrounding a patterned screen plus the metal model. The metal is a
// large finite sheet admittance; |Y_metal| should dominate the fundamental
// modal admittance by >= 1e4.
struct ScreenContext {
    em::Medium medium_a;   // port 1 side
    em::Medium medium_b;   // port 2 side
    em::cdouble y_metal = {1e3, 0.0};   // S per square

    void hash_into(Hasher& h) const
    {
        h.update_value(medium_a.eps_r);
        h.update_value(medium_a.tan_delta);
        h.update_value(medium_b.eps_r);
        h.update_value(medium_b.tan_delta);
        h.update_value(y_metal.real());
        h.update_value(y_metal.imag());
    }
};

// Mode-coupling matrix of the pixelwise sheet admittance profile.
// Entry (q, q') = Yhat(m_q - m_q', n_q - n_q') * (e_q . e_q'), where Yhat is
// the 2-D Fourier coefficient of Y_metal * mask over the unit cell with the
// phase origin at the cell center. Frequency-independent; the frequency
// argument is kept for interface uniformity.
em::MatrixXc coupling_matrix(const PixelMask& mask, const ScreenContext& context,
                             const em::FloquetModeSet& modes, double freq_ghz);

// Patterned sheet-admittance modal solve:
//   (Y_A + Y_B + G) E = 2 Y_A a   per incident mode from side A (and B),
// assembled into all four GSM blocks. Throws NumericalError if the system
// is numerically singular.
em::Gsm screen_gsm(const PixelMask& mask, const ScreenContext& context,
                   const em::FloquetModeSet& modes, double freq_ghz);

// Pluggable mask -> per-frequency GSM backend. Downstream modules depend
// only on this interface.
class SolverBackend {
public:
    virtual ~SolverBackend() = default;
    virtual std::string id() const = 0;
    virtual std::vector<em::Gsm> solve(const PixelMask& mask, const ScreenContext& context,
                                       const em::FloquetModeSet& modes,
                                       const em::FrequencyGrid& grid) const = 0;
};

class SheetAdmittanceSolver final : public SolverBackend {
public:
    std::string id() const override { return "sheet-admittance-v1"; }
    std::vector<em::Gsm> solve(const PixelMask& mask, const ScreenContext& context,
                               const em::FloquetModeSet& modes,
                               const em::FrequencyGrid& grid) const override;
};

} // namespace emms::sheet
