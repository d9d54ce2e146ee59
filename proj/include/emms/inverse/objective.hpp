#pragma once

#include <vector>

#include "emms/em/spectrum.hpp"

#include "json.hpp"

namespace emms::inverse {

enum class MaskQuantity { MagTE, MagTM, PhaseTE, PhaseTM, PhaseDiff };

std::string quantity_name(MaskQuantity q);
MaskQuantity quantity_from_name(const std::string& name);

// One band constraint: quantity must stay within [min, max] on [f1, f2].
// Magnitudes are linear in [0, 1]; phase quantities are degrees in
// (-180, 180].
struct MaskRow {
    MaskQuantity quantity = MaskQuantity::MagTE;
    double f1_ghz = 0.0;
    double f2_ghz = 0.0;
    double min = 0.0;
    double max = 1.0;
};

struct TargetSpec {
    enum class Mode { Exact, Masks };
    Mode mode = Mode::Exact;
    em::FrequencyGrid grid;
    em::SpectrumLabel exact;        // phases stored as normalized channels
    std::vector<MaskRow> masks;

    TargetSpec() : exact(grid) {}

    void validate() const;
};

nlohmann::json target_to_json(const TargetSpec& target);
TargetSpec target_from_json(const nlohmann::json& j);

// Mean over frequency of the squared differences summed over the four
// channels magTE, magTM, normalized phaseTE, normalized phaseTM.
double exact_objective(const em::SpectrumLabel& candidate, const TargetSpec& target);

// Band-mask penalty: per masked quantity and grid point in band, zero when
// the value lies within [min, max], else 2*|(v - min)*(v - max)|; summed
// over points and rows.
double mask_objective(const em::SpectrumLabel& candidate, const TargetSpec& target);

// Dispatch on target.mode.
double objective(const em::SpectrumLabel& candidate, const TargetSpec& target);

} // namespace emms::inverse
