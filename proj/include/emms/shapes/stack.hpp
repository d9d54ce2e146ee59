#pragma once

#include <optional>

#include "emms/em/spectrum.hpp"
#include "emms/sheet/cache.hpp"
#include "emms/shapes/raster.hpp"

#include "json.hpp"

namespace emms::shapes {

// One layer: either a catalog primitive (kept for provenance) or a raw mask.
struct LayerPattern {
    std::optional<PrimitiveSpec> primitive;
    sheet::PixelMask mask;

    static LayerPattern from_primitive(const PrimitiveSpec& spec)
    {
        return {spec, rasterize(spec)};
    }
    static LayerPattern from_mask(const sheet::PixelMask& m) { return {std::nullopt, m}; }
};

// Layer stack description. Three-layer designs are symmetric (top = bottom
// = outer); `second` is the bottom layer of a dual-layer design or the
// middle layer of a three-layer one. Gap thicknesses are equal within one
// design.
struct EmmsDesign {
    int layer_count = 2;                 // 2 or 3
    double gap_thickness_mm = 1.575;     // 0.787 or 1.575
    LayerPattern outer;
    LayerPattern second;

    void validate() const
    {
        if (layer_count != 2 && layer_count != 3)
            throw InvalidArgument("layer count must be 2 or 3");
        if (gap_thickness_mm != 0.787 && gap_thickness_mm != 1.575)
            throw InvalidArgument("dielectric thickness must be 0.787 or 1.575 mm");
    }
};

nlohmann::json design_to_json(const EmmsDesign& design);
EmmsDesign design_from_json(const nlohmann::json& j);

// Shared evaluation context: solver backend, optional GSM cache, mode set
// and metal model. All stack evaluations in one run go through one of these
// so spectra are backend-consistent.
struct StackEvaluator {
    const sheet::SolverBackend& backend;
    sheet::GsmCache* cache = nullptr;    // null: always solve
    em::FloquetModeSet modes;
    em::cdouble y_metal = {1e3, 0.0};
    em::Medium dielectric = em::rogers5880();

    std::vector<em::Gsm> screen(const sheet::PixelMask& mask, const em::Medium& above,
                                const em::Medium& below, const em::FrequencyGrid& grid) const;
};

struct StackResult {
    std::vector<em::Gsm> gsms;   // one per frequency
    em::SpectrumLabel label;
};

// Assemble the full structure GSM per frequency and extract the label.
// Dual layer: screen(air|diel) * slab * screen(diel|air); three layer adds
// the middle screen between two slabs.
StackResult stack_gsm(const EmmsDesign& design, const em::FrequencyGrid& grid,
                      const StackEvaluator& eval);

} // namespace emms::shapes
