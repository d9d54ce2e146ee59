#pragma once

#include <string>
#include <vector>

#include "emms/util/error.hpp"

namespace emms::shapes {

inline constexpr double kCellPeriodMm = 5.3;

// Fixed Jerusalem cross widths; cap length is derived as arm length - 1.6 mm.
inline constexpr double kJcArmWidthMm = 0.4;
inline constexpr double kJcCapWidthMm = 0.45;
inline constexpr double kJcCapShrinkMm = 1.6;

enum class Family { JC, RP, CS, CR, CompJC, CompRP };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// One canonical scatterer. Field use per family:
//   JC / CompJC : l_x, l_y  (arm lengths; widths fixed, cap length derived)
//   RP / CompRP : l_x, l_y  (patch side lengths)
//   CS          : r         (aperture radius in a full metal sheet)
//   CR          : r, w      (ring outer radius and radial width)
struct PrimitiveSpec {
    Family family = Family::RP;
    double l_x = 0.0;
    double l_y = 0.0;
    double r = 0.0;
    double w = 0.0;

    bool operator==(const PrimitiveSpec&) const = default;
};

// Full Cartesian sweep of one family's dimension ranges, deterministic
// order. Counts: JC 100, RP 256, CS 17, CR 49, CompJC 100, CompRP 256.
std::vector<PrimitiveSpec> enumerate_catalog(Family family);

// Outer-layer families (a)-(d): JC, RP, CS, CR concatenated. 422 entries.
std::vector<PrimitiveSpec> catalog_outer();

// Middle-layer families (a)-(f): outer catalog plus CompJC and CompRP.
// 778 entries.
std::vector<PrimitiveSpec> catalog_middle();

} // namespace emms::shapes
