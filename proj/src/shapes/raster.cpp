#include "emms/shapes/raster.hpp"

#include <cmath>

namespace emms::shapes {

using sheet::kMaskSize;
using sheet::PixelMask;

namespace {

bool in_rect(double x, double y, double cx, double cy, double lx, double ly)
{
    return std::abs(x - cx) <= lx / 2.0 && std::abs(y - cy) <= ly / 2.0;
}

bool jc_inside(double x, double y, double lx, double ly)
{
    const double capx = lx - kJcCapShrinkMm;   // cap extent perpendicular to x-arm
    const double capy = ly - kJcCapShrinkMm;
    // Arms through the center.
    if (in_rect(x, y, 0, 0, lx, kJcArmWidthMm))
        return true;
    if (in_rect(x, y, 0, 0, kJcArmWidthMm, ly))
        return true;
    // End caps, flush with the arm tips so the overall extent stays l_x/l_y.
    const double cxo = lx / 2.0 - kJcCapWidthMm / 2.0;
    const double cyo = ly / 2.0 - kJcCapWidthMm / 2.0;
    if (in_rect(x, y, cxo, 0, kJcCapWidthMm, capx) ||
        in_rect(x, y, -cxo, 0, kJcCapWidthMm, capx))
        return true;
    if (in_rect(x, y, 0, cyo, capy, kJcCapWidthMm) ||
        in_rect(x, y, 0, -cyo, capy, kJcCapWidthMm))
        return true;
    return false;
}

void check_extent(const PrimitiveSpec& s)
{
    const double half = kCellPeriodMm / 2.0;
    switch (s.family) {
    case Family::JC:
    case Family::CompJC:
        if (s.l_x > kCellPeriodMm || s.l_y > kCellPeriodMm ||
            s.l_x <= kJcCapShrinkMm || s.l_y <= kJcCapShrinkMm)
            throw InvalidArgument("Jerusalem cross dimensions out of range");
        break;
    case Family::RP:
    case Family::CompRP:
        if (s.l_x > kCellPeriodMm || s.l_y > kCellPeriodMm || s.l_x <= 0 || s.l_y <= 0)
            throw InvalidArgument("rectangular patch exceeds the unit cell");
        break;
    case Family::CS:
        if (s.r > half || s.r <= 0)
            throw InvalidArgument("circular slot radius out of range");
        break;
    case Family::CR:
        if (s.r > half || s.w <= 0 || s.w >= s.r)
            throw InvalidArgument("ring dimensions out of range");
        break;
    }
}

} // namespace

PixelMask rasterize(const PrimitiveSpec& spec)
{
    check_extent(spec);
    const double step = kCellPeriodMm / kMaskSize;

    const Family base = spec.family == Family::CompJC   ? Family::JC
                        : spec.family == Family::CompRP ? Family::RP
                                                        : spec.family;

    PixelMask mask;
    for (int j = 0; j < kMaskSize; ++j) {
        const double y = (j - kMaskSize / 2) * step;
        for (int i = 0; i < kMaskSize; ++i) {
            const double x = (i - kMaskSize / 2) * step;
            bool metal = false;
            switch (base) {
            case Family::JC:
                metal = jc_inside(x, y, spec.l_x, spec.l_y);
                break;
            case Family::RP:
                metal = in_rect(x, y, 0, 0, spec.l_x, spec.l_y);
                break;
            case Family::CS:
                metal = std::hypot(x, y) > spec.r;
                break;
            case Family::CR: {
                const double rho = std::hypot(x, y);
                metal = rho <= spec.r && rho >= spec.r - spec.w;
                break;
            }
            default:
                break;
            }
            mask.set(i, j, metal);
        }
    }
    if (spec.family == Family::CompJC || spec.family == Family::CompRP)
        return mask.complement();
    return mask;
}

} // namespace emms::shapes
