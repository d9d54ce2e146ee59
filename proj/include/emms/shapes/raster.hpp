#pragma once

#include "emms/sheet/mask.hpp"
#include "emms/shapes/primitives.hpp"

namespace emms::shapes {

// Centered rendering of one primitive on the 52x52 grid over a 5.3 mm cell.
// Pixel (i, j) samples the point ((i - 26) p/52, (j - 26) p/52); a pixel is
// metal iff its sample point lies inside the metal region. Complementary
// families are the bitwise complement of their base family rendering.
// Throws InvalidArgument if the shape exceeds the unit cell.
sheet::PixelMask rasterize(const PrimitiveSpec& spec);

} // namespace emms::shapes
