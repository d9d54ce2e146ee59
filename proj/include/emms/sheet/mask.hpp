#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "emms/util/error.hpp"
#include "emms/util/hash.hpp"

namespace emms::sheet {

inline constexpr int kMaskSize = 52;
inline constexpr int kMaskPixels = kMaskSize * kMaskSize;

// 52x52 binary metal pattern of one layer. 1 = metal, 0 = no metal.
// Row index j is the y direction, column index i the x direction; the
// sample point of pixel (i, j) sits at ((i - 26) p/52, (j - 26) p/52)
// relative to the cell center.
class PixelMask {
public:
    PixelMask() : grid_{} {}

    std::uint8_t at(int i, int j) const
    {
        return grid_[static_cast<std::size_t>(j) * kMaskSize + static_cast<std::size_t>(i)];
    }
    void set(int i, int j, bool metal)
    {
        grid_[static_cast<std::size_t>(j) * kMaskSize + static_cast<std::size_t>(i)] =
            metal ? 1 : 0;
    }
    const std::array<std::uint8_t, kMaskPixels>& data() const { return grid_; }
    std::array<std::uint8_t, kMaskPixels>& data() { return grid_; }

    int metal_count() const
    {
        int c = 0;
        for (auto v : grid_)
            c += v;
        return c;
    }

    PixelMask complement() const
    {
        PixelMask out;
        for (std::size_t k = 0; k < kMaskPixels; ++k)
            out.grid_[k] = grid_[k] ? 0 : 1;
        return out;
    }

    void hash_into(Hasher& h) const { h.update(grid_.data(), grid_.size()); }

    bool operator==(const PixelMask&) const = default;

private:
    std::array<std::uint8_t, kMaskPixels> grid_;
};

// Mean absolute pixel difference between two masks, in [0, 1].
inline double mask_distance(const PixelMask& a, const PixelMask& b)
{
    int diff = 0;
    for (std::size_t k = 0; k < kMaskPixels; ++k)
        diff += a.data()[k] != b.data()[k];
    return static_cast<double>(diff) / kMaskPixels;
}

} // namespace emms::sheet
