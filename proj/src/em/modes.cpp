#include "emms/em/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace emms::em {

FloquetModeSet::FloquetModeSet(double period_mm, int count) : period_mm_(period_mm)
{
    if (!(period_mm > 0.0))
        throw InvalidArgument("unit cell period must be positive");
    if (count < 1)
        throw InvalidArgument("mode count must be at least 1");

    // Enumerate a square of harmonics large enough to contain the first
    // `count` by |k_t|^2, then sort with the deterministic tie-break.
    int radius = 1;
    while ((2 * radius + 1) * (2 * radius + 1) < 4 * count)
        ++radius;
    std::vector<Mode> all;
    for (int m = -radius; m <= radius; ++m)
        for (int n = -radius; n <= radius; ++n)
            all.push_back({m, n});
    std::stable_sort(all.begin(), all.end(), [](const Mode& a, const Mode& b) {
        const long na = static_cast<long>(a.m) * a.m + static_cast<long>(a.n) * a.n;
        const long nb = static_cast<long>(b.m) * b.m + static_cast<long>(b.n) * b.n;
        if (na != nb)
            return na < nb;
        if (a.m != b.m)
            return a.m < b.m;
        return a.n < b.n;
    });
    modes_.assign(all.begin(), all.begin() + count);
}

std::array<double, 2> FloquetModeSet::kt(int q) const
{
    const double k = 2.0 * std::numbers::pi / period_m();
    const Mode& md = mode(q);
    return {k * md.m, k * md.n};
}

double FloquetModeSet::kt_norm2(int q) const
{
    const auto k = kt(q);
    return k[0] * k[0] + k[1] * k[1];
}

std::array<double, 2> FloquetModeSet::unit_te(int q) const
{
    const Mode& md = mode(q);
    if (md.m == 0 && md.n == 0)
        return {0.0, 1.0};
    const double norm = std::hypot(static_cast<double>(md.m), static_cast<double>(md.n));
    // z x k_hat
    return {-md.n / norm, md.m / norm};
}

std::array<double, 2> FloquetModeSet::unit_tm(int q) const
{
    const Mode& md = mode(q);
    if (md.m == 0 && md.n == 0)
        return {1.0, 0.0};
    const double norm = std::hypot(static_cast<double>(md.m), static_cast<double>(md.n));
    return {md.m / norm, md.n / norm};
}

} // namespace emms::em
