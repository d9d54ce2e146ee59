#pragma once

#include <array>
#include <vector>

#include "emms/util/error.hpp"

namespace emms::em {

// Uniform, endpoint-inclusive frequency sweep in GHz.
struct FrequencyGrid {
    double f_start_ghz = 15.0;
    double f_stop_ghz = 31.0;
    int n_points = 33;

    FrequencyGrid() = default;
    FrequencyGrid(double start, double stop, int n)
        : f_start_ghz(start), f_stop_ghz(stop), n_points(n)
    {
        if (!(f_start_ghz < f_stop_ghz))
            throw InvalidArgument("frequency grid requires f_start < f_stop");
        if (n_points < 2)
            throw InvalidArgument("frequency grid requires at least 2 points");
    }

    double freq_ghz(int i) const
    {
        return f_start_ghz + (f_stop_ghz - f_start_ghz) * i / (n_points - 1);
    }

    // Frequency mapped to [0, 1]; predictor input convention.
    double normalized(double f_ghz) const
    {
        return (f_ghz - f_start_ghz) / (f_stop_ghz - f_start_ghz);
    }

    std::vector<double> points() const
    {
        std::vector<double> p(static_cast<std::size_t>(n_points));
        for (int i = 0; i < n_points; ++i)
            p[static_cast<std::size_t>(i)] = freq_ghz(i);
        return p;
    }

    bool operator==(const FrequencyGrid&) const = default;
};

// One Floquet harmonic (m, n) with transverse wavevector 2*pi*(m, n)/period.
struct Mode {
    int m = 0;
    int n = 0;
    bool operator==(const Mode&) const = default;
};

enum class Pol { TE, TM };

// Ordered harmonic set shared by every GSM of one model. Ordering is
// ascending |k_t|^2, then m, then n; the fundamental is always first.
// Block layout downstream: all TE entries in mode order, then all TM.
class FloquetModeSet {
public:
    FloquetModeSet(double period_mm, int count);

    double period_mm() const { return period_mm_; }
    double period_m() const { return period_mm_ * 1e-3; }
    int count() const { return static_cast<int>(modes_.size()); }
    const std::vector<Mode>& modes() const { return modes_; }
    const Mode& mode(int q) const { return modes_[static_cast<std::size_t>(q)]; }

    // Transverse wavevector in rad/m.
    std::array<double, 2> kt(int q) const;
    double kt_norm2(int q) const;

    // Transverse polarization unit vectors. At the fundamental (k_t = 0)
    // the convention is TM -> x, TE -> y.
    std::array<double, 2> unit_te(int q) const;
    std::array<double, 2> unit_tm(int q) const;

    bool operator==(const FloquetModeSet&) const = default;

private:
    double period_mm_;
    std::vector<Mode> modes_;
};

inline FloquetModeSet build_mode_set(double period_mm, int count)
{
    return FloquetModeSet(period_mm, count);
}

} // namespace emms::em
