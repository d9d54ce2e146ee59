#pragma once

#include <atomic>
#include <filesystem>

#include "emms/sheet/solver.hpp"

namespace emms::sheet {

// Content key of one (mask, screen context, mode set, grid, backend) tuple.
std::uint64_t gsm_cache_key(const PixelMask& mask, const ScreenContext& context,
                            const em::FloquetModeSet& modes, const em::FrequencyGrid& grid,
                            const std::string& backend_id);

// On-disk store of solved screen GSMs, one file per key. Hits reproduce the
// stored GSMs bit-exactly; corrupted entries are recomputed and overwritten
// with a warning on stderr. Safe for concurrent readers; duplicate
// concurrent misses may both compute, last write wins.
class GsmCache {
public:
    explicit GsmCache(std::filesystem::path dir);

    std::vector<em::Gsm> solve_or_fetch(const PixelMask& mask, const ScreenContext& context,
                                        const em::FloquetModeSet& modes,
                                        const em::FrequencyGrid& grid,
                                        const SolverBackend& backend);

    const std::filesystem::path& dir() const { return dir_; }
    long solver_invocations() const { return solver_invocations_.load(); }

private:
    std::filesystem::path dir_;
    std::atomic<long> solver_invocations_{0};
    std::atomic<long> tmp_counter_{0};
};

} // namespace emms::sheet
