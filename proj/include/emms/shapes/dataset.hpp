#pragma once

#include <filesystem>

#include "emms/shapes/stack.hpp"

namespace emms::shapes {

// Bit-packed image pair (outer then second layer, 5408 bits) for fast
// nearest-match scans.
struct PackedPair {
    std::array<std::uint64_t, 85> bits{};

    static PackedPair pack(const sheet::PixelMask& outer, const sheet::PixelMask& second);
    int hamming(const PackedPair& other) const;
};

// Single bit-packed mask (2704 bits) for per-layer catalog matching.
struct PackedMask {
    std::array<std::uint64_t, 43> bits{};

    static PackedMask pack(const sheet::PixelMask& mask);
    int hamming(const PackedMask& other) const;
};

struct DatasetConfig {
    int layer_count = 2;
    double thickness_mm = 1.575;
    int count = 2000;
    std::uint64_t seed = 1;
    em::FrequencyGrid grid;
};

struct DatasetSample {
    int outer_index = 0;     // into catalog_outer()
    int second_index = 0;    // into catalog_outer() (dual) or catalog_middle() (3-layer)
    EmmsDesign design;
    em::SpectrumLabel label;
};

struct Dataset {
    DatasetConfig config;
    std::string backend_id;
    std::vector<PrimitiveSpec> outer_catalog;
    std::vector<PrimitiveSpec> second_catalog;
    std::vector<DatasetSample> samples;
    std::vector<PackedPair> packed;   // parallel to samples

    int count() const { return static_cast<int>(samples.size()); }
    void rebuild_packed();
};

// Draw `count` unique (outer, second) catalog combinations from the seeded
// counter-based stream and label them through stack_gsm. Fully reproducible
// from the seed; sample i's draws depend only on (seed, i) plus the dedup
// pass, which is serial and deterministic.
Dataset generate_dataset(const DatasetConfig& config, const StackEvaluator& eval);

// Directory layout: manifest.json, images.bin (2 x 2704 bytes per sample),
// labels.bin (n_points x 4 float32 per sample: magTE, phaseTE, magTM,
// phaseTM blocks).
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

// Exhaustive minimum mean absolute pixel difference over the concatenated
// layer images. Returns (distance, index).
std::pair<double, int> nearest_match(const PackedPair& query,
                                     const std::vector<PackedPair>& pool);
std::pair<double, int> nearest_match(const PackedMask& query,
                                     const std::vector<PackedMask>& pool);

} // namespace emms::shapes
