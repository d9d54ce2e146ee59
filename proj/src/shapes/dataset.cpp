#include "emms/shapes/dataset.hpp"

#include <bit>
#include <fstream>
#include <set>

#include "emms/util/parallel.hpp"
#include "emms/util/rng.hpp"

namespace emms::shapes {

namespace {

template <std::size_t W>
void pack_mask_into(const sheet::PixelMask& mask, std::array<std::uint64_t, W>& words,
                    std::size_t bit_offset)
{
    for (int k = 0; k < sheet::kMaskPixels; ++k) {
        if (mask.data()[static_cast<std::size_t>(k)]) {
            const std::size_t b = bit_offset + static_cast<std::size_t>(k);
            words[b / 64] |= 1ULL << (b % 64);
        }
    }
}

} // namespace

PackedPair PackedPair::pack(const sheet::PixelMask& outer, const sheet::PixelMask& second)
{
    PackedPair p;
    pack_mask_into(outer, p.bits, 0);
    pack_mask_into(second, p.bits, sheet::kMaskPixels);
    return p;
}

int PackedPair::hamming(const PackedPair& other) const
{
    int d = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        d += std::popcount(bits[i] ^ other.bits[i]);
    return d;
}

PackedMask PackedMask::pack(const sheet::PixelMask& mask)
{
    PackedMask p;
    pack_mask_into(mask, p.bits, 0);
    return p;
}

int PackedMask::hamming(const PackedMask& other) const
{
    int d = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        d += std::popcount(bits[i] ^ other.bits[i]);
    return d;
}

void Dataset::rebuild_packed()
{
    packed.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        packed[i] = PackedPair::pack(samples[i].design.outer.mask,
                                     samples[i].design.second.mask);
}

Dataset generate_dataset(const DatasetConfig& config, const StackEvaluator& eval)
{
    if (config.count < 1)
        throw InvalidArgument("dataset count must be positive");

    Dataset ds;
    ds.config = config;
    ds.backend_id = eval.backend.id();
    ds.outer_catalog = catalog_outer();
    ds.second_catalog =
        config.layer_count == 3 ? catalog_middle() : catalog_outer();

    const long capacity = static_cast<long>(ds.outer_catalog.size()) *
                          static_cast<long>(ds.second_catalog.size());
    if (config.count > capacity)
        throw InvalidArgument("requested " + std::to_string(config.count) +
                              " samples but only " + std::to_string(capacity) +
                              " distinct combinations exist");

    // Serial dedup pass fixing the combination list; labels computed after.
    std::set<std::pair<int, int>> used;
    std::vector<std::pair<int, int>> combos;
    combos.reserve(static_cast<std::size_t>(config.count));
    for (int i = 0; i < config.count; ++i) {
        auto rng = substream(config.seed, static_cast<std::uint64_t>(i));
        std::uniform_int_distribution<int> du(0, static_cast<int>(ds.outer_catalog.size()) - 1);
        std::uniform_int_distribution<int> dv(0, static_cast<int>(ds.second_catalog.size()) - 1);
        std::pair<int, int> combo;
        int attempts = 0;
        do {
            combo = {du(rng), dv(rng)};
            if (++attempts > 100000)
                throw InvalidArgument("dataset sampling stalled; too close to exhaustion");
        } while (used.contains(combo));
        used.insert(combo);
        combos.push_back(combo);
    }

    // Pre-solve distinct screens serially so the parallel pass below only
    // reads the cache.
    if (eval.cache) {
        std::set<int> outer_ids, second_ids;
        for (auto& [o, s] : combos) {
            outer_ids.insert(o);
            second_ids.insert(s);
        }
        const em::Medium diel = eval.dielectric;
        for (int o : outer_ids) {
            const auto mask = rasterize(ds.outer_catalog[static_cast<std::size_t>(o)]);
            eval.screen(mask, em::air(), diel, config.grid);
            if (config.layer_count == 3)
                eval.screen(mask, diel, em::air(), config.grid);
        }
        for (int s : second_ids) {
            const auto mask = rasterize(ds.second_catalog[static_cast<std::size_t>(s)]);
            if (config.layer_count == 3)
                eval.screen(mask, diel, diel, config.grid);
            else
                eval.screen(mask, diel, em::air(), config.grid);
        }
    }

    ds.samples.resize(static_cast<std::size_t>(config.count));
    parallel_for(0, ds.samples.size(), [&](std::size_t i) {
        DatasetSample& s = ds.samples[i];
        s.outer_index = combos[i].first;
        s.second_index = combos[i].second;
        s.design.layer_count = config.layer_count;
        s.design.gap_thickness_mm = config.thickness_mm;
        s.design.outer = LayerPattern::from_primitive(
            ds.outer_catalog[static_cast<std::size_t>(s.outer_index)]);
        s.design.second = LayerPattern::from_primitive(
            ds.second_catalog[static_cast<std::size_t>(s.second_index)]);
        s.label = stack_gsm(s.design, config.grid, eval).label;
    });

    ds.rebuild_packed();
    return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);

    nlohmann::json manifest;
    manifest["version"] = 1;
    manifest["layer_count"] = ds.config.layer_count;
    manifest["thickness_mm"] = ds.config.thickness_mm;
    manifest["grid"] = {{"f_start_ghz", ds.config.grid.f_start_ghz},
                        {"f_stop_ghz", ds.config.grid.f_stop_ghz},
                        {"n_points", ds.config.grid.n_points}};
    manifest["sample_count"] = ds.count();
    manifest["seed"] = ds.config.seed;
    manifest["solver_backend"] = ds.backend_id;
    manifest["images_file"] = "images.bin";
    manifest["labels_file"] = "labels.bin";
    manifest["bytes_per_image_record"] = 2 * sheet::kMaskPixels;
    manifest["floats_per_label_record"] = 4 * ds.config.grid.n_points;
    nlohmann::json designs = nlohmann::json::array();
    for (const auto& s : ds.samples)
        designs.push_back({s.outer_index, s.second_index});
    manifest["designs"] = std::move(designs);

    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << '\n';

    std::ofstream imgs(dir / "images.bin", std::ios::binary | std::ios::trunc);
    std::ofstream labs(dir / "labels.bin", std::ios::binary | std::ios::trunc);
    for (const auto& s : ds.samples) {
        imgs.write(reinterpret_cast<const char*>(s.design.outer.mask.data().data()),
                   sheet::kMaskPixels);
        imgs.write(reinterpret_cast<const char*>(s.design.second.mask.data().data()),
                   sheet::kMaskPixels);
        auto put = [&](const std::vector<double>& v) {
            for (double x : v) {
                const float f = static_cast<float>(x);
                labs.write(reinterpret_cast<const char*>(&f), sizeof(f));
            }
        };
        put(s.label.mag_te);
        put(s.label.phase_te);
        put(s.label.mag_tm);
        put(s.label.phase_tm);
    }
}

Dataset load_dataset(const std::filesystem::path& dir)
{
    std::ifstream mf(dir / "manifest.json");
    if (!mf)
        throw InvalidArgument("cannot open " + (dir / "manifest.json").string());
    nlohmann::json manifest = nlohmann::json::parse(mf);

    Dataset ds;
    ds.config.layer_count = manifest.at("layer_count").get<int>();
    ds.config.thickness_mm = manifest.at("thickness_mm").get<double>();
    ds.config.grid = em::FrequencyGrid(manifest.at("grid").at("f_start_ghz").get<double>(),
                                       manifest.at("grid").at("f_stop_ghz").get<double>(),
                                       manifest.at("grid").at("n_points").get<int>());
    ds.config.count = manifest.at("sample_count").get<int>();
    ds.config.seed = manifest.at("seed").get<std::uint64_t>();
    ds.backend_id = manifest.at("solver_backend").get<std::string>();
    ds.outer_catalog = catalog_outer();
    ds.second_catalog =
        ds.config.layer_count == 3 ? catalog_middle() : catalog_outer();

    const auto& designs = manifest.at("designs");
    if (static_cast<int>(designs.size()) != ds.config.count)
        throw InvalidArgument("manifest design list does not match sample count");

    std::ifstream imgs(dir / manifest.at("images_file").get<std::string>(), std::ios::binary);
    std::ifstream labs(dir / manifest.at("labels_file").get<std::string>(), std::ios::binary);
    if (!imgs || !labs)
        throw InvalidArgument("dataset binary files missing in " + dir.string());

    ds.samples.resize(static_cast<std::size_t>(ds.config.count));
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        DatasetSample& s = ds.samples[i];
        s.outer_index = designs[i][0].get<int>();
        s.second_index = designs[i][1].get<int>();
        s.design.layer_count = ds.config.layer_count;
        s.design.gap_thickness_mm = ds.config.thickness_mm;
        s.design.outer.primitive = ds.outer_catalog[static_cast<std::size_t>(s.outer_index)];
        s.design.second.primitive =
            ds.second_catalog[static_cast<std::size_t>(s.second_index)];
        imgs.read(reinterpret_cast<char*>(s.design.outer.mask.data().data()),
                  sheet::kMaskPixels);
        imgs.read(reinterpret_cast<char*>(s.design.second.mask.data().data()),
                  sheet::kMaskPixels);
        s.label = em::SpectrumLabel(ds.config.grid);
        auto get = [&](std::vector<double>& v) {
            for (double& x : v) {
                float f = 0;
                labs.read(reinterpret_cast<char*>(&f), sizeof(f));
                x = f;
            }
        };
        get(s.label.mag_te);
        get(s.label.phase_te);
        get(s.label.mag_tm);
        get(s.label.phase_tm);
        if (!imgs || !labs)
            throw InvalidArgument("dataset binary files truncated in " + dir.string());
    }
    ds.rebuild_packed();
    return ds;
}

std::pair<double, int> nearest_match(const PackedPair& query,
                                     const std::vector<PackedPair>& pool)
{
    if (pool.empty())
        throw InvalidArgument("nearest_match: empty comparand set");
    int best = 2 * sheet::kMaskPixels + 1;
    int best_idx = -1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const int d = query.hamming(pool[i]);
        if (d < best) {
            best = d;
            best_idx = static_cast<int>(i);
        }
    }
    return {static_cast<double>(best) / (2 * sheet::kMaskPixels), best_idx};
}

std::pair<double, int> nearest_match(const PackedMask& query,
                                     const std::vector<PackedMask>& pool)
{
    if (pool.empty())
        throw InvalidArgument("nearest_match: empty comparand set");
    int best = sheet::kMaskPixels + 1;
    int best_idx = -1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const int d = query.hamming(pool[i]);
        if (d < best) {
            best = d;
            best_idx = static_cast<int>(i);
        }
    }
    return {static_cast<double>(best) / sheet::kMaskPixels, best_idx};
}

} // namespace emms::shapes
