#pragma once

#include <filesystem>

#include "emms/neural/bundle.hpp"
#include "emms/util/binio.hpp"
#include "json.hpp"

namespace emms::neural {

inline constexpr std::uint32_t kBundleMagic = 0x424d4d45;   // "EMMB"
inline constexpr std::uint32_t kBundleVersion = 1;

// Checkpoint layout: magic, version, JSON metadata header, then one
// (weights, biases) pair per layer in declaration order: encoder trunk,
// mu head, logvar head, decoder, magTE, magTM, phaseTE, phaseTM.
template <typename T>
void save_bundle(const ModelBundle<T>& bundle, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw InvalidArgument("cannot open checkpoint for writing: " + path.string());

    nlohmann::json header;
    header["version"] = kBundleVersion;
    header["scalar"] = std::is_same_v<T, float> ? "f32" : "f64";
    header["latent_dim"] = bundle.arch.latent_dim;
    header["encoder_hidden"] = bundle.arch.encoder_hidden;
    header["decoder_hidden"] = bundle.arch.decoder_hidden;
    header["mag_hidden"] = bundle.arch.mag_hidden;
    header["phase_hidden"] = bundle.arch.phase_hidden;
    header["layer_count"] = bundle.layer_count;
    header["thickness_mm"] = bundle.thickness_mm;
    header["grid"] = {{"f_start_ghz", bundle.grid.f_start_ghz},
                      {"f_stop_ghz", bundle.grid.f_stop_ghz},
                      {"n_points", bundle.grid.n_points}};
    header["alpha"] = bundle.alpha;
    header["beta"] = bundle.beta;
    header["seed"] = bundle.seed;
    header["data_hash"] = bundle.data_hash;

    write_pod<std::uint32_t>(os, kBundleMagic);
    write_pod<std::uint32_t>(os, kBundleVersion);
    write_str(os, header.dump());
    for (const Dense<T>* l : const_cast<ModelBundle<T>&>(bundle).all_layers()) {
        write_vec(os, l->w);
        write_vec(os, l->b);
    }
    if (!os)
        throw InvalidArgument("failed writing checkpoint: " + path.string());
}

template <typename T>
ModelBundle<T> load_bundle(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw InvalidArgument("cannot open checkpoint: " + path.string());
    if (read_pod<std::uint32_t>(is) != kBundleMagic)
        throw InvalidArgument("not a model checkpoint: " + path.string());
    if (read_pod<std::uint32_t>(is) != kBundleVersion)
        throw InvalidArgument("unsupported checkpoint version: " + path.string());

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(read_str(is));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("corrupt checkpoint header: " + std::string(e.what()));
    }
    const std::string want = std::is_same_v<T, float> ? "f32" : "f64";
    if (header.at("scalar").get<std::string>() != want)
        throw InvalidArgument("checkpoint scalar type is " +
                              header.at("scalar").get<std::string>() + ", expected " + want);

    BundleArch arch;
    arch.latent_dim = header.at("latent_dim").get<int>();
    arch.encoder_hidden = header.at("encoder_hidden").get<std::vector<int>>();
    arch.decoder_hidden = header.at("decoder_hidden").get<std::vector<int>>();
    arch.mag_hidden = header.at("mag_hidden").get<std::vector<int>>();
    arch.phase_hidden = header.at("phase_hidden").get<std::vector<int>>();

    ModelBundle<T> bundle;
    bundle.init(arch, header.at("seed").get<std::uint64_t>());
    bundle.layer_count = header.at("layer_count").get<int>();
    bundle.thickness_mm = header.at("thickness_mm").get<double>();
    const auto& g = header.at("grid");
    bundle.grid = em::FrequencyGrid(g.at("f_start_ghz").get<double>(),
                                    g.at("f_stop_ghz").get<double>(),
                                    g.at("n_points").get<int>());
    bundle.alpha = header.at("alpha").get<double>();
    bundle.beta = header.at("beta").get<double>();
    bundle.data_hash = header.at("data_hash").get<std::string>();

    for (Dense<T>* l : bundle.all_layers()) {
        auto w = read_vec<T>(is);
        auto b = read_vec<T>(is);
        if (w.size() != l->w.size() || b.size() != l->b.size())
            throw InvalidArgument("checkpoint tensor shape mismatch: " + path.string());
        l->w = std::move(w);
        l->b = std::move(b);
    }
    return bundle;
}

} // namespace emms::neural
