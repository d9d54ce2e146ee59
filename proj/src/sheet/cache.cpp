#include "emms/sheet/cache.hpp"

#include <cstdio>
#include <fstream>

#include "emms/util/binio.hpp"

namespace emms::sheet {

namespace {

constexpr std::uint32_t kMagic = 0x454d4731; // "EMG1"
constexpr std::uint32_t kVersion = 1;

void write_block(std::ostream& os, const em::MatrixXc& m)
{
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            write_pod<double>(os, m(r, c).real());
            write_pod<double>(os, m(r, c).imag());
        }
}

em::MatrixXc read_block(std::istream& is, int d)
{
    em::MatrixXc m(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            const double re = read_pod<double>(is);
            const double im = read_pod<double>(is);
            m(r, c) = {re, im};
        }
    return m;
}

void hash_modes(Hasher& h, const em::FloquetModeSet& modes)
{
    h.update_value(modes.period_mm());
    h.update_value<std::int32_t>(modes.count());
    for (const auto& md : modes.modes()) {
        h.update_value<std::int32_t>(md.m);
        h.update_value<std::int32_t>(md.n);
    }
}

} // namespace

std::uint64_t gsm_cache_key(const PixelMask& mask, const ScreenContext& context,
                            const em::FloquetModeSet& modes, const em::FrequencyGrid& grid,
                            const std::string& backend_id)
{
    Hasher h;
    mask.hash_into(h);
    context.hash_into(h);
    hash_modes(h, modes);
    h.update_value(grid.f_start_ghz);
    h.update_value(grid.f_stop_ghz);
    h.update_value<std::int32_t>(grid.n_points);
    h.update_string(backend_id);
    return h.digest();
}

GsmCache::GsmCache(std::filesystem::path dir) : dir_(std::move(dir))
{
    std::filesystem::create_directories(dir_);
}

std::vector<em::Gsm> GsmCache::solve_or_fetch(const PixelMask& mask,
                                              const ScreenContext& context,
                                              const em::FloquetModeSet& modes,
                                              const em::FrequencyGrid& grid,
                                              const SolverBackend& backend)
{
    const std::uint64_t key = gsm_cache_key(mask, context, modes, grid, backend.id());
    const auto path = dir_ / (hex64(key) + ".gsm");
    const int d = 2 * modes.count();

    if (std::filesystem::exists(path)) {
        try {
            std::ifstream is(path, std::ios::binary);
            if (read_pod<std::uint32_t>(is) != kMagic ||
                read_pod<std::uint32_t>(is) != kVersion ||
                read_pod<std::uint64_t>(is) != key)
                throw InvalidArgument("header mismatch");
            const double f0 = read_pod<double>(is);
            const double f1 = read_pod<double>(is);
            const auto np = read_pod<std::int32_t>(is);
            const auto dim = read_pod<std::int32_t>(is);
            if (f0 != grid.f_start_ghz || f1 != grid.f_stop_ghz ||
                np != grid.n_points || dim != d)
                throw InvalidArgument("layout mismatch");
            for (int i = 0; i < modes.count(); ++i) {
                if (read_pod<std::int32_t>(is) != modes.mode(i).m ||
                    read_pod<std::int32_t>(is) != modes.mode(i).n)
                    throw InvalidArgument("mode layout mismatch");
            }
            std::vector<em::Gsm> out(static_cast<std::size_t>(np));
            for (auto& g : out) {
                g.freq_ghz = read_pod<double>(is);
                g.medium1 = context.medium_a;
                g.medium2 = context.medium_b;
                g.s11 = read_block(is, d);
                g.s12 = read_block(is, d);
                g.s21 = read_block(is, d);
                g.s22 = read_block(is, d);
            }
            return out;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: corrupted GSM cache entry %s (%s), recomputing\n",
                         path.string().c_str(), e.what());
        }
    }

    ++solver_invocations_;
    auto out = backend.solve(mask, context, modes, grid);

    const auto tmp =
        path.string() + ".tmp" + std::to_string(tmp_counter_.fetch_add(1));
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw InvalidArgument("GSM cache directory not writable: " + dir_.string());
        write_pod<std::uint32_t>(os, kMagic);
        write_pod<std::uint32_t>(os, kVersion);
        write_pod<std::uint64_t>(os, key);
        write_pod<double>(os, grid.f_start_ghz);
        write_pod<double>(os, grid.f_stop_ghz);
        write_pod<std::int32_t>(os, grid.n_points);
        write_pod<std::int32_t>(os, d);
        for (const auto& md : modes.modes()) {
            write_pod<std::int32_t>(os, md.m);
            write_pod<std::int32_t>(os, md.n);
        }
        for (const auto& g : out) {
            write_pod<double>(os, g.freq_ghz);
            write_block(os, g.s11);
            write_block(os, g.s12);
            write_block(os, g.s21);
            write_block(os, g.s22);
        }
    }
    std::filesystem::rename(tmp, path);
    return out;
}

} // namespace emms::sheet
