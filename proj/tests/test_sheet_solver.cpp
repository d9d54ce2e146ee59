#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>

#include "emms/sheet/cache.hpp"
#include "emms/shapes/raster.hpp"

using namespace emms;
using em::cdouble;

namespace {

constexpr double kPeriodMm = 5.3;

sheet::PixelMask full_mask()
{
    sheet::PixelMask m;
    for (int j = 0; j < sheet::kMaskSize; ++j)
        for (int i = 0; i < sheet::kMaskSize; ++i)
            m.set(i, j, true);
    return m;
}

// Direct double-sum DFT oracle for the coupling matrix, independent of the
// solver's separable implementation. Phase origin at the cell center,
// matching the mask's sample-point convention.
em::MatrixXc coupling_oracle(const sheet::PixelMask& mask, cdouble y_metal,
                             const em::FloquetModeSet& modes)
{
    const int m_count = modes.count();
    const int dim = 2 * m_count;
    auto fourier = [&](int du, int dv) {
        cdouble acc = 0;
        for (int j = 0; j < sheet::kMaskSize; ++j)
            for (int i = 0; i < sheet::kMaskSize; ++i)
                if (mask.at(i, j)) {
                    const double phase = -2.0 * M_PI *
                                         (du * (i - 26) + dv * (j - 26)) / sheet::kMaskSize;
                    acc += std::polar(1.0, phase);
                }
        return y_metal * acc / static_cast<double>(sheet::kMaskPixels);
    };
    auto evec = [&](int idx) {
        return idx < m_count ? modes.unit_te(idx) : modes.unit_tm(idx - m_count);
    };
    auto mode_of = [&](int idx) { return idx < m_count ? idx : idx - m_count; };

    em::MatrixXc g(dim, dim);
    for (int p = 0; p < dim; ++p)
        for (int q = 0; q < dim; ++q) {
            const auto& mp = modes.mode(mode_of(p));
            const auto& mq = modes.mode(mode_of(q));
            const auto ep = evec(p);
            const auto eq = evec(q);
            const double dot = ep[0] * eq[0] + ep[1] * eq[1];
            g(p, q) = fourier(mp.m - mq.m, mp.n - mq.n) * dot;
        }
    return g;
}

double gsm_max_diff(const em::Gsm& a, const em::Gsm& b)
{
    double worst = 0;
    worst = std::max(worst, (a.s11 - b.s11).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a.s12 - b.s12).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a.s21 - b.s21).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a.s22 - b.s22).cwiseAbs().maxCoeff());
    return worst;
}

} // namespace

TEST_CASE("coupling matrix: uniform metal is diagonal Y_metal")
{
    const auto modes = em::build_mode_set(kPeriodMm, 6);
    const sheet::ScreenContext ctx{em::air(), em::air(), {1e3, 0.0}};
    const auto g = sheet::coupling_matrix(full_mask(), ctx, modes, 20.0);
    REQUIRE(g.rows() == 12);
    for (int p = 0; p < 12; ++p)
        for (int q = 0; q < 12; ++q) {
            if (p == q)
                CHECK(std::abs(g(p, q) - cdouble(1e3, 0.0)) < 1e-9);
            else
                CHECK(std::abs(g(p, q)) < 1e-9);
        }
}

TEST_CASE("coupling matrix: single-pixel impulse and double-sum oracle")
{
    const auto modes = em::build_mode_set(kPeriodMm, 6);
    const sheet::ScreenContext ctx{em::air(), em::air(), {1e3, 0.0}};
    sheet::PixelMask m;
    m.set(3, 40, true);

    const auto g = sheet::coupling_matrix(m, ctx, modes, 20.0);
    const auto oracle = coupling_oracle(m, ctx.y_metal, modes);
    CHECK((g - oracle).cwiseAbs().maxCoeff() < 1e-12);

    // Every nonzero-dot entry of an impulse has magnitude Ym/52^2 * |e.e'|.
    const double unit = 1e3 / sheet::kMaskPixels;
    auto evec = [&](int idx) {
        return idx < 6 ? modes.unit_te(idx) : modes.unit_tm(idx - 6);
    };
    for (int p = 0; p < 12; ++p)
        for (int q = 0; q < 12; ++q) {
            const auto ep = evec(p);
            const auto eq = evec(q);
            const double dot = std::abs(ep[0] * eq[0] + ep[1] * eq[1]);
            CHECK(std::abs(g(p, q)) == doctest::Approx(unit * dot).epsilon(1e-9));
        }
}

TEST_CASE("coupling matrix: Hermitian for real sheet admittance")
{
    const auto modes = em::build_mode_set(kPeriodMm, 6);
    const sheet::ScreenContext ctx{em::air(), em::rogers5880(), {1e3, 0.0}};
    const auto spec = shapes::catalog_outer()[137];
    const auto g = sheet::coupling_matrix(shapes::rasterize(spec), ctx, modes, 20.0);
    CHECK((g - g.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("screen GSM: empty mask equals the bare interface")
{
    const auto modes = em::build_mode_set(kPeriodMm, 6);
    const sheet::ScreenContext ctx{em::air(), em::rogers5880(), {1e3, 0.0}};
    const auto g = sheet::screen_gsm(sheet::PixelMask(), ctx, modes, 20.0);
    const auto iface = em::interface_gsm(em::air(), em::rogers5880(), modes, 20.0);
    CHECK(gsm_max_diff(g, iface) < 1e-10);
}

TEST_CASE("screen GSM: uniform sheet closed form")
{
    const auto modes = em::build_mode_set(kPeriodMm, 6);
    const cdouble ym{1e3, 0.0};
    const sheet::ScreenContext ctx{em::air(), em::air(), ym};
    const auto g = sheet::screen_gsm(full_mask(), ctx, modes, 20.0);
    const cdouble y0 = em::modal_admittance(modes, 0, em::Pol::TE, em::air(), 20.0);
    const cdouble r = -ym / (2.0 * y0 + ym);
    const cdouble t = 2.0 * y0 / (2.0 * y0 + ym);
    for (int idx : {0, 6}) {
        CHECK(std::abs(g.s11(idx, idx) - r) < 1e-10);
        CHECK(std::abs(g.s21(idx, idx) - t) < 1e-10);
    }
    // Full metal screen: essentially no transmission.
    CHECK(std::abs(g.s21(0, 0)) < 1e-3);
}

TEST_CASE("screen GSM: reciprocity and passivity properties")
{
    const auto modes = em::build_mode_set(kPeriodMm, 6);
    const auto catalog = shapes::catalog_outer();
    // Purely reactive metal model: exactly lossless screen.
    const sheet::ScreenContext reactive{em::air(), em::air(), {0.0, 1e3}};
    for (int idx : {5, 120, 300, 401}) {
        const auto mask = shapes::rasterize(catalog[static_cast<std::size_t>(idx)]);
        const auto g = sheet::screen_gsm(mask, reactive, modes, 24.0);
        const auto pn = em::power_normalized(g, modes);
        CHECK((pn.s12 - pn.s21.transpose()).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((pn.s11 - pn.s11.transpose()).cwiseAbs().maxCoeff() < 1e-8);
        for (int i : {0, 6}) {
            const double power = std::norm(pn.s11(i, i)) + std::norm(pn.s21(i, i));
            CHECK(power <= 1.0 + 1e-8);
        }
    }
}

TEST_CASE("x-y symmetric mask decouples polarizations identically")
{
    const auto modes = em::build_mode_set(kPeriodMm, 6);
    const sheet::ScreenContext ctx{em::air(), em::air(), {1e3, 0.0}};
    // Symmetric Jerusalem cross: l_x = l_y.
    shapes::PrimitiveSpec spec;
    spec.family = shapes::Family::JC;
    spec.l_x = spec.l_y = 3.0;
    const auto mask = shapes::rasterize(spec);
    // Sanity: mask is x<->y swap invariant.
    for (int j = 0; j < sheet::kMaskSize; ++j)
        for (int i = 0; i < sheet::kMaskSize; ++i)
            REQUIRE(mask.at(i, j) == mask.at(j, i));

    const auto g = sheet::screen_gsm(mask, ctx, modes, 22.0);
    CHECK(std::abs(g.s21(0, 0) - g.s21(6, 6)) < 1e-8);
    CHECK(std::abs(g.s11(0, 0) - g.s11(6, 6)) < 1e-8);
}

TEST_CASE("solver backend interface")
{
    const sheet::SheetAdmittanceSolver backend;
    CHECK(backend.id() == "sheet-admittance-v1");
    const auto modes = em::build_mode_set(kPeriodMm, 6);
    const em::FrequencyGrid grid(15.0, 31.0, 5);
    const sheet::ScreenContext ctx{em::air(), em::rogers5880(), {1e3, 0.0}};
    const auto gsms = backend.solve(sheet::PixelMask(), ctx, modes, grid);
    REQUIRE(static_cast<int>(gsms.size()) == grid.n_points);
    for (int i = 0; i < grid.n_points; ++i)
        CHECK(gsms[static_cast<std::size_t>(i)].freq_ghz ==
              doctest::Approx(grid.freq_ghz(i)));
}

TEST_CASE("GSM cache contract")
{
    const auto modes = em::build_mode_set(kPeriodMm, 6);
    const em::FrequencyGrid grid(15.0, 31.0, 5);
    const sheet::ScreenContext ctx{em::air(), em::rogers5880(), {1e3, 0.0}};
    const sheet::SheetAdmittanceSolver backend;
    const auto mask = shapes::rasterize(shapes::catalog_outer()[42]);

    const auto dir = std::filesystem::temp_directory_path() /
                     ("emms-cache-test-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    sheet::GsmCache cache(dir);

    SUBCASE("hit performs no solver invocation and is bit-exact")
    {
        const auto first = cache.solve_or_fetch(mask, ctx, modes, grid, backend);
        CHECK(cache.solver_invocations() == 1);
        const auto second = cache.solve_or_fetch(mask, ctx, modes, grid, backend);
        CHECK(cache.solver_invocations() == 1);
        REQUIRE(first.size() == second.size());
        for (std::size_t i = 0; i < first.size(); ++i) {
            CHECK(first[i].s11 == second[i].s11);
            CHECK(first[i].s12 == second[i].s12);
            CHECK(first[i].s21 == second[i].s21);
            CHECK(first[i].s22 == second[i].s22);
        }
        // And matches a direct solve entrywise.
        const auto direct = backend.solve(mask, ctx, modes, grid);
        for (std::size_t i = 0; i < first.size(); ++i)
            CHECK(gsm_max_diff(first[i], direct[i]) == 0.0);
    }

    SUBCASE("one-pixel masks key differently")
    {
        auto other = mask;
        other.set(0, 0, !other.at(0, 0));
        CHECK(sheet::gsm_cache_key(mask, ctx, modes, grid, backend.id()) !=
              sheet::gsm_cache_key(other, ctx, modes, grid, backend.id()));
    }

    SUBCASE("context changes the key")
    {
        sheet::ScreenContext other = ctx;
        other.y_metal = {0.0, 1e3};
        CHECK(sheet::gsm_cache_key(mask, ctx, modes, grid, backend.id()) !=
              sheet::gsm_cache_key(mask, other, modes, grid, backend.id()));
    }

    SUBCASE("corrupted entry recomputed with identical result")
    {
        const auto first = cache.solve_or_fetch(mask, ctx, modes, grid, backend);
        CHECK(cache.solver_invocations() == 1);
        // Truncate the only cache file.
        bool corrupted = false;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            std::ofstream os(entry.path(), std::ios::binary | std::ios::trunc);
            os << "garbage";
            corrupted = true;
        }
        REQUIRE(corrupted);
        const auto again = cache.solve_or_fetch(mask, ctx, modes, grid, backend);
        CHECK(cache.solver_invocations() == 2);
        for (std::size_t i = 0; i < first.size(); ++i)
            CHECK(gsm_max_diff(first[i], again[i]) == 0.0);
    }

    std::filesystem::remove_all(dir);
}
