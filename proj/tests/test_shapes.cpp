#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <unistd.h>

#include "emms/shapes/dataset.hpp"

using namespace emms;

namespace {

constexpr double kPeriodMm = 5.3;

struct TestRig {
    sheet::SheetAdmittanceSolver backend;
    em::FrequencyGrid grid{15.0, 31.0, 5};
    shapes::StackEvaluator eval{backend, nullptr, em::build_mode_set(kPeriodMm, 6),
                                {1e3, 0.0}, em::rogers5880()};
};

em::cdouble airy_transmission(double freq_ghz, double d_mm, const em::Medium& medium)
{
    using em::cdouble;
    const double w = 2.0 * M_PI * freq_ghz * 1e9;
    const double k0 = w / em::c0;
    const cdouble er = medium.epsilon_r();
    cdouble k2 = k0 * std::sqrt(er);
    if (k2.imag() > 0)
        k2 = -k2;
    const cdouble y2 = std::sqrt(er);
    const cdouble r12 = (1.0 - y2) / (1.0 + y2);
    const cdouble tau = std::exp(cdouble(0, -1) * k2 * (d_mm * 1e-3));
    return (1.0 + r12) * (1.0 - r12) * tau / (1.0 - r12 * r12 * tau * tau);
}

} // namespace

TEST_CASE("catalog counts reproduce the canonical table")
{
    CHECK(shapes::enumerate_catalog(shapes::Family::JC).size() == 100);
    CHECK(shapes::enumerate_catalog(shapes::Family::RP).size() == 256);
    CHECK(shapes::enumerate_catalog(shapes::Family::CS).size() == 17);
    CHECK(shapes::enumerate_catalog(shapes::Family::CR).size() == 49);
    CHECK(shapes::enumerate_catalog(shapes::Family::CompJC).size() == 100);
    CHECK(shapes::enumerate_catalog(shapes::Family::CompRP).size() == 256);
    CHECK(shapes::catalog_outer().size() == 422);
    CHECK(shapes::catalog_middle().size() == 778);
    CHECK(422L * 422L == 178084L);
}

TEST_CASE("family names round-trip")
{
    for (auto f : {shapes::Family::JC, shapes::Family::RP, shapes::Family::CS,
                   shapes::Family::CR, shapes::Family::CompJC, shapes::Family::CompRP})
        CHECK(shapes::family_from_name(shapes::family_name(f)) == f);
    CHECK(shapes::family_name(shapes::Family::CompJC) == "compJC");
    CHECK_THROWS_AS(shapes::family_from_name("hexagon"), InvalidArgument);
}

TEST_CASE("rasterization pixel counts")
{
    shapes::PrimitiveSpec rp;
    rp.family = shapes::Family::RP;
    rp.l_x = rp.l_y = 5.0;
    CHECK(shapes::rasterize(rp).metal_count() == 2401);   // 49^2

    shapes::PrimitiveSpec comp = rp;
    comp.family = shapes::Family::CompRP;
    CHECK(shapes::rasterize(comp).metal_count() == 52 * 52 - 2401);
    CHECK(52 * 52 - 2401 == 303);
}

TEST_CASE("ring renders connected and four-fold symmetric")
{
    shapes::PrimitiveSpec cr;
    cr.family = shapes::Family::CR;
    cr.r = 2.6;
    cr.w = 0.1;
    const auto mask = shapes::rasterize(cr);
    CHECK(mask.metal_count() > 0);

    // 90-degree rotation invariance about the cell center: pixel (i, j) maps
    // to (j, 52-1-i) only for odd grids; with the centered sample-point
    // convention the rotation maps sample (i-26, j-26) -> (j-26, 26-i),
    // i.e. pixel (j, 52-i) where index 52 wraps to the boundary. Compare on
    // the interior where both indices are valid.
    for (int j = 1; j < sheet::kMaskSize; ++j)
        for (int i = 1; i < sheet::kMaskSize; ++i)
            CHECK(mask.at(i, j) == mask.at(j, 52 - i));

    // Connectivity of the annulus (8-neighborhood flood fill; at w = 0.1 mm
    // the band is thinner than one pixel pitch, so diagonal adjacency is the
    // meaningful notion of connectedness).
    std::vector<std::pair<int, int>> stack;
    std::set<std::pair<int, int>> seen;
    for (int j = 0; j < 52 && stack.empty(); ++j)
        for (int i = 0; i < 52 && stack.empty(); ++i)
            if (mask.at(i, j))
                stack.push_back({i, j});
    REQUIRE(!stack.empty());
    seen.insert(stack[0]);
    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        const int di[] = {1, -1, 0, 0, 1, 1, -1, -1}, dj[] = {0, 0, 1, -1, 1, -1, 1, -1};
        for (int d = 0; d < 8; ++d) {
            const int ni = i + di[d], nj = j + dj[d];
            if (ni < 0 || nj < 0 || ni >= 52 || nj >= 52 || !mask.at(ni, nj))
                continue;
            if (seen.insert({ni, nj}).second)
                stack.push_back({ni, nj});
        }
    }
    CHECK(static_cast<int>(seen.size()) == mask.metal_count());
}

TEST_CASE("oversized shapes are rejected")
{
    shapes::PrimitiveSpec rp;
    rp.family = shapes::Family::RP;
    rp.l_x = rp.l_y = 6.0;
    CHECK_THROWS_AS(shapes::rasterize(rp), InvalidArgument);

    shapes::PrimitiveSpec cr;
    cr.family = shapes::Family::CR;
    cr.r = 3.0;
    cr.w = 0.1;
    CHECK_THROWS_AS(shapes::rasterize(cr), InvalidArgument);
}

TEST_CASE("rasterize is injective on every family catalog")
{
    for (auto f : {shapes::Family::JC, shapes::Family::RP, shapes::Family::CS,
                   shapes::Family::CR, shapes::Family::CompJC, shapes::Family::CompRP}) {
        const auto specs = shapes::enumerate_catalog(f);
        std::set<std::uint64_t> hashes;
        for (const auto& spec : specs) {
            Hasher h;
            shapes::rasterize(spec).hash_into(h);
            hashes.insert(h.digest());
        }
        CHECK(hashes.size() == specs.size());
    }
}

TEST_CASE("stack: bare slab reproduces the Airy spectrum")
{
    TestRig rig;
    rig.eval.dielectric = {2.2, 0.0};   // lossless for the closed form
    shapes::EmmsDesign design;
    design.layer_count = 2;
    design.gap_thickness_mm = 1.575;
    design.outer = shapes::LayerPattern::from_mask(sheet::PixelMask());
    design.second = shapes::LayerPattern::from_mask(sheet::PixelMask());

    const auto result = shapes::stack_gsm(design, rig.grid, rig.eval);
    for (int i = 0; i < rig.grid.n_points; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const auto expect =
            airy_transmission(rig.grid.freq_ghz(i), 1.575, rig.eval.dielectric);
        CHECK(result.label.mag_te[k] == doctest::Approx(std::abs(expect)).epsilon(1e-8));
        CHECK(result.label.mag_tm[k] == doctest::Approx(std::abs(expect)).epsilon(1e-8));
        const double phase = em::wrap_deg(std::arg(expect) * 180.0 / M_PI);
        CHECK(em::denormalize_phase(result.label.phase_te[k]) ==
              doctest::Approx(phase).epsilon(1e-6));
    }
}

TEST_CASE("stack: symmetric three-layer design has S11 = S22")
{
    TestRig rig;
    shapes::EmmsDesign design;
    design.layer_count = 3;
    design.gap_thickness_mm = 1.575;
    design.outer = shapes::LayerPattern::from_primitive(shapes::catalog_outer()[150]);
    design.second = shapes::LayerPattern::from_primitive(shapes::catalog_middle()[600]);

    const auto result = shapes::stack_gsm(design, rig.grid, rig.eval);
    for (const auto& g : result.gsms)
        CHECK((g.s11 - g.s22).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("stack: swapping dual-layer order preserves |T|")
{
    TestRig rig;
    shapes::EmmsDesign ab;
    ab.layer_count = 2;
    ab.gap_thickness_mm = 0.787;
    ab.outer = shapes::LayerPattern::from_primitive(shapes::catalog_outer()[10]);
    ab.second = shapes::LayerPattern::from_primitive(shapes::catalog_outer()[390]);
    shapes::EmmsDesign ba = ab;
    std::swap(ba.outer, ba.second);

    const auto r1 = shapes::stack_gsm(ab, rig.grid, rig.eval);
    const auto r2 = shapes::stack_gsm(ba, rig.grid, rig.eval);
    for (int i = 0; i < rig.grid.n_points; ++i) {
        const auto k = static_cast<std::size_t>(i);
        CHECK(r1.label.mag_te[k] == doctest::Approx(r2.label.mag_te[k]).epsilon(1e-8));
        CHECK(r1.label.mag_tm[k] == doctest::Approx(r2.label.mag_tm[k]).epsilon(1e-8));
    }
}

TEST_CASE("design JSON round-trip")
{
    shapes::EmmsDesign design;
    design.layer_count = 3;
    design.gap_thickness_mm = 0.787;
    design.outer = shapes::LayerPattern::from_primitive(shapes::catalog_outer()[44]);
    design.second = shapes::LayerPattern::from_mask(
        shapes::rasterize(shapes::catalog_middle()[500]).complement());

    const auto j = shapes::design_to_json(design);
    const auto back = shapes::design_from_json(j);
    CHECK(back.layer_count == design.layer_count);
    CHECK(back.gap_thickness_mm == design.gap_thickness_mm);
    CHECK(back.outer.mask == design.outer.mask);
    CHECK(back.second.mask == design.second.mask);
    REQUIRE(back.outer.primitive.has_value());
    CHECK(back.outer.primitive->family == design.outer.primitive->family);
    CHECK_FALSE(back.second.primitive.has_value());
}

TEST_CASE("dataset generation: determinism, dedup, labels")
{
    TestRig rig;
    shapes::DatasetConfig cfg;
    cfg.layer_count = 2;
    cfg.thickness_mm = 1.575;
    cfg.count = 16;
    cfg.seed = 99;
    cfg.grid = rig.grid;

    const auto ds1 = shapes::generate_dataset(cfg, rig.eval);
    REQUIRE(ds1.count() == 16);
    CHECK(ds1.backend_id == "sheet-admittance-v1");

    // Unique combinations.
    std::set<std::pair<int, int>> combos;
    for (const auto& s : ds1.samples)
        combos.insert({s.outer_index, s.second_index});
    CHECK(combos.size() == ds1.samples.size());

    // Deterministic regeneration.
    const auto ds2 = shapes::generate_dataset(cfg, rig.eval);
    for (int i = 0; i < ds1.count(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        CHECK(ds1.samples[k].outer_index == ds2.samples[k].outer_index);
        CHECK(ds1.samples[k].second_index == ds2.samples[k].second_index);
        CHECK(ds1.samples[k].label.mag_te == ds2.samples[k].label.mag_te);
        CHECK(ds1.samples[k].label.phase_tm == ds2.samples[k].label.phase_tm);
    }

    // Labels are solver-consistent: re-evaluating the design reproduces the
    // stored label bitwise.
    const auto& probe = ds1.samples[3];
    const auto redo = shapes::stack_gsm(probe.design, cfg.grid, rig.eval);
    CHECK(redo.label.mag_te == probe.label.mag_te);
    CHECK(redo.label.phase_te == probe.label.phase_te);
    CHECK(redo.label.mag_tm == probe.label.mag_tm);
    CHECK(redo.label.phase_tm == probe.label.phase_tm);

    // Capacity guard.
    shapes::DatasetConfig huge = cfg;
    huge.count = 178085;
    CHECK_THROWS_AS(shapes::generate_dataset(huge, rig.eval), InvalidArgument);
}

TEST_CASE("dataset save/load round-trip")
{
    TestRig rig;
    shapes::DatasetConfig cfg;
    cfg.layer_count = 2;
    cfg.thickness_mm = 0.787;
    cfg.count = 6;
    cfg.seed = 5;
    cfg.grid = rig.grid;
    const auto ds = shapes::generate_dataset(cfg, rig.eval);

    const auto dir = std::filesystem::temp_directory_path() /
                     ("emms-ds-test-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    shapes::save_dataset(ds, dir);
    const auto back = shapes::load_dataset(dir);

    CHECK(back.config.layer_count == cfg.layer_count);
    CHECK(back.config.thickness_mm == cfg.thickness_mm);
    CHECK(back.config.seed == cfg.seed);
    CHECK(back.config.grid == cfg.grid);
    CHECK(back.backend_id == ds.backend_id);
    REQUIRE(back.count() == ds.count());
    for (int i = 0; i < ds.count(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        CHECK(back.samples[k].design.outer.mask == ds.samples[k].design.outer.mask);
        CHECK(back.samples[k].design.second.mask == ds.samples[k].design.second.mask);
        // float32 storage: compare at storage precision.
        for (int p = 0; p < cfg.grid.n_points; ++p) {
            const auto q = static_cast<std::size_t>(p);
            CHECK(back.samples[k].label.mag_te[q] ==
                  doctest::Approx(ds.samples[k].label.mag_te[q]).epsilon(1e-6));
            CHECK(back.samples[k].label.phase_tm[q] ==
                  doctest::Approx(ds.samples[k].label.phase_tm[q]).epsilon(1e-6));
        }
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("nearest match distances")
{
    TestRig rig;
    shapes::DatasetConfig cfg;
    cfg.count = 8;
    cfg.seed = 2;
    cfg.grid = rig.grid;
    auto ds = shapes::generate_dataset(cfg, rig.eval);

    // Identical query: distance zero at the right index.
    const auto& s3 = ds.samples[3];
    const auto q = shapes::PackedPair::pack(s3.design.outer.mask, s3.design.second.mask);
    const auto [d0, i0] = shapes::nearest_match(q, ds.packed);
    CHECK(d0 == 0.0);
    CHECK(i0 == 3);

    // Flip exactly 54 pixels: distance 54/5408 < 0.03, still nearest to 3
    // (sibling samples differ in far more pixels).
    auto outer = s3.design.outer.mask;
    int flipped = 0;
    for (int j = 0; j < 52 && flipped < 54; ++j)
        for (int i = 0; i < 52 && flipped < 54; ++i)
            if ((i + j) % 7 == 0) {
                outer.set(i, j, !outer.at(i, j));
                ++flipped;
            }
    REQUIRE(flipped == 54);
    const auto q2 = shapes::PackedPair::pack(outer, s3.design.second.mask);
    const auto [d54, i54] = shapes::nearest_match(q2, ds.packed);
    CHECK(i54 == 3);
    CHECK(d54 == doctest::Approx(54.0 / 5408.0));
    CHECK(d54 < 0.03);

    // All-metal query against an all-empty pool entry: distance 1.
    sheet::PixelMask full;
    for (int j = 0; j < 52; ++j)
        for (int i = 0; i < 52; ++i)
            full.set(i, j, true);
    const std::vector<shapes::PackedPair> pool = {
        shapes::PackedPair::pack(sheet::PixelMask(), sheet::PixelMask())};
    const auto [dmax, imax] = shapes::nearest_match(shapes::PackedPair::pack(full, full), pool);
    CHECK(dmax == 1.0);
    CHECK(imax == 0);

    // Per-layer variant.
    std::vector<shapes::PackedMask> mask_pool;
    for (const auto& spec : shapes::enumerate_catalog(shapes::Family::CS))
        mask_pool.push_back(shapes::PackedMask::pack(shapes::rasterize(spec)));
    const auto probe = shapes::rasterize(shapes::enumerate_catalog(shapes::Family::CS)[7]);
    const auto [dm, im] = shapes::nearest_match(shapes::PackedMask::pack(probe), mask_pool);
    CHECK(dm == 0.0);
    CHECK(im == 7);
}
