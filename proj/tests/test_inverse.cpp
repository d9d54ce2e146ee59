#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "emms/inverse/search.hpp"
#include "emms/sheet/solver.hpp"

using namespace emms;

namespace {

constexpr double kPeriodMm = 5.3;

em::FrequencyGrid small_grid() { return em::FrequencyGrid(15.0, 31.0, 5); }

const shapes::StackEvaluator& stack_eval()
{
    static sheet::SheetAdmittanceSolver backend;
    static const shapes::StackEvaluator eval{backend, nullptr,
                                             em::build_mode_set(kPeriodMm, 6),
                                             {1e3, 0.0}, em::rogers5880()};
    return eval;
}

const shapes::Dataset& small_dataset()
{
    static const shapes::Dataset ds = [] {
        shapes::DatasetConfig cfg;
        cfg.layer_count = 2;
        cfg.thickness_mm = 1.575;
        cfg.count = 12;
        cfg.seed = 5;
        cfg.grid = small_grid();
        return shapes::generate_dataset(cfg, stack_eval());
    }();
    return ds;
}

neural::BundleArch tiny_arch(int k = 2)
{
    neural::BundleArch arch;
    arch.encoder_hidden = {8, 4};
    arch.decoder_hidden = {4, 8};
    arch.mag_hidden = {8, 4};
    arch.phase_hidden = {8, 4};
    arch.latent_dim = k;
    return arch;
}

neural::ModelBundle<float> make_bundle(const shapes::Dataset& ds)
{
    neural::ModelBundle<float> b;
    b.init(tiny_arch(2), 11);
    b.grid = ds.config.grid;
    b.layer_count = ds.config.layer_count;
    b.thickness_mm = ds.config.thickness_mm;
    return b;
}

// Overwrite the decoder so it emits the given image pair for every latent
// input: zero all weights, zero the hidden biases (dead ReLU trunk) and put
// +/-8 on the output biases so the sigmoid saturates on the right side of
// the 0.5 binarization threshold.
void rig_decoder(neural::ModelBundle<float>& b, const sheet::PixelMask& outer,
                 const sheet::PixelMask& second)
{
    for (auto& layer : b.decoder.layers) {
        std::fill(layer.w.begin(), layer.w.end(), 0.0f);
        std::fill(layer.b.begin(), layer.b.end(), 0.0f);
    }
    auto& out = b.decoder.layers.back();
    for (int p = 0; p < sheet::kMaskPixels; ++p) {
        out.b[static_cast<std::size_t>(p)] = outer.data()[static_cast<std::size_t>(p)] ? 8.0f : -8.0f;
        out.b[static_cast<std::size_t>(sheet::kMaskPixels + p)] =
            second.data()[static_cast<std::size_t>(p)] ? 8.0f : -8.0f;
    }
}

inverse::TargetSpec exact_target(const em::SpectrumLabel& label)
{
    inverse::TargetSpec t;
    t.mode = inverse::TargetSpec::Mode::Exact;
    t.grid = label.grid;
    t.exact = label;
    return t;
}

double spectrum_max_diff(const em::SpectrumLabel& a, const em::SpectrumLabel& b)
{
    REQUIRE(a.n_points() == b.n_points());
    double worst = 0;
    for (int i = 0; i < a.n_points(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        worst = std::max(worst, std::abs(a.mag_te[k] - b.mag_te[k]));
        worst = std::max(worst, std::abs(a.phase_te[k] - b.phase_te[k]));
        worst = std::max(worst, std::abs(a.mag_tm[k] - b.mag_tm[k]));
        worst = std::max(worst, std::abs(a.phase_tm[k] - b.phase_tm[k]));
    }
    return worst;
}

} // namespace

TEST_CASE("exact objective: substitution examples")
{
    const auto grid = small_grid();
    em::SpectrumLabel base(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const auto k = static_cast<std::size_t>(i);
        base.mag_te[k] = 0.9;
        base.mag_tm[k] = 0.8;
        base.phase_te[k] = 0.4;
        base.phase_tm[k] = 0.6;
    }
    const auto target = exact_target(base);
    target.validate();

    // Identical candidate scores zero.
    CHECK(inverse::exact_objective(base, target) == doctest::Approx(0.0));

    // A uniform 0.1 offset on one magnitude channel contributes 0.1^2 at
    // every frequency, so the frequency mean is exactly 0.01.
    auto cand = base;
    for (auto& v : cand.mag_te)
        v += 0.1;
    CHECK(inverse::exact_objective(cand, target) == doctest::Approx(0.01));

    // Offsets on two channels add.
    for (auto& v : cand.phase_tm)
        v -= 0.2;
    CHECK(inverse::exact_objective(cand, target) == doctest::Approx(0.01 + 0.04));

    // An offset at a single grid point is averaged over the grid.
    cand = base;
    cand.mag_tm[2] = 0.8 + 0.5;
    CHECK(inverse::exact_objective(cand, target) ==
          doctest::Approx(0.25 / grid.n_points));

    // Dispatcher agrees with the direct call.
    CHECK(inverse::objective(cand, target) ==
          doctest::Approx(inverse::exact_objective(cand, target)));

    // Grid mismatch is rejected.
    em::SpectrumLabel other(em::FrequencyGrid(15.0, 31.0, 7));
    CHECK_THROWS_AS(inverse::exact_objective(other, target), InvalidArgument);
}

TEST_CASE("mask objective: band membership and penalty values")
{
    const auto grid = small_grid();   // points at 15, 19, 23, 27, 31 GHz
    em::SpectrumLabel cand(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const auto k = static_cast<std::size_t>(i);
        cand.mag_te[k] = 0.5;
        cand.mag_tm[k] = 0.95;
        cand.phase_te[k] = em::normalize_phase_deg(100.0);
        cand.phase_tm[k] = em::normalize_phase_deg(10.0);
    }

    inverse::TargetSpec t;
    t.mode = inverse::TargetSpec::Mode::Masks;
    t.grid = grid;

    SUBCASE("single out-of-band value")
    {
        // Band [18, 20] covers only the 19 GHz point; v = 0.5 outside
        // [0.9, 1.0] costs 2*|(0.5-0.9)*(0.5-1.0)| = 0.4.
        t.masks = {{inverse::MaskQuantity::MagTE, 18.0, 20.0, 0.9, 1.0}};
        t.validate();
        CHECK(inverse::mask_objective(cand, t) == doctest::Approx(0.4));
        CHECK(inverse::objective(cand, t) == doctest::Approx(0.4));
    }

    SUBCASE("value inside the window costs nothing")
    {
        t.masks = {{inverse::MaskQuantity::MagTM, 15.0, 31.0, 0.9, 1.0}};
        t.validate();
        CHECK(inverse::mask_objective(cand, t) == doctest::Approx(0.0));
    }

    SUBCASE("rows and in-band points accumulate")
    {
        // MagTE 0.5 vs [0.9, 1.0] on two points (15, 19) plus one point of
        // MagTM 0.95 vs [0.0, 0.9] at 31 GHz:
        // 2*0.4 + 2*|(0.95-0)*(0.95-0.9)| = 0.8 + 0.095.
        t.masks = {{inverse::MaskQuantity::MagTE, 15.0, 19.0, 0.9, 1.0},
                   {inverse::MaskQuantity::MagTM, 30.0, 31.0, 0.0, 0.9}};
        t.validate();
        CHECK(inverse::mask_objective(cand, t) == doctest::Approx(0.8 + 0.095));
    }

    SUBCASE("phase difference quantity")
    {
        // TE - TM = 90 degrees at every point.
        t.masks = {{inverse::MaskQuantity::PhaseDiff, 19.0, 19.0, 80.0, 100.0}};
        t.validate();
        CHECK(inverse::mask_objective(cand, t) == doctest::Approx(0.0));
        t.masks = {{inverse::MaskQuantity::PhaseDiff, 19.0, 19.0, 60.0, 80.0}};
        CHECK(inverse::mask_objective(cand, t) ==
              doctest::Approx(2.0 * std::abs((90.0 - 60.0) * (90.0 - 80.0))));
    }

    SUBCASE("validation rejects malformed rows")
    {
        t.masks = {};
        CHECK_THROWS_AS(t.validate(), InvalidArgument);
        t.masks = {{inverse::MaskQuantity::MagTE, 20.0, 18.0, 0.0, 1.0}};
        CHECK_THROWS_AS(t.validate(), InvalidArgument);
        t.masks = {{inverse::MaskQuantity::MagTE, 18.0, 20.0, 0.8, 0.2}};
        CHECK_THROWS_AS(t.validate(), InvalidArgument);
        t.masks = {{inverse::MaskQuantity::MagTE, 18.0, 20.0, -0.5, 1.0}};
        CHECK_THROWS_AS(t.validate(), InvalidArgument);
        t.masks = {{inverse::MaskQuantity::MagTE, 10.0, 20.0, 0.0, 1.0}};
        CHECK_THROWS_AS(t.validate(), InvalidArgument);
    }
}

TEST_CASE("target JSON round-trip")
{
    const auto grid = small_grid();

    SUBCASE("exact mode")
    {
        em::SpectrumLabel s(grid);
        for (int i = 0; i < grid.n_points; ++i) {
            const auto k = static_cast<std::size_t>(i);
            s.mag_te[k] = 0.1 * i;
            s.mag_tm[k] = 1.0 - 0.1 * i;
            s.phase_te[k] = em::normalize_phase_deg(30.0 * i - 60.0);
            s.phase_tm[k] = em::normalize_phase_deg(-45.0 * i + 90.0);
        }
        const auto t = exact_target(s);
        const auto rt = inverse::target_from_json(inverse::target_to_json(t));
        CHECK(rt.mode == inverse::TargetSpec::Mode::Exact);
        CHECK(rt.grid == grid);
        CHECK(spectrum_max_diff(rt.exact, s) < 1e-12);
    }

    SUBCASE("mask mode")
    {
        inverse::TargetSpec t;
        t.mode = inverse::TargetSpec::Mode::Masks;
        t.grid = grid;
        t.masks = {{inverse::MaskQuantity::MagTE, 17.0, 19.5, 0.9, 1.0},
                   {inverse::MaskQuantity::PhaseDiff, 21.5, 24.5, -10.0, 10.0}};
        const auto rt = inverse::target_from_json(inverse::target_to_json(t));
        REQUIRE(rt.masks.size() == 2);
        CHECK(rt.mode == inverse::TargetSpec::Mode::Masks);
        CHECK(rt.masks[0].quantity == inverse::MaskQuantity::MagTE);
        CHECK(rt.masks[0].f1_ghz == doctest::Approx(17.0));
        CHECK(rt.masks[0].f2_ghz == doctest::Approx(19.5));
        CHECK(rt.masks[1].quantity == inverse::MaskQuantity::PhaseDiff);
        CHECK(rt.masks[1].min == doctest::Approx(-10.0));
        CHECK(rt.masks[1].max == doctest::Approx(10.0));
    }

    SUBCASE("rejects unknown content")
    {
        CHECK_THROWS_AS(inverse::quantity_from_name("magnitude"), InvalidArgument);
        nlohmann::json j = {{"mode", "fuzzy"},
                            {"grid",
                             {{"f_start_ghz", 15.0}, {"f_stop_ghz", 31.0}, {"n_points", 5}}}};
        CHECK_THROWS_AS(inverse::target_from_json(j), InvalidArgument);
    }

    SUBCASE("route names")
    {
        CHECK(inverse::route_name(inverse::RouterDecision::Case::Predictor) == "predictor");
        CHECK(inverse::route_name(inverse::RouterDecision::Case::CascadeKnown) ==
              "cascade_known");
        CHECK(inverse::route_name(inverse::RouterDecision::Case::SolveNew) == "solve_new");
    }
}

TEST_CASE("pso minimizes a shifted sphere deterministically")
{
    inverse::PsoConfig cfg;
    cfg.seed = 3;
    const auto sphere = [](const std::vector<double>& x) {
        double acc = 0;
        for (double v : x)
            acc += (v - 0.3) * (v - 0.3);
        return acc;
    };

    const auto r1 = inverse::pso_optimize(8, sphere, cfg);
    CHECK(r1.best_objective < 1e-3);
    CHECK(r1.trace.converged);
    CHECK(r1.trace.iterations_run <= cfg.iterations);
    REQUIRE(static_cast<int>(r1.trace.best_per_iteration.size()) == r1.trace.iterations_run);
    for (std::size_t i = 1; i < r1.trace.best_per_iteration.size(); ++i)
        CHECK(r1.trace.best_per_iteration[i] <= r1.trace.best_per_iteration[i - 1]);
    for (double v : r1.best_x) {
        CHECK(v >= cfg.bound_lo);
        CHECK(v <= cfg.bound_hi);
    }

    // Bitwise reproducible from the seed.
    const auto r2 = inverse::pso_optimize(8, sphere, cfg);
    CHECK(r2.best_objective == r1.best_objective);
    CHECK(r2.best_x == r1.best_x);
    CHECK(r2.trace.best_per_iteration == r1.trace.best_per_iteration);

    // A different seed explores differently but still converges.
    cfg.seed = 4;
    const auto r3 = inverse::pso_optimize(8, sphere, cfg);
    CHECK(r3.best_objective < 1e-3);
    CHECK(r3.best_x != r1.best_x);

    // Config validation.
    inverse::PsoConfig bad;
    bad.swarm_size = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = {};
    bad.bound_lo = 1.0;
    bad.bound_hi = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);

    // A warm start at the optimum converges on the first iteration.
    cfg = {};
    cfg.seed = 3;
    cfg.init_positions = {std::vector<double>(8, 0.3)};
    const auto r4 = inverse::pso_optimize(8, sphere, cfg);
    CHECK(r4.trace.converged);
    CHECK(r4.trace.iterations_run == 1);
    CHECK(r4.best_objective == doctest::Approx(0.0));

    // Out-of-bounds warm starts are clamped into the box.
    cfg.init_positions = {std::vector<double>(8, 100.0)};
    const auto r5 = inverse::pso_optimize(8, sphere, cfg);
    CHECK(r5.best_objective < 1e-3);

    // Dimension mismatch is rejected.
    cfg.init_positions = {std::vector<double>(3, 0.0)};
    CHECK_THROWS_AS(inverse::pso_optimize(8, sphere, cfg), InvalidArgument);
}

TEST_CASE("router: predictor route on a memorized training pair")
{
    const auto& ds = small_dataset();
    auto bundle = make_bundle(ds);
    const auto& sample = ds.samples[3];
    rig_decoder(bundle, sample.design.outer.mask, sample.design.second.mask);

    inverse::LatentEvaluator ev(bundle, ds, stack_eval());
    CHECK(ev.gamma() == doctest::Approx(0.03));
    CHECK(ev.latent_dim() == 2);

    const float z[2] = {0.2f, -0.4f};
    const auto target = exact_target(sample.label);
    const auto res = ev.evaluate(z, target);

    CHECK(res.decision.route == inverse::RouterDecision::Case::Predictor);
    CHECK(res.decision.pair_distance == doctest::Approx(0.0));
    CHECK(res.decision.pair_index == 3);
    // The physical realization is the matched training design.
    CHECK(res.design.outer.mask == sample.design.outer.mask);
    CHECK(res.design.second.mask == sample.design.second.mask);
    // The label comes from the predictor heads, not the solver.
    const std::vector<float> zf = {z[0], z[1]};
    const auto pred = bundle.predict_spectrum(zf.data());
    CHECK(spectrum_max_diff(res.label, pred) < 1e-12);
    CHECK(res.objective == doctest::Approx(inverse::objective(pred, target)));

    // Binarization is idempotent: decoding twice yields identical masks.
    inverse::RouterDecision d1, d2;
    const auto dec1 = ev.decode_design(z, d1);
    const auto dec2 = ev.decode_design(z, d2);
    CHECK(dec1.outer.mask == dec2.outer.mask);
    CHECK(dec1.second.mask == dec2.second.mask);
    CHECK(d1.pair_index == d2.pair_index);

    CHECK_THROWS_AS(inverse::LatentEvaluator(bundle, ds, stack_eval(), 0.0),
                    InvalidArgument);
}

TEST_CASE("router: cascade_known snaps to catalog and matches a direct solve")
{
    const auto& ds = small_dataset();
    auto bundle = make_bundle(ds);

    // A catalog combination absent from the 12 training samples.
    int outer_idx = 37, second_idx = 301;
    for (const auto& s : ds.samples)
        REQUIRE((s.outer_index != outer_idx || s.second_index != second_idx));
    const auto outer_mask = shapes::rasterize(ds.outer_catalog[static_cast<std::size_t>(outer_idx)]);
    const auto second_mask =
        shapes::rasterize(ds.second_catalog[static_cast<std::size_t>(second_idx)]);
    rig_decoder(bundle, outer_mask, second_mask);

    inverse::LatentEvaluator ev(bundle, ds, stack_eval());
    const float z[2] = {0.0f, 0.0f};
    const auto target = exact_target(ds.samples[0].label);
    const auto res = ev.evaluate(z, target);

    CHECK(res.decision.route == inverse::RouterDecision::Case::CascadeKnown);
    CHECK(res.decision.pair_distance > ev.gamma());
    CHECK(res.decision.outer_distance == doctest::Approx(0.0));
    CHECK(res.decision.second_distance == doctest::Approx(0.0));
    CHECK(res.decision.outer_catalog_index == outer_idx);
    CHECK(res.decision.second_catalog_index == second_idx);
    REQUIRE(res.design.outer.primitive.has_value());
    CHECK(*res.design.outer.primitive == ds.outer_catalog[static_cast<std::size_t>(outer_idx)]);

    // Route equivalence: the snapped cascade and a raw-mask direct solve of
    // the same pixels must produce the same spectrum.
    shapes::EmmsDesign raw;
    raw.layer_count = ds.config.layer_count;
    raw.gap_thickness_mm = ds.config.thickness_mm;
    raw.outer = shapes::LayerPattern::from_mask(outer_mask);
    raw.second = shapes::LayerPattern::from_mask(second_mask);
    const auto direct = ev.verify(raw);
    CHECK(spectrum_max_diff(res.label, direct) < 1e-8);
}

TEST_CASE("router: novel masks fall through to solve_new")
{
    const auto& ds = small_dataset();
    auto bundle = make_bundle(ds);

    // A coarse checkerboard resembles no catalog primitive.
    sheet::PixelMask board;
    for (int j = 0; j < sheet::kMaskSize; ++j)
        for (int i = 0; i < sheet::kMaskSize; ++i)
            board.set(i, j, ((i / 4) + (j / 4)) % 2 == 0);
    rig_decoder(bundle, board, board.complement());

    inverse::LatentEvaluator ev(bundle, ds, stack_eval());
    const float z[2] = {0.0f, 0.0f};
    const auto target = exact_target(ds.samples[0].label);
    const auto res = ev.evaluate(z, target);

    CHECK(res.decision.route == inverse::RouterDecision::Case::SolveNew);
    CHECK(res.decision.pair_distance > ev.gamma());
    CHECK(res.decision.outer_distance > ev.gamma());
    CHECK(res.design.outer.mask == board);
    // The label is the direct solve of the decoded masks.
    const auto direct = ev.verify(res.design);
    CHECK(spectrum_max_diff(res.label, direct) < 1e-12);
    CHECK(res.objective == doctest::Approx(inverse::objective(direct, target)));
}

TEST_CASE("latent pso and design search contract")
{
    const auto& ds = small_dataset();
    auto bundle = make_bundle(ds);   // untrained: routes through solve_new
    inverse::LatentEvaluator ev(bundle, ds, stack_eval());

    const auto target = exact_target(ds.samples[0].label);
    inverse::PsoConfig cfg;
    cfg.swarm_size = 6;
    cfg.iterations = 4;
    cfg.epsilon = 1e-12;   // force the full iteration budget
    cfg.seed = 9;

    const auto r = inverse::latent_pso(ev, target, cfg);
    CHECK(static_cast<int>(r.best_z.size()) == ev.latent_dim());
    CHECK(r.trace.iterations_run == cfg.iterations);
    CHECK(!r.trace.converged);
    CHECK(r.trace.predictor_count + r.trace.cascade_known_count + r.trace.solve_new_count ==
          static_cast<long>(cfg.swarm_size) * cfg.iterations);
    CHECK(r.best_objective == doctest::Approx(r.best.objective));
    for (std::size_t i = 1; i < r.trace.best_per_iteration.size(); ++i)
        CHECK(r.trace.best_per_iteration[i] <= r.trace.best_per_iteration[i - 1]);

    const auto report = inverse::design_search({&ev}, target, cfg);
    REQUIRE(report.spaces.size() == 1);
    CHECK(report.winner == 0);
    const auto& space = report.spaces[0];
    CHECK(space.layer_count == ds.config.layer_count);
    CHECK(space.thickness_mm == doctest::Approx(ds.config.thickness_mm));
    // The verified spectrum is the solver-path label of the winning design.
    const auto direct = ev.verify(space.pso.best.design);
    CHECK(spectrum_max_diff(space.verified, direct) < 1e-12);
    CHECK(space.verified_objective ==
          doctest::Approx(inverse::objective(space.verified, target)));

    const auto j = inverse::report_to_json(report);
    CHECK(j.contains("target"));
    CHECK(j.contains("spaces"));
    CHECK(j.at("winner").get<int>() == 0);
    REQUIRE(j.at("spaces").size() == 1);
    CHECK(j.at("spaces")[0].contains("best_z"));
    CHECK(j.at("spaces")[0].contains("router"));
    CHECK(j.at("spaces")[0].contains("best_per_iteration"));
    CHECK(j.at("spaces")[0].contains("route_counts"));
    CHECK(j.at("spaces")[0].contains("verified_spectrum"));

    const auto dir = std::filesystem::temp_directory_path() /
                     ("emms-inverse-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    inverse::write_report(report, dir);
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "spectrum.csv"));
    std::ifstream csv(dir / "spectrum.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "frequency_GHz,magTE,phaseTE_deg,magTM,phaseTM_deg");
    std::filesystem::remove_all(dir);

    // Supplying no spaces is an error.
    CHECK_THROWS_AS(inverse::design_search({}, target, cfg), InvalidArgument);
}
