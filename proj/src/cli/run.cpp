#include "emms/cli/run.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "emms/inverse/search.hpp"
#include "emms/neural/bundle_io.hpp"
#include "emms/neural/train.hpp"
#include "emms/util/parallel.hpp"

namespace emms::cli {

namespace {

namespace fs = std::filesystem;

// Exit codes.
constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNumerical = 3;
constexpr int kNotConverged = 4;

struct NotConverged : Error {
    using Error::Error;
};

// Defaults loaded from --config JSON; command-line flags override. Every
// key must be consumed by the active subcommand.
class ConfigDefaults {
public:
    void load(const fs::path& path)
    {
        std::ifstream is(path);
        if (!is)
            throw InvalidArgument("cannot open config file: " + path.string());
        try {
            j_ = nlohmann::json::parse(is);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument("config parse error: " + std::string(e.what()));
        }
        if (!j_.is_object())
            throw InvalidArgument("config file must hold a JSON object");
    }

    template <typename T>
    void apply(const std::string& key, T& var)
    {
        if (auto it = j_.find(key); it != j_.end()) {
            try {
                var = it->get<T>();
            } catch (const nlohmann::json::exception&) {
                throw InvalidArgument("config key '" + key + "' has the wrong type");
            }
            consumed_.push_back(key);
        }
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (std::find(consumed_.begin(), consumed_.end(), it.key()) == consumed_.end())
                throw InvalidArgument("unknown config key: " + it.key());
    }

private:
    nlohmann::json j_ = nlohmann::json::object();
    std::vector<std::string> consumed_;
};

// Files created by the current run; removed if the run fails.
struct OutputGuard {
    std::vector<fs::path> paths;
    bool committed = false;

    void track(const fs::path& p) { paths.push_back(p); }
    ~OutputGuard()
    {
        if (committed)
            return;
        std::error_code ec;
        for (auto it = paths.rbegin(); it != paths.rend(); ++it)
            fs::remove_all(*it, ec);
    }
};

struct PhysicsOpts {
    double f_start = 15.0;
    double f_stop = 31.0;
    int n_points = 33;
    int modes = 6;
    double ymetal_re = 1e3;
    double ymetal_im = 0.0;
    double eps_r = 2.2;
    double tan_delta = 0.0009;

    em::FrequencyGrid grid() const { return {f_start, f_stop, n_points}; }
    em::cdouble y_metal() const { return {ymetal_re, ymetal_im}; }
    em::Medium dielectric() const { return {eps_r, tan_delta}; }

    void add_flags(CLI::App* cmd, ConfigDefaults& cfg)
    {
        cfg.apply("f_start_ghz", f_start);
        cfg.apply("f_stop_ghz", f_stop);
        cfg.apply("n_points", n_points);
        cfg.apply("modes", modes);
        cfg.apply("ymetal_re", ymetal_re);
        cfg.apply("ymetal_im", ymetal_im);
        cfg.apply("eps_r", eps_r);
        cfg.apply("tan_delta", tan_delta);
        cmd->add_option("--f-start", f_start, "Sweep start, GHz");
        cmd->add_option("--f-stop", f_stop, "Sweep stop, GHz");
        cmd->add_option("--points", n_points, "Frequency points");
        cmd->add_option("--modes", modes, "Floquet modes per polarization");
        cmd->add_option("--ymetal-re", ymetal_re, "Metal sheet admittance, real part (S)");
        cmd->add_option("--ymetal-im", ymetal_im, "Metal sheet admittance, imag part (S)");
        cmd->add_option("--eps-r", eps_r, "Substrate relative permittivity");
        cmd->add_option("--tan-delta", tan_delta, "Substrate loss tangent");
    }

    nlohmann::json to_json() const
    {
        return {{"f_start_ghz", f_start}, {"f_stop_ghz", f_stop}, {"n_points", n_points},
                {"modes", modes},         {"ymetal_re", ymetal_re}, {"ymetal_im", ymetal_im},
                {"eps_r", eps_r},         {"tan_delta", tan_delta}};
    }
};

fs::path cache_dir_for(const fs::path& out)
{
    if (const char* env = std::getenv("EMMS_CACHE_DIR"))
        return fs::path(env);
    return out / "gsm-cache";
}

void write_snapshot(const fs::path& out, const nlohmann::json& resolved, OutputGuard& guard)
{
    fs::create_directories(out);
    const fs::path p = out / "config.json";
    std::ofstream os(p);
    if (!os)
        throw InvalidArgument("cannot write config snapshot: " + p.string());
    os << resolved.dump(2) << "\n";
    guard.track(p);
}

std::vector<int> parse_widths(const std::string& csv)
{
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t comma = csv.find(',', pos);
        if (comma == std::string::npos)
            comma = csv.size();
        try {
            out.push_back(std::stoi(csv.substr(pos, comma - pos)));
        } catch (const std::exception&) {
            throw InvalidArgument("bad width list: " + csv);
        }
        pos = comma + 1;
    }
    if (out.empty())
        throw InvalidArgument("width list must not be empty");
    return out;
}

// ---- catalog ----

int cmd_catalog(const std::string& family, const std::string& out_dir)
{
    std::vector<shapes::Family> families;
    if (family.empty())
        families = {shapes::Family::JC, shapes::Family::RP, shapes::Family::CS,
                    shapes::Family::CR, shapes::Family::CompJC, shapes::Family::CompRP};
    else
        families = {shapes::family_from_name(family)};

    std::ofstream csv;
    OutputGuard guard;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        const fs::path p = fs::path(out_dir) / "catalog.csv";
        csv.open(p);
        if (!csv)
            throw InvalidArgument("cannot write " + p.string());
        guard.track(p);
        csv << "family,index,l_x_mm,l_y_mm,r_mm,w_mm,metal_pixels\n";
    }

    long total = 0;
    for (auto f : families) {
        const auto entries = shapes::enumerate_catalog(f);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto& e = entries[i];
            std::cout << shapes::family_name(f) << ' ' << i << " l_x=" << e.l_x
                      << " l_y=" << e.l_y << " r=" << e.r << " w=" << e.w << "\n";
            if (csv.is_open())
                csv << shapes::family_name(f) << ',' << i << ',' << e.l_x << ',' << e.l_y << ','
                    << e.r << ',' << e.w << ',' << shapes::rasterize(e).metal_count() << "\n";
        }
        std::cout << shapes::family_name(f) << " count: " << entries.size() << "\n";
        total += static_cast<long>(entries.size());
    }
    std::cout << "total: " << total << " entries\n";
    guard.committed = true;
    return kOk;
}

// ---- dataset ----

int cmd_dataset(const PhysicsOpts& phys, int layers, double thickness, int count,
                std::uint64_t seed, const fs::path& out, nlohmann::json resolved)
{
    OutputGuard guard;
    write_snapshot(out, resolved, guard);

    sheet::SheetAdmittanceSolver backend;
    sheet::GsmCache cache(cache_dir_for(out));
    shapes::StackEvaluator eval{backend, &cache, em::build_mode_set(shapes::kCellPeriodMm, phys.modes),
                                phys.y_metal(), phys.dielectric()};

    shapes::DatasetConfig cfg;
    cfg.layer_count = layers;
    cfg.thickness_mm = thickness;
    cfg.count = count;
    cfg.seed = seed;
    cfg.grid = phys.grid();
    const shapes::Dataset ds = shapes::generate_dataset(cfg, eval);

    for (const char* f : {"manifest.json", "images.bin", "labels.bin"})
        guard.track(out / f);
    shapes::save_dataset(ds, out);
    std::cout << "dataset: " << ds.count() << " samples -> " << out.string() << "\n";
    guard.committed = true;
    return kOk;
}

// ---- train ----

int cmd_train(const fs::path& dataset_dir, const fs::path& out, std::uint64_t seed,
              const neural::TrainConfig& tcfg, const neural::BundleArch& arch,
              nlohmann::json resolved)
{
    OutputGuard guard;
    write_snapshot(out, resolved, guard);

    const shapes::Dataset ds = shapes::load_dataset(dataset_dir);
    neural::ModelBundle<float> bundle;
    bundle.init(arch, seed);
    const neural::TrainReport report = neural::train(bundle, ds, tcfg);

    const fs::path model_path = out / "model.bin";
    guard.track(model_path);
    neural::save_bundle(bundle, model_path);
    {
        const fs::path log_path = out / "train_log.csv";
        guard.track(log_path);
        std::ofstream os(log_path);
        os << "epoch,total,recons,kl,pred,val_total,val_pixel_accuracy,val_mag_mse,"
              "val_phase_mse\n";
        for (std::size_t e = 0; e < report.epochs.size(); ++e) {
            const auto& st = report.epochs[e];
            os << e << ',' << st.train.total << ',' << st.train.recons << ',' << st.train.kl
               << ',' << st.train.pred << ',' << st.val_total << ',' << st.val_pixel_accuracy
               << ',' << st.val_mag_mse << ',' << st.val_phase_mse << "\n";
        }
    }
    std::cout << "trained " << report.epochs.size() << " epochs; best epoch "
              << report.best_epoch << "; val pixel accuracy "
              << report.final_validation.val_pixel_accuracy << "; val mag MSE "
              << report.final_validation.val_mag_mse << "\n";
    guard.committed = true;
    return kOk;
}

// ---- eval ----

int cmd_eval(const PhysicsOpts& phys, const fs::path& design_path, const fs::path& out,
             nlohmann::json resolved)
{
    OutputGuard guard;
    write_snapshot(out, resolved, guard);

    std::ifstream is(design_path);
    if (!is)
        throw InvalidArgument("cannot open design file: " + design_path.string());
    nlohmann::json dj;
    try {
        dj = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("design parse error: " + std::string(e.what()));
    }
    const shapes::EmmsDesign design = shapes::design_from_json(dj);

    sheet::SheetAdmittanceSolver backend;
    sheet::GsmCache cache(cache_dir_for(out));
    const shapes::StackEvaluator eval{backend, &cache,
                                      em::build_mode_set(shapes::kCellPeriodMm, phys.modes),
                                      phys.y_metal(), phys.dielectric()};
    const shapes::StackResult result = shapes::stack_gsm(design, phys.grid(), eval);

    const fs::path csv = out / "spectrum.csv";
    guard.track(csv);
    std::ofstream os(csv);
    if (!os)
        throw InvalidArgument("cannot write " + csv.string());
    em::write_spectrum_csv(os, result.label);
    std::cout << "spectrum -> " << csv.string() << "\n";
    guard.committed = true;
    return kOk;
}

// ---- design ----

int cmd_design(const PhysicsOpts& phys, const fs::path& target_path,
               const std::vector<std::string>& space_args, const fs::path& out, double gamma,
               const inverse::PsoConfig& pso, nlohmann::json resolved)
{
    if (space_args.empty())
        throw InvalidArgument("design needs at least one --space MODEL:DATASET pair");

    OutputGuard guard;
    write_snapshot(out, resolved, guard);

    std::ifstream is(target_path);
    if (!is)
        throw InvalidArgument("cannot open target file: " + target_path.string());
    nlohmann::json tj;
    try {
        tj = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("target parse error: " + std::string(e.what()));
    }
    const inverse::TargetSpec target = inverse::target_from_json(tj);

    sheet::SheetAdmittanceSolver backend;
    sheet::GsmCache cache(cache_dir_for(out));

    // Loaded per-space state; must stay alive across design_search.
    std::vector<std::unique_ptr<neural::ModelBundle<float>>> bundles;
    std::vector<std::unique_ptr<shapes::Dataset>> datasets;
    std::vector<std::unique_ptr<shapes::StackEvaluator>> evals;
    std::vector<std::unique_ptr<inverse::LatentEvaluator>> latents;
    for (const auto& arg : space_args) {
        const std::size_t colon = arg.find(':');
        if (colon == std::string::npos)
            throw InvalidArgument("--space expects MODEL:DATASET, got: " + arg);
        bundles.push_back(std::make_unique<neural::ModelBundle<float>>(
            neural::load_bundle<float>(arg.substr(0, colon))));
        datasets.push_back(
            std::make_unique<shapes::Dataset>(shapes::load_dataset(arg.substr(colon + 1))));
        evals.push_back(std::make_unique<shapes::StackEvaluator>(shapes::StackEvaluator{
            backend, &cache, em::build_mode_set(shapes::kCellPeriodMm, phys.modes),
            phys.y_metal(), phys.dielectric()}));
        latents.push_back(std::make_unique<inverse::LatentEvaluator>(
            *bundles.back(), *datasets.back(), *evals.back(), gamma));
    }
    std::vector<const inverse::LatentEvaluator*> spaces;
    for (const auto& l : latents)
        spaces.push_back(l.get());

    const inverse::DesignReport report = inverse::design_search(spaces, target, pso);
    guard.track(out / "report.json");
    guard.track(out / "spectrum.csv");
    inverse::write_report(report, out);
    guard.committed = true;

    const auto& win = report.spaces[static_cast<std::size_t>(report.winner)];
    std::cout << "winner: " << win.layer_count << " layers at " << win.thickness_mm
              << " mm; objective " << win.verified_objective << "; report -> "
              << (out / "report.json").string() << "\n";
    if (!win.pso.trace.converged)
        throw NotConverged("search did not reach epsilon; best objective " +
                           std::to_string(win.pso.best_objective) + " (report written to " +
                           out.string() + ")");
    return kOk;
}

// ---- export-latent ----

int cmd_export_latent(const fs::path& model_path, const fs::path& dataset_dir,
                      const fs::path& out, nlohmann::json resolved)
{
    OutputGuard guard;
    write_snapshot(out, resolved, guard);

    const auto bundle = neural::load_bundle<float>(model_path);
    const shapes::Dataset ds = shapes::load_dataset(dataset_dir);
    const int k = bundle.arch.latent_dim;

    const fs::path csv = out / "latent.csv";
    guard.track(csv);
    std::ofstream os(csv);
    if (!os)
        throw InvalidArgument("cannot write " + csv.string());
    os << "sample,outer_family,second_family";
    for (int j = 0; j < k; ++j)
        os << ",mu_" << j;
    os << ",mean_magTE,mean_magTM\n";

    std::vector<float> x(neural::kInputDim);
    std::vector<float> mu, lv;
    for (int s = 0; s < ds.count(); ++s) {
        const auto& sample = ds.samples[static_cast<std::size_t>(s)];
        for (int p = 0; p < sheet::kMaskPixels; ++p) {
            x[static_cast<std::size_t>(p)] =
                static_cast<float>(sample.design.outer.mask.data()[static_cast<std::size_t>(p)]);
            x[static_cast<std::size_t>(sheet::kMaskPixels + p)] =
                static_cast<float>(sample.design.second.mask.data()[static_cast<std::size_t>(p)]);
        }
        bundle.encode(1, x.data(), mu, lv);
        const auto outer_spec =
            ds.outer_catalog[static_cast<std::size_t>(sample.outer_index)];
        const auto second_spec =
            ds.second_catalog[static_cast<std::size_t>(sample.second_index)];
        os << s << ',' << shapes::family_name(outer_spec.family) << ','
           << shapes::family_name(second_spec.family);
        for (int j = 0; j < k; ++j)
            os << ',' << mu[static_cast<std::size_t>(j)];
        double mte = 0, mtm = 0;
        for (int i = 0; i < sample.label.n_points(); ++i) {
            mte += sample.label.mag_te[static_cast<std::size_t>(i)];
            mtm += sample.label.mag_tm[static_cast<std::size_t>(i)];
        }
        os << ',' << mte / sample.label.n_points() << ',' << mtm / sample.label.n_points()
           << "\n";
    }
    std::cout << "latent export: " << ds.count() << " rows -> " << csv.string() << "\n";
    guard.committed = true;
    return kOk;
}

nlohmann::json error_json(const std::string& type, const std::string& message)
{
    return {{"error", {{"type", type}, {"message", message}}}};
}

int run_impl(int argc, const char* const* argv)
{
    CLI::App app{"Multilayer metasurface toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON file of option defaults")
        ->each([](const std::string&) {});

    // Pre-scan for --config so its values become defaults below.
    ConfigDefaults cfg;
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--config")
            cfg.load(argv[i + 1]);

    int threads = 1;
    std::uint64_t seed = 1;
    cfg.apply("threads", threads);
    cfg.apply("seed", seed);
    app.add_option("--threads", threads, "Worker threads (1 = bit-reproducible serial)");
    app.add_option("--seed", seed, "Master seed");

    PhysicsOpts phys;

    // catalog
    auto* c_catalog = app.add_subcommand("catalog", "List canonical scatterers");
    std::string cat_family, cat_out;
    cfg.apply("family", cat_family);
    c_catalog->add_option("--family", cat_family, "Restrict to one family");
    c_catalog->add_option("--out", cat_out, "Also write catalog.csv here");

    // dataset
    auto* c_dataset = app.add_subcommand("dataset", "Generate a labeled dataset");
    int ds_layers = 2, ds_count = 2000;
    double ds_thickness = 1.575;
    std::string ds_out;
    cfg.apply("layers", ds_layers);
    cfg.apply("thickness_mm", ds_thickness);
    cfg.apply("count", ds_count);
    phys.add_flags(c_dataset, cfg);
    c_dataset->add_option("--layers", ds_layers, "2 or 3")->check(CLI::IsMember({2, 3}));
    c_dataset->add_option("--thickness", ds_thickness, "Gap thickness, mm");
    c_dataset->add_option("--count", ds_count, "Samples to draw");
    c_dataset->add_option("--out", ds_out, "Output directory")->required();

    // train
    auto* c_train = app.add_subcommand("train", "Train a model bundle on a dataset");
    std::string tr_dataset, tr_out;
    neural::TrainConfig tcfg;
    int tr_latent = 8;
    std::string tr_enc = "2048,2048,1024,512,512,256,128,64";
    std::string tr_dec = "64,128,256,512,512,1024,2048,2048";
    std::string tr_mag = "500,1000,2000,1000,500,200,100";
    std::string tr_phase = "100,200,500,1000,1000,500,200,100";
    std::string tr_schedule = "32,64,128,256";
    cfg.apply("epochs", tcfg.epochs);
    cfg.apply("learning_rate", tcfg.learning_rate);
    cfg.apply("alpha", tcfg.alpha);
    cfg.apply("beta", tcfg.beta);
    cfg.apply("val_fraction", tcfg.val_fraction);
    cfg.apply("patience", tcfg.patience);
    cfg.apply("latent_dim", tr_latent);
    cfg.apply("encoder_widths", tr_enc);
    cfg.apply("decoder_widths", tr_dec);
    cfg.apply("mag_widths", tr_mag);
    cfg.apply("phase_widths", tr_phase);
    cfg.apply("batch_schedule", tr_schedule);
    c_train->add_option("--dataset", tr_dataset, "Dataset directory")->required();
    c_train->add_option("--out", tr_out, "Output directory")->required();
    c_train->add_option("--epochs", tcfg.epochs, "Epoch budget");
    c_train->add_option("--lr", tcfg.learning_rate, "Adam learning rate");
    c_train->add_option("--alpha", tcfg.alpha, "Reconstruction loss weight");
    c_train->add_option("--beta", tcfg.beta, "Predictor loss weight");
    c_train->add_option("--val-fraction", tcfg.val_fraction, "Validation split fraction");
    c_train->add_option("--patience", tcfg.patience, "Early-stop stall epochs");
    c_train->add_option("--latent", tr_latent, "Latent dimension K");
    c_train->add_option("--enc-widths", tr_enc, "Encoder hidden widths, CSV");
    c_train->add_option("--dec-widths", tr_dec, "Decoder hidden widths, CSV");
    c_train->add_option("--mag-widths", tr_mag, "Magnitude predictor widths, CSV");
    c_train->add_option("--phase-widths", tr_phase, "Phase predictor widths, CSV");
    c_train->add_option("--batch-schedule", tr_schedule, "Batch sizes stepped over the run");
    c_train->add_flag("--verbose", tcfg.verbose, "Per-epoch log on stderr");

    // eval
    auto* c_eval = app.add_subcommand("eval", "Forward-solve a design to a CSV spectrum");
    std::string ev_design, ev_out;
    phys.add_flags(c_eval, cfg);
    c_eval->add_option("--design", ev_design, "Design descriptor JSON")->required();
    c_eval->add_option("--out", ev_out, "Output directory")->required();

    // design
    auto* c_design = app.add_subcommand("design", "Inverse design against a target spec");
    std::string dg_target, dg_out;
    std::vector<std::string> dg_spaces;
    double dg_gamma = 0.03;
    inverse::PsoConfig pso;
    cfg.apply("gamma", dg_gamma);
    cfg.apply("swarm_size", pso.swarm_size);
    cfg.apply("iterations", pso.iterations);
    cfg.apply("epsilon", pso.epsilon);
    cfg.apply("bound_lo", pso.bound_lo);
    cfg.apply("bound_hi", pso.bound_hi);
    phys.add_flags(c_design, cfg);
    c_design->add_option("--target", dg_target, "Target spec JSON")->required();
    c_design->add_option("--space", dg_spaces, "MODEL:DATASET pair, repeatable")->required();
    c_design->add_option("--out", dg_out, "Output directory")->required();
    c_design->add_option("--gamma", dg_gamma, "Router distance threshold");
    c_design->add_option("--swarm", pso.swarm_size, "PSO particles");
    c_design->add_option("--iterations", pso.iterations, "PSO iteration budget");
    c_design->add_option("--epsilon", pso.epsilon, "PSO stop threshold");
    c_design->add_option("--bound-lo", pso.bound_lo, "Latent lower bound");
    c_design->add_option("--bound-hi", pso.bound_hi, "Latent upper bound");

    // export-latent
    auto* c_export = app.add_subcommand("export-latent",
                                        "Write per-sample latent means and labels as CSV");
    std::string ex_model, ex_dataset, ex_out;
    c_export->add_option("--model", ex_model, "Model checkpoint")->required();
    c_export->add_option("--dataset", ex_dataset, "Dataset directory")->required();
    c_export->add_option("--out", ex_out, "Output directory")->required();

    // Let global flags (--threads, --seed, --config) appear after the
    // subcommand name as well.
    for (auto* sub : app.get_subcommands({}))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);   // --help
        std::cout << error_json("usage", e.what()).dump() << "\n";
        return kUsage;
    }
    cfg.finish();
    set_thread_count(threads);

    nlohmann::json resolved = {{"threads", threads}, {"seed", seed}};
    if (c_catalog->parsed())
        return cmd_catalog(cat_family, cat_out);
    if (c_dataset->parsed()) {
        resolved["subcommand"] = "dataset";
        resolved["physics"] = phys.to_json();
        resolved["layers"] = ds_layers;
        resolved["thickness_mm"] = ds_thickness;
        resolved["count"] = ds_count;
        return cmd_dataset(phys, ds_layers, ds_thickness, ds_count, seed, ds_out, resolved);
    }
    if (c_train->parsed()) {
        tcfg.seed = seed;
        tcfg.batch_schedule = parse_widths(tr_schedule);
        neural::BundleArch arch;
        arch.latent_dim = tr_latent;
        arch.encoder_hidden = parse_widths(tr_enc);
        arch.decoder_hidden = parse_widths(tr_dec);
        arch.mag_hidden = parse_widths(tr_mag);
        arch.phase_hidden = parse_widths(tr_phase);
        resolved["subcommand"] = "train";
        resolved["dataset"] = tr_dataset;
        resolved["epochs"] = tcfg.epochs;
        resolved["learning_rate"] = tcfg.learning_rate;
        resolved["alpha"] = tcfg.alpha;
        resolved["beta"] = tcfg.beta;
        resolved["val_fraction"] = tcfg.val_fraction;
        resolved["patience"] = tcfg.patience;
        resolved["latent_dim"] = tr_latent;
        resolved["encoder_widths"] = tr_enc;
        resolved["decoder_widths"] = tr_dec;
        resolved["mag_widths"] = tr_mag;
        resolved["phase_widths"] = tr_phase;
        resolved["batch_schedule"] = tr_schedule;
        return cmd_train(tr_dataset, tr_out, seed, tcfg, arch, resolved);
    }
    if (c_eval->parsed()) {
        resolved["subcommand"] = "eval";
        resolved["physics"] = phys.to_json();
        resolved["design"] = ev_design;
        return cmd_eval(phys, ev_design, ev_out, resolved);
    }
    if (c_design->parsed()) {
        pso.seed = seed;
        resolved["subcommand"] = "design";
        resolved["physics"] = phys.to_json();
        resolved["target"] = dg_target;
        resolved["spaces"] = dg_spaces;
        resolved["gamma"] = dg_gamma;
        resolved["swarm_size"] = pso.swarm_size;
        resolved["iterations"] = pso.iterations;
        resolved["epsilon"] = pso.epsilon;
        return cmd_design(phys, dg_target, dg_spaces, dg_out, dg_gamma, pso, resolved);
    }
    if (c_export->parsed()) {
        resolved["subcommand"] = "export-latent";
        resolved["model"] = ex_model;
        resolved["dataset"] = ex_dataset;
        return cmd_export_latent(ex_model, ex_dataset, ex_out, resolved);
    }
    std::cout << error_json("usage", "no subcommand given").dump() << "\n";
    return kUsage;
}

} // namespace

int run(int argc, const char* const* argv)
{
    try {
        return run_impl(argc, argv);
    } catch (const NotConverged& e) {
        std::cout << error_json("not_converged", e.what()).dump() << "\n";
        return kNotConverged;
    } catch (const InvalidArgument& e) {
        std::cout << error_json("usage", e.what()).dump() << "\n";
        return kUsage;
    } catch (const NumericalError& e) {
        std::cout << error_json("numerical", e.what()).dump() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cout << error_json("numerical", e.what()).dump() << "\n";
        return kNumerical;
    }
}

} // namespace emms::cli
