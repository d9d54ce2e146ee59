#include "emms/inverse/search.hpp"

#include <fstream>
#include <iostream>

namespace emms::inverse {

DesignReport design_search(const std::vector<const LatentEvaluator*>& spaces,
                           const TargetSpec& target, const PsoConfig& config)
{
    if (spaces.empty())
        throw InvalidArgument("design_search needs at least one latent space");
    target.validate();

    DesignReport report;
    report.target = target;
    for (std::size_t i = 0; i < spaces.size(); ++i) {
        const LatentEvaluator* space = spaces[i];
        try {
            SpaceResult res;
            res.layer_count = space->bundle().layer_count;
            res.thickness_mm = space->bundle().thickness_mm;
            res.pso = latent_pso(*space, target, config);
            // Winner spectrum always comes from the solver path.
            res.verified = space->verify(res.pso.best.design);
            res.verified_objective = objective(res.verified, target);
            report.spaces.push_back(std::move(res));
        } catch (const Error& e) {
            std::cerr << "warning: latent space " << i << " skipped: " << e.what() << "\n";
        }
    }
    if (report.spaces.empty())
        throw NumericalError("design_search: every latent space failed");

    for (std::size_t i = 0; i < report.spaces.size(); ++i)
        if (report.winner < 0 ||
            report.spaces[i].verified_objective <
                report.spaces[static_cast<std::size_t>(report.winner)].verified_objective)
            report.winner = static_cast<int>(i);
    return report;
}

namespace {

nlohmann::json spectrum_to_json(const em::SpectrumLabel& s)
{
    nlohmann::json j;
    j["frequency_GHz"] = s.grid.points();
    j["magTE"] = s.mag_te;
    j["magTM"] = s.mag_tm;
    std::vector<double> pte, ptm;
    for (int i = 0; i < s.n_points(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        pte.push_back(em::wrap_deg(em::denormalize_phase(s.phase_te[k])));
        ptm.push_back(em::wrap_deg(em::denormalize_phase(s.phase_tm[k])));
    }
    j["phaseTE_deg"] = pte;
    j["phaseTM_deg"] = ptm;
    return j;
}

nlohmann::json decision_to_json(const RouterDecision& d)
{
    return {{"case", route_name(d.route)},
            {"pair_distance", d.pair_distance},
            {"pair_index", d.pair_index},
            {"outer_distance", d.outer_distance},
            {"outer_catalog_index", d.outer_catalog_index},
            {"second_distance", d.second_distance},
            {"second_catalog_index", d.second_catalog_index},
            {"note", d.note}};
}

} // namespace

nlohmann::json report_to_json(const DesignReport& report)
{
    nlohmann::json j;
    j["target"] = target_to_json(report.target);
    j["winner"] = report.winner;
    nlohmann::json spaces = nlohmann::json::array();
    for (const auto& s : report.spaces) {
        nlohmann::json e;
        e["layer_count"] = s.layer_count;
        e["thickness_mm"] = s.thickness_mm;
        e["best_objective"] = s.pso.best_objective;
        e["verified_objective"] = s.verified_objective;
        e["best_z"] = s.pso.best_z;
        e["router"] = decision_to_json(s.pso.best.decision);
        e["design"] = shapes::design_to_json(s.pso.best.design);
        e["iterations_run"] = s.pso.trace.iterations_run;
        e["converged"] = s.pso.trace.converged;
        e["best_per_iteration"] = s.pso.trace.best_per_iteration;
        e["route_counts"] = {{"predictor", s.pso.trace.predictor_count},
                             {"cascade_known", s.pso.trace.cascade_known_count},
                             {"solve_new", s.pso.trace.solve_new_count}};
        e["solver_invocations"] = s.pso.trace.solver_invocations;
        e["verified_spectrum"] = spectrum_to_json(s.verified);
        spaces.push_back(std::move(e));
    }
    j["spaces"] = std::move(spaces);
    return j;
}

void write_report(const DesignReport& report, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream os(dir / "report.json");
        if (!os)
            throw InvalidArgument("cannot write report.json in " + dir.string());
        os << report_to_json(report).dump(2) << "\n";
    }
    {
        std::ofstream os(dir / "spectrum.csv");
        if (!os)
            throw InvalidArgument("cannot write spectrum.csv in " + dir.string());
        em::write_spectrum_csv(
            os, report.spaces[static_cast<std::size_t>(report.winner)].verified);
    }
}

} // namespace emms::inverse
