#include "emms/inverse/objective.hpp"

#include "emms/util/error.hpp"

namespace emms::inverse {

std::string quantity_name(MaskQuantity q)
{
    switch (q) {
    case MaskQuantity::MagTE: return "magTE";
    case MaskQuantity::MagTM: return "magTM";
    case MaskQuantity::PhaseTE: return "phaseTE";
    case MaskQuantity::PhaseTM: return "phaseTM";
    case MaskQuantity::PhaseDiff: return "phaseDiff";
    }
    throw InvalidArgument("bad mask quantity");
}

MaskQuantity quantity_from_name(const std::string& name)
{
    for (auto q : {MaskQuantity::MagTE, MaskQuantity::MagTM, MaskQuantity::PhaseTE,
                   MaskQuantity::PhaseTM, MaskQuantity::PhaseDiff})
        if (quantity_name(q) == name)
            return q;
    throw InvalidArgument("unknown mask quantity: " + name);
}

void TargetSpec::validate() const
{
    if (mode == Mode::Exact) {
        if (exact.grid != grid || exact.n_points() != grid.n_points)
            throw InvalidArgument("exact target must cover the full grid");
        for (int i = 0; i < grid.n_points; ++i) {
            const auto k = static_cast<std::size_t>(i);
            for (double m : {exact.mag_te[k], exact.mag_tm[k]})
                if (m < 0.0 || m > 1.0)
                    throw InvalidArgument("target magnitudes must lie in [0, 1]");
        }
        return;
    }
    if (masks.empty())
        throw InvalidArgument("mask target needs at least one row");
    for (const auto& row : masks) {
        if (!(row.f1_ghz <= row.f2_ghz))
            throw InvalidArgument("mask band requires f1 <= f2");
        if (row.f1_ghz < grid.f_start_ghz - 1e-9 || row.f2_ghz > grid.f_stop_ghz + 1e-9)
            throw InvalidArgument("mask band outside the frequency grid");
        if (!(row.min <= row.max))
            throw InvalidArgument("mask row requires min <= max");
        if ((row.quantity == MaskQuantity::MagTE || row.quantity == MaskQuantity::MagTM) &&
            (row.min < 0.0 || row.max > 1.0))
            throw InvalidArgument("magnitude mask bounds must lie in [0, 1]");
    }
}

nlohmann::json target_to_json(const TargetSpec& target)
{
    nlohmann::json j;
    j["mode"] = target.mode == TargetSpec::Mode::Exact ? "exact" : "masks";
    j["grid"] = {{"f_start_ghz", target.grid.f_start_ghz},
                 {"f_stop_ghz", target.grid.f_stop_ghz},
                 {"n_points", target.grid.n_points}};
    if (target.mode == TargetSpec::Mode::Exact) {
        nlohmann::json e;
        e["magTE"] = target.exact.mag_te;
        e["magTM"] = target.exact.mag_tm;
        std::vector<double> pte, ptm;
        for (int i = 0; i < target.grid.n_points; ++i) {
            const auto k = static_cast<std::size_t>(i);
            pte.push_back(em::wrap_deg(em::denormalize_phase(target.exact.phase_te[k])));
            ptm.push_back(em::wrap_deg(em::denormalize_phase(target.exact.phase_tm[k])));
        }
        e["phaseTE_deg"] = pte;
        e["phaseTM_deg"] = ptm;
        j["exact"] = e;
    } else {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : target.masks)
            rows.push_back({{"quantity", quantity_name(row.quantity)},
                            {"band_GHz", {row.f1_ghz, row.f2_ghz}},
                            {"min", row.min},
                            {"max", row.max}});
        j["masks"] = rows;
    }
    return j;
}

TargetSpec target_from_json(const nlohmann::json& j)
{
    TargetSpec target;
    const auto& g = j.at("grid");
    target.grid = em::FrequencyGrid(g.at("f_start_ghz").get<double>(),
                                    g.at("f_stop_ghz").get<double>(),
                                    g.at("n_points").get<int>());
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "exact") {
        target.mode = TargetSpec::Mode::Exact;
        target.exact = em::SpectrumLabel(target.grid);
        const auto& e = j.at("exact");
        target.exact.mag_te = e.at("magTE").get<std::vector<double>>();
        target.exact.mag_tm = e.at("magTM").get<std::vector<double>>();
        const auto pte = e.at("phaseTE_deg").get<std::vector<double>>();
        const auto ptm = e.at("phaseTM_deg").get<std::vector<double>>();
        if (static_cast<int>(target.exact.mag_te.size()) != target.grid.n_points ||
            static_cast<int>(target.exact.mag_tm.size()) != target.grid.n_points ||
            static_cast<int>(pte.size()) != target.grid.n_points ||
            static_cast<int>(ptm.size()) != target.grid.n_points)
            throw InvalidArgument("exact target arrays must match the grid length");
        for (int i = 0; i < target.grid.n_points; ++i) {
            const auto k = static_cast<std::size_t>(i);
            target.exact.phase_te[k] = em::normalize_phase_deg(pte[k]);
            target.exact.phase_tm[k] = em::normalize_phase_deg(ptm[k]);
        }
    } else if (mode == "masks") {
        target.mode = TargetSpec::Mode::Masks;
        for (const auto& r : j.at("masks")) {
            MaskRow row;
            row.quantity = quantity_from_name(r.at("quantity").get<std::string>());
            const auto band = r.at("band_GHz").get<std::vector<double>>();
            if (band.size() != 2)
                throw InvalidArgument("mask band must be [f1, f2]");
            row.f1_ghz = band[0];
            row.f2_ghz = band[1];
            row.min = r.at("min").get<double>();
            row.max = r.at("max").get<double>();
            target.masks.push_back(row);
        }
    } else {
        throw InvalidArgument("target mode must be 'exact' or 'masks'");
    }
    target.validate();
    return target;
}

double exact_objective(const em::SpectrumLabel& candidate, const TargetSpec& target)
{
    if (target.mode != TargetSpec::Mode::Exact)
        throw InvalidArgument("exact_objective requires an exact-mode target");
    if (candidate.grid != target.grid)
        throw InvalidArgument("candidate and target grids differ");
    double acc = 0;
    for (int i = 0; i < target.grid.n_points; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double d1 = candidate.mag_te[k] - target.exact.mag_te[k];
        const double d2 = candidate.mag_tm[k] - target.exact.mag_tm[k];
        const double d3 = candidate.phase_te[k] - target.exact.phase_te[k];
        const double d4 = candidate.phase_tm[k] - target.exact.phase_tm[k];
        acc += d1 * d1 + d2 * d2 + d3 * d3 + d4 * d4;
    }
    return acc / target.grid.n_points;
}

namespace {

double quantity_value(const em::SpectrumLabel& s, MaskQuantity q, std::size_t k)
{
    switch (q) {
    case MaskQuantity::MagTE: return s.mag_te[k];
    case MaskQuantity::MagTM: return s.mag_tm[k];
    case MaskQuantity::PhaseTE: return em::wrap_deg(em::denormalize_phase(s.phase_te[k]));
    case MaskQuantity::PhaseTM: return em::wrap_deg(em::denormalize_phase(s.phase_tm[k]));
    case MaskQuantity::PhaseDiff:
        return em::wrap_deg(em::denormalize_phase(s.phase_te[k]) -
                            em::denormalize_phase(s.phase_tm[k]));
    }
    throw InvalidArgument("bad mask quantity");
}

} // namespace

double mask_objective(const em::SpectrumLabel& candidate, const TargetSpec& target)
{
    if (target.mode != TargetSpec::Mode::Masks)
        throw InvalidArgument("mask_objective requires a mask-mode target");
    if (candidate.grid != target.grid)
        throw InvalidArgument("candidate and target grids differ");
    double acc = 0;
    for (const auto& row : target.masks)
        for (int i = 0; i < target.grid.n_points; ++i) {
            const double f = target.grid.freq_ghz(i);
            if (f < row.f1_ghz - 1e-9 || f > row.f2_ghz + 1e-9)
                continue;
            const double v = quantity_value(candidate, row.quantity, static_cast<std::size_t>(i));
            if (v >= row.min && v <= row.max)
                continue;
            acc += 2.0 * std::abs((v - row.min) * (v - row.max));
        }
    return acc;
}

double objective(const em::SpectrumLabel& candidate, const TargetSpec& target)
{
    return target.mode == TargetSpec::Mode::Exact ? exact_objective(candidate, target)
                                                  : mask_objective(candidate, target);
}

} // namespace emms::inverse
