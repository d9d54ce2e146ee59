#include "emms/shapes/stack.hpp"

namespace emms::shapes {

namespace {

nlohmann::json primitive_to_json(const PrimitiveSpec& s)
{
    nlohmann::json j;
    j["family"] = family_name(s.family);
    switch (s.family) {
    case Family::JC:
    case Family::CompJC:
        j["l_JC,x"] = s.l_x;
        j["l_JC,y"] = s.l_y;
        break;
    case Family::RP:
    case Family::CompRP:
        j["l_P,x"] = s.l_x;
        j["l_P,y"] = s.l_y;
        break;
    case Family::CS:
        j["r_CS"] = s.r;
        break;
    case Family::CR:
        j["r_CR"] = s.r;
        j["w_CR"] = s.w;
        break;
    }
    return j;
}

PrimitiveSpec primitive_from_json(const nlohmann::json& j)
{
    PrimitiveSpec s;
    s.family = family_from_name(j.at("family").get<std::string>());
    switch (s.family) {
    case Family::JC:
    case Family::CompJC:
        s.l_x = j.at("l_JC,x").get<double>();
        s.l_y = j.at("l_JC,y").get<double>();
        break;
    case Family::RP:
    case Family::CompRP:
        s.l_x = j.at("l_P,x").get<double>();
        s.l_y = j.at("l_P,y").get<double>();
        break;
    case Family::CS:
        s.r = j.at("r_CS").get<double>();
        break;
    case Family::CR:
        s.r = j.at("r_CR").get<double>();
        s.w = j.at("w_CR").get<double>();
        break;
    }
    return s;
}

nlohmann::json layer_to_json(const LayerPattern& layer)
{
    nlohmann::json j;
    if (layer.primitive) {
        j["primitive"] = primitive_to_json(*layer.primitive);
    } else {
        std::string bits(sheet::kMaskPixels, '0');
        for (int k = 0; k < sheet::kMaskPixels; ++k)
            if (layer.mask.data()[static_cast<std::size_t>(k)])
                bits[static_cast<std::size_t>(k)] = '1';
        j["mask"] = bits;
    }
    return j;
}

LayerPattern layer_from_json(const nlohmann::json& j)
{
    if (j.contains("primitive"))
        return LayerPattern::from_primitive(primitive_from_json(j.at("primitive")));
    const auto bits = j.at("mask").get<std::string>();
    if (bits.size() != sheet::kMaskPixels)
        throw InvalidArgument("mask string must have 2704 characters");
    sheet::PixelMask m;
    for (int k = 0; k < sheet::kMaskPixels; ++k) {
        const char c = bits[static_cast<std::size_t>(k)];
        if (c != '0' && c != '1')
            throw InvalidArgument("mask string must be binary");
        m.data()[static_cast<std::size_t>(k)] = c == '1' ? 1 : 0;
    }
    return LayerPattern::from_mask(m);
}

} // namespace

nlohmann::json design_to_json(const EmmsDesign& design)
{
    nlohmann::json j;
    j["layer_count"] = design.layer_count;
    j["gap_thickness_mm"] = design.gap_thickness_mm;
    j["outer"] = layer_to_json(design.outer);
    j[design.layer_count == 3 ? "middle" : "bottom"] = layer_to_json(design.second);
    return j;
}

EmmsDesign design_from_json(const nlohmann::json& j)
{
    EmmsDesign d;
    d.layer_count = j.at("layer_count").get<int>();
    d.gap_thickness_mm = j.at("gap_thickness_mm").get<double>();
    d.outer = layer_from_json(j.at("outer"));
    d.second = layer_from_json(j.at(d.layer_count == 3 ? "middle" : "bottom"));
    d.validate();
    return d;
}

std::vector<em::Gsm> StackEvaluator::screen(const sheet::PixelMask& mask,
                                            const em::Medium& above, const em::Medium& below,
                                            const em::FrequencyGrid& grid) const
{
    sheet::ScreenContext ctx{above, below, y_metal};
    if (cache)
        return cache->solve_or_fetch(mask, ctx, modes, grid, backend);
    return backend.solve(mask, ctx, modes, grid);
}

StackResult stack_gsm(const EmmsDesign& design, const em::FrequencyGrid& grid,
                      const StackEvaluator& eval)
{
    design.validate();
    const em::Medium diel = eval.dielectric;
    const em::Medium vac = em::air();

    const auto top = eval.screen(design.outer.mask, vac, diel, grid);
    std::vector<em::Gsm> mid, bot;
    if (design.layer_count == 2) {
        bot = eval.screen(design.second.mask, diel, vac, grid);
    } else {
        mid = eval.screen(design.second.mask, diel, diel, grid);
        bot = eval.screen(design.outer.mask, diel, vac, grid);
    }

    StackResult res;
    res.gsms.resize(static_cast<std::size_t>(grid.n_points));
    res.label = em::SpectrumLabel(grid);
    for (int i = 0; i < grid.n_points; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double f = grid.freq_ghz(i);
        try {
            const em::Gsm slab = em::slab_gsm(diel, design.gap_thickness_mm, eval.modes, f);
            em::Gsm g = em::cascade(top[k], slab, eval.modes);
            if (design.layer_count == 3) {
                g = em::cascade(g, mid[k], eval.modes);
                g = em::cascade(g, slab, eval.modes);
            }
            g = em::cascade(g, bot[k], eval.modes);
            const auto t = em::extract_transmission(g, eval.modes);
            res.label.mag_te[k] = std::abs(t.te);
            res.label.phase_te[k] =
                em::normalize_phase_deg(std::arg(t.te) * 180.0 / std::numbers::pi);
            res.label.mag_tm[k] = std::abs(t.tm);
            res.label.phase_tm[k] =
                em::normalize_phase_deg(std::arg(t.tm) * 180.0 / std::numbers::pi);
            res.gsms[k] = std::move(g);
        } catch (const Error& e) {
            throw NumericalError("stack evaluation failed at " + std::to_string(f) +
                                 " GHz (" + std::to_string(design.layer_count) +
                                 "-layer design): " + e.what());
        }
    }
    return res;
}

} // namespace emms::shapes
