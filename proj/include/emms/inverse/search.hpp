#pragma once

#include <filesystem>

#include "emms/inverse/pso.hpp"

namespace emms::inverse {

// Per-latent-space outcome of a design search. `verified` is always the
// solver-path spectrum of the decoded winner, independent of which route
// the PSO used internally.
struct SpaceResult {
    int layer_count = 2;
    double thickness_mm = 1.575;
    LatentPsoResult pso;
    em::SpectrumLabel verified;
    double verified_objective = 0;
};

struct DesignReport {
    std::vector<SpaceResult> spaces;
    int winner = -1;                 // index into spaces
    TargetSpec target;
};

// Run PSO in each supplied latent space, re-verify every winner through the
// cascade/solver path, and pick the global best by verified objective.
// Spaces whose evaluation throws are skipped with a warning on stderr; at
// least one space must succeed.
DesignReport design_search(const std::vector<const LatentEvaluator*>& spaces,
                           const TargetSpec& target, const PsoConfig& config);

nlohmann::json report_to_json(const DesignReport& report);

// report.json plus spectrum.csv of the winning verified spectrum.
void write_report(const DesignReport& report, const std::filesystem::path& dir);

} // namespace emms::inverse
