#pragma once

#include <cmath>
#include <functional>

#include "emms/inverse/router.hpp"
#include "emms/util/rng.hpp"

namespace emms::inverse {

// Global-best particle swarm with Clerc constriction defaults.
struct PsoConfig {
    int swarm_size = 50;
    int iterations = 200;
    double bound_lo = -3.5;
    double bound_hi = 3.5;
    double inertia = 0.729;
    double cognitive = 1.49445;
    double social = 1.49445;
    double epsilon = 1e-3;       // stop once the global best drops below this
    std::uint64_t seed = 1;

    // Optional warm starts: the first init_positions.size() particles are
    // placed at these positions (clamped to the bounds) instead of random
    // ones. Each entry must match the search dimension; extra entries beyond
    // the swarm size are ignored.
    std::vector<std::vector<double>> init_positions;

    void validate() const
    {
        if (swarm_size < 1 || iterations < 1)
            throw InvalidArgument("PSO needs at least one particle and one iteration");
        if (!(bound_lo < bound_hi) || !std::isfinite(bound_lo) || !std::isfinite(bound_hi))
            throw InvalidArgument("PSO bounds must be finite with lo < hi");
        if (inertia <= 0 || cognitive <= 0 || social <= 0 || epsilon <= 0)
            throw InvalidArgument("PSO coefficients must be positive");
    }
};

struct PsoTrace {
    std::vector<double> best_per_iteration;   // non-increasing
    long predictor_count = 0;
    long cascade_known_count = 0;
    long solve_new_count = 0;
    long solver_invocations = 0;   // cache-reported delta when a cache is attached
    int iterations_run = 0;
    bool converged = false;
};

struct PsoResult {
    std::vector<double> best_x;
    double best_objective = 0;
    PsoTrace trace;
};

// Minimize an arbitrary fitness over a dim-dimensional box. Deterministic
// given the seed; fitness is called serially in particle order.
PsoResult pso_optimize(int dim, const std::function<double(const std::vector<double>&)>& fitness,
                       const PsoConfig& config);

// PSO over one latent space with evaluate_latent as fitness. The returned
// decision/label/design belong to the best latent found.
struct LatentPsoResult {
    std::vector<double> best_z;
    double best_objective = 0;
    PsoTrace trace;
    LatentEvaluator::Result best;
};

LatentPsoResult latent_pso(const LatentEvaluator& eval, const TargetSpec& target,
                           const PsoConfig& config);

} // namespace emms::inverse
