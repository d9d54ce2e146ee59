#include "emms/inverse/pso.hpp"

#include <algorithm>
#include <limits>

namespace emms::inverse {

namespace {

struct Swarm {
    std::vector<std::vector<double>> x, v, pbest_x;
    std::vector<double> pbest_f;
    std::vector<double> gbest_x;
    double gbest_f = std::numeric_limits<double>::infinity();
};

} // namespace

// Shared driver: `fit` maps a position to its objective and may capture
// side-channel bookkeeping for the best particle.
template <typename Fit>
static PsoResult run_pso(int dim, Fit&& fit, const PsoConfig& cfg)
{
    cfg.validate();
    if (dim < 1)
        throw InvalidArgument("PSO dimension must be positive");

    auto rng = substream(cfg.seed, 0x70736fULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double range = cfg.bound_hi - cfg.bound_lo;

    Swarm s;
    s.x.assign(static_cast<std::size_t>(cfg.swarm_size), std::vector<double>(dim));
    s.v.assign(static_cast<std::size_t>(cfg.swarm_size), std::vector<double>(dim, 0.0));
    s.pbest_x = s.x;
    s.pbest_f.assign(static_cast<std::size_t>(cfg.swarm_size),
                     std::numeric_limits<double>::infinity());
    for (auto& xi : s.x)
        for (double& c : xi)
            c = cfg.bound_lo + range * unit(rng);
    // Warm starts replace the leading random positions; the random draws
    // above still happen so the velocity-update stream is unchanged.
    for (std::size_t p = 0; p < cfg.init_positions.size() &&
                            p < static_cast<std::size_t>(cfg.swarm_size); ++p) {
        const auto& init = cfg.init_positions[p];
        if (static_cast<int>(init.size()) != dim)
            throw InvalidArgument("PSO warm-start position has wrong dimension");
        for (int d = 0; d < dim; ++d)
            s.x[p][static_cast<std::size_t>(d)] =
                std::clamp(init[static_cast<std::size_t>(d)], cfg.bound_lo, cfg.bound_hi);
    }

    PsoResult res;
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        for (int p = 0; p < cfg.swarm_size; ++p) {
            auto& xi = s.x[static_cast<std::size_t>(p)];
            const double f = fit(xi);
            if (f < s.pbest_f[static_cast<std::size_t>(p)]) {
                s.pbest_f[static_cast<std::size_t>(p)] = f;
                s.pbest_x[static_cast<std::size_t>(p)] = xi;
            }
            if (f < s.gbest_f) {
                s.gbest_f = f;
                s.gbest_x = xi;
            }
        }
        res.trace.best_per_iteration.push_back(s.gbest_f);
        res.trace.iterations_run = iter + 1;
        if (s.gbest_f < cfg.epsilon) {
            res.trace.converged = true;
            break;
        }
        for (int p = 0; p < cfg.swarm_size; ++p) {
            auto& xi = s.x[static_cast<std::size_t>(p)];
            auto& vi = s.v[static_cast<std::size_t>(p)];
            const auto& pi = s.pbest_x[static_cast<std::size_t>(p)];
            for (int d = 0; d < dim; ++d) {
                const double r1 = unit(rng);
                const double r2 = unit(rng);
                vi[static_cast<std::size_t>(d)] =
                    cfg.inertia * vi[static_cast<std::size_t>(d)] +
                    cfg.cognitive * r1 *
                        (pi[static_cast<std::size_t>(d)] - xi[static_cast<std::size_t>(d)]) +
                    cfg.social * r2 *
                        (s.gbest_x[static_cast<std::size_t>(d)] - xi[static_cast<std::size_t>(d)]);
                double nx = xi[static_cast<std::size_t>(d)] + vi[static_cast<std::size_t>(d)];
                if (nx < cfg.bound_lo) {
                    nx = cfg.bound_lo;
                    vi[static_cast<std::size_t>(d)] = 0.0;
                } else if (nx > cfg.bound_hi) {
                    nx = cfg.bound_hi;
                    vi[static_cast<std::size_t>(d)] = 0.0;
                }
                xi[static_cast<std::size_t>(d)] = nx;
            }
        }
    }
    res.best_x = s.gbest_x;
    res.best_objective = s.gbest_f;
    return res;
}

PsoResult pso_optimize(int dim,
                       const std::function<double(const std::vector<double>&)>& fitness,
                       const PsoConfig& config)
{
    return run_pso(dim, fitness, config);
}

LatentPsoResult latent_pso(const LatentEvaluator& eval, const TargetSpec& target,
                           const PsoConfig& config)
{
    target.validate();
    const int dim = eval.latent_dim();
    const auto* cache = eval.stack_eval().cache;
    const long invocations_before = cache ? cache->solver_invocations() : 0;

    LatentPsoResult out;
    out.best_objective = std::numeric_limits<double>::infinity();
    PsoTrace counts;
    std::vector<float> zf(static_cast<std::size_t>(dim));
    auto fit = [&](const std::vector<double>& z) {
        for (int d = 0; d < dim; ++d)
            zf[static_cast<std::size_t>(d)] = static_cast<float>(z[static_cast<std::size_t>(d)]);
        LatentEvaluator::Result r = eval.evaluate(zf.data(), target);
        switch (r.decision.route) {
        case RouterDecision::Case::Predictor: ++counts.predictor_count; break;
        case RouterDecision::Case::CascadeKnown: ++counts.cascade_known_count; break;
        case RouterDecision::Case::SolveNew: ++counts.solve_new_count; break;
        }
        const double f = r.objective;
        if (f < out.best_objective) {
            out.best_objective = f;
            out.best_z = z;
            out.best = std::move(r);
        }
        return f;
    };
    PsoResult core = run_pso(dim, [&](const std::vector<double>& z) { return fit(z); }, config);

    out.best_z = core.best_x;
    out.best_objective = core.best_objective;
    out.trace = core.trace;
    out.trace.predictor_count = counts.predictor_count;
    out.trace.cascade_known_count = counts.cascade_known_count;
    out.trace.solve_new_count = counts.solve_new_count;
    out.trace.solver_invocations = cache ? cache->solver_invocations() - invocations_before : 0;
    return out;
}

} // namespace emms::inverse
