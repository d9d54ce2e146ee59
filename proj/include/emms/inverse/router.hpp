#pragma once

#include <unordered_map>

#include "emms/inverse/objective.hpp"
#include "emms/neural/bundle.hpp"
#include "emms/shapes/dataset.hpp"

namespace emms::inverse {

// Which evaluation path produced a candidate's spectrum, with the matching
// distances recorded for audit. The pair distance compares the concatenated
// two-layer image against the training set; the per-layer distances compare
// each decoded layer against its catalog.
struct RouterDecision {
    enum class Case { Predictor, CascadeKnown, SolveNew };
    Case route = Case::SolveNew;
    double pair_distance = 1.0;
    int pair_index = -1;                 // training-sample index of the nearest pair
    double outer_distance = 1.0;
    double second_distance = 1.0;
    int outer_catalog_index = -1;
    int second_catalog_index = -1;
    std::string note;
};

std::string route_name(RouterDecision::Case c);

// Latent-space evaluation context for one trained (layers, thickness)
// bundle. Owns the packed catalog images used for snapping.
class LatentEvaluator {
public:
    LatentEvaluator(neural::ModelBundle<float>& bundle, const shapes::Dataset& dataset,
                    const shapes::StackEvaluator& eval, double gamma = 0.03);

    struct Result {
        double objective = 0;
        RouterDecision decision;
        em::SpectrumLabel label;
        shapes::EmmsDesign design;
    };

    // Decode z -> binarized masks -> route (predictor / cascade_known /
    // solve_new) -> spectrum -> objective.
    Result evaluate(const float* z, const TargetSpec& target) const;

    // Binarize the decoder output and fill the routing distances without
    // running any solver.
    shapes::EmmsDesign decode_design(const float* z, RouterDecision& decision) const;

    // Solver-path spectrum of a design, bypassing the router entirely.
    em::SpectrumLabel verify(const shapes::EmmsDesign& design) const;

    const neural::ModelBundle<float>& bundle() const { return *bundle_; }
    const shapes::Dataset& dataset() const { return *dataset_; }
    const shapes::StackEvaluator& stack_eval() const { return *eval_; }
    double gamma() const { return gamma_; }
    int latent_dim() const { return bundle_->arch.latent_dim; }

private:
    neural::ModelBundle<float>* bundle_;
    const shapes::Dataset* dataset_;
    const shapes::StackEvaluator* eval_;
    double gamma_;
    std::vector<shapes::PackedMask> outer_packed_, second_packed_;

    // PSO re-evaluates converged candidates thousands of times, and novel
    // decoded masks rarely recur across runs, so solver-routed labels are
    // memoized in memory (a label is ~1 kB) instead of letting every one-off
    // mask write its full GSM set through the disk cache. The disk cache is
    // still used for catalog primitives, which do recur across runs. Not
    // thread-safe; fitness evaluation is serial by contract.
    shapes::StackEvaluator uncached_;
    mutable std::unordered_map<std::uint64_t, em::SpectrumLabel> label_memo_;

    static std::uint64_t memo_key(const shapes::EmmsDesign& design);
    void remember(std::uint64_t key, const em::SpectrumLabel& label) const;
};

} // namespace emms::inverse
