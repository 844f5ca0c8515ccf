#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "panscope/conv.hpp"
#include "panscope/detector.hpp"
#include "panscope/histogram.hpp"

namespace panscope {

enum class VariantKind { original, reflect_all, pan_reflect, rand_reflect };

std::string_view to_string(VariantKind kind) noexcept;
/// Accepts "original", "reflect", "reflect-all", "pan-reflect", "rand-reflect"
/// (underscores allowed in place of dashes).
std::optional<VariantKind> parse_variant_kind(std::string_view text) noexcept;

struct VariantSpec {
    VariantKind kind = VariantKind::original;
    std::vector<NeuronId> pan_set;  // pan_reflect, and the exclusion set for rand_reflect
    std::uint64_t seed = 0;         // rand_reflect
};

/// Uniformly sampled neurons outside `pan_set` with the same per-layer
/// counts. Throws Error(insufficient_neurons) if a layer lacks candidates and
/// Error(unknown_neuron) for ids outside the model.
std::vector<NeuronId> sample_random_control(const ConvNetSpec& model, std::span<const NeuronId> pan_set,
                                            std::uint64_t seed);

/// Padding-swap variant. Weights are never modified; pan/rand variants only
/// switch the designated output channels to reflect padding.
ConvNetSpec make_variant(const ConvNetSpec& model, const VariantSpec& spec);

/// The neurons a variant reflects (empty for original; every neuron for reflect_all).
std::vector<NeuronId> variant_neurons(const ConvNetSpec& model, const VariantSpec& spec);

struct ClassOdds {
    std::vector<std::optional<double>> odds;     // nullopt: zero original mass
    std::vector<std::optional<double>> log_odds; // natural log

    std::vector<double> defined_log_odds() const;
};

/// odds(c) = sum_i variant_i[c] / sum_i original_i[c].
/// Throws Error(shape_mismatch) when the matrices differ in shape.
ClassOdds class_odds(const ClassScores& probs_variant, const ClassScores& probs_original);

struct ClassThresholds {
    std::vector<std::size_t> above; // odds > 1 + cut
    std::vector<std::size_t> below; // 1 / odds > 1 + cut
};

ClassThresholds threshold_classes(const ClassOdds& odds, double cut);

/// Manhattan distance; Error(shape_mismatch) on length mismatch.
double logit_l1_distance(std::span<const double> a, std::span<const double> b);

struct DivergenceEntry {
    std::size_t sample = 0;
    double distance = 0.0;
    std::size_t prediction_a = 0;
    std::size_t prediction_b = 0;
    bool agree() const noexcept { return prediction_a == prediction_b; }
};

struct DivergenceRanking {
    std::vector<DivergenceEntry> entries; // descending distance, ties by sample index

    /// Prediction disagreements among the first `count` entries.
    std::size_t disagreements_in_top(std::size_t count) const;
};

DivergenceRanking rank_samples_by_divergence(const ClassScores& logits_a, const ClassScores& logits_b);

double population_stddev(std::span<const double> values);

struct OddsReport {
    VariantSpec variant;
    std::vector<NeuronId> reflected;
    ClassOdds odds;
    double log_odds_stddev = 0.0;
    ClassThresholds beyond_cut;
    double cut = 0.07;
    std::optional<Histogram> log_odds_histogram; // absent when no class is defined
    DivergenceRanking ranking;
    std::size_t top_decile = 0;
    std::size_t top_decile_disagreements = 0;
    /// Largest |sum_c p - 1| over every image and both models.
    double max_softmax_mass_error = 0.0;
};

struct BiasExperimentOptions {
    double cut = 0.07;
    std::size_t histogram_bins = 20;
};

/// Paired inference of the original model and the variant on `images`.
/// The model must have a head (Error(invalid_argument) otherwise).
OddsReport run_bias_experiment(const ConvNetSpec& model, const VariantSpec& variant, const Tensor& images,
                               const BiasExperimentOptions& options = {});

} // namespace panscope
