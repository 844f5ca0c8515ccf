#include "panscope/bias.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "panscope/error.hpp"
#include "panscope/rng.hpp"

namespace panscope {

std::string_view to_string(VariantKind kind) noexcept {
    switch (kind) {
    case VariantKind::original: return "original";
    case VariantKind::reflect_all: return "reflect_all";
    case VariantKind::pan_reflect: return "pan_reflect";
    case VariantKind::rand_reflect: return "rand_reflect";
    }
    return "original";
}

std::optional<VariantKind> parse_variant_kind(std::string_view text) noexcept {
    std::string t(text);
    std::replace(t.begin(), t.end(), '-', '_');
    if (t == "original") return VariantKind::original;
    if (t == "reflect" || t == "reflect_all") return VariantKind::reflect_all;
    if (t == "pan_reflect") return VariantKind::pan_reflect;
    if (t == "rand_reflect") return VariantKind::rand_reflect;
    return std::nullopt;
}

namespace {

void check_ids(const ConvNetSpec& model, std::span<const NeuronId> ids) {
    for (const NeuronId& id : ids) {
        if (id.layer >= model.layers.size() || id.channel >= model.layers[id.layer].out_channels) {
            throw Error(ErrorCode::unknown_neuron,
                        "neuron " + std::to_string(id.layer) + ":" + std::to_string(id.channel) + " is not in the model");
        }
    }
}

} // namespace

std::vector<NeuronId> sample_random_control(const ConvNetSpec& model, std::span<const NeuronId> pan_set,
                                            std::uint64_t seed) {
    check_ids(model, pan_set);
    std::map<std::size_t, std::set<std::size_t>> by_layer;
    for (const NeuronId& id : pan_set) by_layer[id.layer].insert(id.channel);

    Rng rng(seed);
    std::vector<NeuronId> control;
    for (const auto& [layer, pans] : by_layer) {
        std::vector<std::size_t> candidates;
        for (std::size_t ch = 0; ch < model.layers[layer].out_channels; ++ch) {
            if (!pans.contains(ch)) candidates.push_back(ch);
        }
        if (candidates.size() < pans.size()) {
            throw Error(ErrorCode::insufficient_neurons, "layer " + model.layers[layer].name + " has " +
                                                             std::to_string(candidates.size()) + " non-PAN neurons, " +
                                                             std::to_string(pans.size()) + " needed");
        }
        for (std::size_t pick : rng.sample_without_replacement(candidates.size(), pans.size())) {
            control.push_back({layer, candidates[pick]});
        }
    }
    std::sort(control.begin(), control.end());
    return control;
}

std::vector<NeuronId> variant_neurons(const ConvNetSpec& model, const VariantSpec& spec) {
    switch (spec.kind) {
    case VariantKind::original: return {};
    case VariantKind::reflect_all: {
        std::vector<NeuronId> all;
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            for (std::size_t ch = 0; ch < model.layers[l].out_channels; ++ch) all.push_back({l, ch});
        }
        return all;
    }
    case VariantKind::pan_reflect: {
        check_ids(model, spec.pan_set);
        std::vector<NeuronId> ids = spec.pan_set;
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return ids;
    }
    case VariantKind::rand_reflect: return sample_random_control(model, spec.pan_set, spec.seed);
    }
    return {};
}

ConvNetSpec make_variant(const ConvNetSpec& model, const VariantSpec& spec) {
    ConvNetSpec out = model;
    if (spec.kind == VariantKind::original) return out;
    if (spec.kind == VariantKind::reflect_all) {
        for (auto& layer : out.layers) {
            layer.policy = PaddingPolicy::reflect;
            layer.channel_policies.clear();
        }
        return out;
    }
    for (const NeuronId& id : variant_neurons(model, spec)) {
        ConvLayerSpec& layer = out.layers[id.layer];
        if (layer.channel_policies.empty()) layer.channel_policies.assign(layer.out_channels, layer.policy);
        layer.channel_policies[id.channel] = PaddingPolicy::reflect;
    }
    return out;
}

std::vector<double> ClassOdds::defined_log_odds() const {
    std::vector<double> out;
    for (const auto& v : log_odds) {
        if (v) out.push_back(*v);
    }
    return out;
}

ClassOdds class_odds(const ClassScores& variant, const ClassScores& original) {
    if (variant.samples != original.samples || variant.classes != original.classes ||
        variant.values.size() != original.values.size()) {
        throw Error(ErrorCode::shape_mismatch, "variant and original scores differ in shape");
    }
    ClassOdds result;
    result.odds.resize(variant.classes);
    result.log_odds.resize(variant.classes);
    for (std::size_t c = 0; c < variant.classes; ++c) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < variant.samples; ++i) {
            num += variant.row(i)[c];
            den += original.row(i)[c];
        }
        if (den > 0.0) {
            result.odds[c] = num / den;
            if (num > 0.0) result.log_odds[c] = std::log(num / den);
        }
    }
    return result;
}

ClassThresholds threshold_classes(const ClassOdds& odds, double cut) {
    ClassThresholds t;
    for (std::size_t c = 0; c < odds.odds.size(); ++c) {
        if (!odds.odds[c]) continue;
        const double o = *odds.odds[c];
        if (o > 1.0 + cut) t.above.push_back(c);
        if (o > 0.0 && 1.0 / o > 1.0 + cut) t.below.push_back(c);
    }
    return t;
}

double logit_l1_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::shape_mismatch, "logit vectors differ in length");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

std::size_t DivergenceRanking::disagreements_in_top(std::size_t count) const {
    const std::size_t n = std::min(count, entries.size());
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(n),
                      [](const DivergenceEntry& e) { return !e.agree(); }));
}

namespace {

std::size_t argmax(std::span<const double> row) {
    return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

} // namespace

DivergenceRanking rank_samples_by_divergence(const ClassScores& a, const ClassScores& b) {
    if (a.samples != b.samples || a.classes != b.classes) {
        throw Error(ErrorCode::shape_mismatch, "paired logits differ in shape");
    }
    DivergenceRanking r;
    r.entries.reserve(a.samples);
    for (std::size_t i = 0; i < a.samples; ++i) {
        r.entries.push_back({i, logit_l1_distance(a.row(i), b.row(i)), argmax(a.row(i)), argmax(b.row(i))});
    }
    std::stable_sort(r.entries.begin(), r.entries.end(),
                     [](const DivergenceEntry& x, const DivergenceEntry& y) { return x.distance > y.distance; });
    return r;
}

double population_stddev(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n);
}

namespace {

double mass_error(const ClassScores& probs) {
    double worst = 0.0;
    for (std::size_t i = 0; i < probs.samples; ++i) {
        const auto row = probs.row(i);
        worst = std::max(worst, std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0));
    }
    return worst;
}

} // namespace

OddsReport run_bias_experiment(const ConvNetSpec& model, const VariantSpec& variant, const Tensor& images,
                               const BiasExperimentOptions& options) {
    if (!model.head) throw Error(ErrorCode::invalid_argument, "bias experiments need a model with a classifier head");
    OddsReport report;
    report.variant = variant;
    report.cut = options.cut;
    report.reflected = variant_neurons(model, variant);

    const ConvNetSpec changed = make_variant(model, variant);
    const ClassScores logits_original = *forward(model, images).logits;
    const ClassScores logits_variant = *forward(changed, images).logits;
    const ClassScores p_original = softmax(logits_original);
    const ClassScores p_variant = softmax(logits_variant);

    report.max_softmax_mass_error = std::max(mass_error(p_original), mass_error(p_variant));
    report.odds = class_odds(p_variant, p_original);
    const std::vector<double> defined = report.odds.defined_log_odds();
    report.log_odds_stddev = population_stddev(defined);
    report.beyond_cut = threshold_classes(report.odds, options.cut);
    if (!defined.empty()) report.log_odds_histogram = histogram(defined, options.histogram_bins);
    report.ranking = rank_samples_by_divergence(logits_original, logits_variant);
    report.top_decile = (images.shape().batch + 9) / 10;
    report.top_decile_disagreements = report.ranking.disagreements_in_top(report.top_decile);
    return report;
}

} // namespace panscope
