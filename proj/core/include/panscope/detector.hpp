#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "panscope/conv.hpp"
#include "panscope/regions.hpp"

namespace panscope {

enum class Border : std::uint8_t { top = 0, bottom = 1, left = 2, right = 3 };

inline constexpr std::array<Border, 4> kBorders = {Border::top, Border::bottom, Border::left, Border::right};

char border_letter(Border border) noexcept;
std::string_view border_name(Border border) noexcept;

/// Subset of {T, B, L, R}.
class BorderSet {
public:
    constexpr BorderSet() = default;
    constexpr BorderSet(std::initializer_list<Border> borders) {
        for (Border b : borders) insert(b);
    }

    static constexpr BorderSet from_bits(std::uint8_t bits) { BorderSet s; s.bits_ = bits & 0xFu; return s; }

    constexpr void insert(Border b) { bits_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(b)); }
    constexpr bool contains(Border b) const { return (bits_ >> static_cast<unsigned>(b)) & 1u; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::uint8_t bits() const { return bits_; }
    std::size_t size() const;

    /// Letters in T, B, L, R order ("" when empty).
    std::string letters() const;
    /// Inverse of letters(); accepts any order, rejects repeats and unknown letters.
    static std::optional<BorderSet> parse(std::string_view letters);

    friend constexpr bool operator==(BorderSet, BorderSet) = default;

private:
    std::uint8_t bits_ = 0;
};

/// Canonical type name over the 15 non-empty subsets ("T", "LR", "TBLR", ...).
/// Throws Error(invalid_argument) for the empty set.
std::string classify_type(BorderSet borders);

/// All 15 type names in canonical order: singles, pairs, triples, TBLR.
const std::array<std::string, 15>& pan_type_names();
/// Position of a type in pan_type_names().
std::size_t pan_type_index(BorderSet borders);

struct NeuronId {
    std::size_t layer = 0;
    std::size_t channel = 0;

    friend auto operator<=>(const NeuronId&, const NeuronId&) = default;
};

struct KSReport {
    NeuronId neuron;
    std::array<double, 4> ks{};       // KS(border, centre)
    std::array<double, 4> ks_plus{};  // border above the k highest centre values
    std::array<double, 4> ks_minus{}; // border below the k lowest centre values
    bool shortfall = false;

    double ks_at(Border b) const { return ks[static_cast<std::size_t>(b)]; }
    double ks_plus_at(Border b) const { return ks_plus[static_cast<std::size_t>(b)]; }
    double ks_minus_at(Border b) const { return ks_minus[static_cast<std::size_t>(b)]; }
};

enum class Verdict { none, edge_candidate, pan };

std::string_view to_string(Verdict verdict) noexcept;
std::optional<Verdict> parse_verdict(std::string_view text) noexcept;

struct PANLabel {
    Verdict verdict = Verdict::none;
    BorderSet borders;     // non-empty iff verdict == pan
    std::string type_name; // classify_type(borders) when pan
};

struct DetectorConfig {
    double theta = 0.5;

    /// Throws Error(invalid_argument) unless 0 < theta <= 1.
    void validate() const;
};

/// KS of every border against the full centre, plus the one-sided tests
/// against the centre truncated to k = |border| values at each end.
KSReport score_neuron(const RegionSamples& regions, NeuronId neuron = {});

/// A border is positive when ks >= theta and (ks_plus >= theta or
/// ks_minus >= theta). Any positive border makes the neuron a PAN; failing
/// that, any ks >= theta makes it an edge candidate.
PANLabel label_neuron(const KSReport& report, const DetectorConfig& config);

struct NeuronRecord {
    KSReport report;
    PANLabel label;
};

struct ExcludedNeuron {
    NeuronId neuron;
    std::string reason;
};

struct LayerCensus {
    std::string name;
    std::size_t layer_index = 0;
    std::size_t neurons = 0; // layer size, excluded neurons included
    std::size_t pans = 0;
    std::size_t edge_candidates = 0;
    std::size_t excluded = 0;

    /// Percentage of PANs relative to layer size, rounded down.
    std::size_t percent() const noexcept { return neurons == 0 ? 0 : (pans * 100) / neurons; }
};

struct Census {
    DetectorConfig config;
    std::vector<LayerCensus> layers;
    std::vector<NeuronRecord> records; // analysed neurons, layer then channel order
    std::vector<ExcludedNeuron> excluded;
    std::vector<std::string> skipped_layers; // 1x1 layers, not analysed

    std::size_t total_neurons() const;
    std::size_t total_pans() const;
    std::vector<NeuronId> pan_set() const;
    std::vector<NeuronId> flagged_set() const; // pan or edge candidate
    std::array<std::size_t, 15> type_counts() const;
    const NeuronRecord* find(NeuronId id) const;
};

/// Census over every layer of a recorded trace. `eligible[i]` (when given)
/// selects the layers to analyse; the others are listed as skipped.
Census census_trace(const ActivationTrace& trace, const DetectorConfig& config,
                    const std::vector<bool>& eligible = {});

/// Runs the model on `batch` and analyses every layer with a kernel larger than 1x1.
Census census(const ConvNetSpec& model, const Tensor& batch, const DetectorConfig& config);

/// Relabels an existing census at a different threshold (statistics reused).
Census relabel(const Census& census, const DetectorConfig& config);

} // namespace panscope
