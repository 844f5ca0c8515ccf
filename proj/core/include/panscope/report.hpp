#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "panscope/bias.hpp"
#include "panscope/detector.hpp"
#include "panscope/histogram.hpp"
#include "panscope/planted.hpp"

namespace panscope {

std::string_view tool_version() noexcept;

/// Where a census came from; embedded in the report so it can be re-run.
struct CensusSource {
    std::string model_path;                 // detect: model JSON
    std::string trace_path;                 // detect-trace / detect --batch
    std::optional<SyntheticBatchConfig> synthetic;
};

/// Layer names are taken from the census; neuron layers are written by name.
nlohmann::json census_to_json(const Census& census, const CensusSource& source);

struct CensusDocument {
    Census census;
    CensusSource source;
};

/// Throws Error(format) on schema violations.
CensusDocument census_from_json(const nlohmann::json& doc);

/// PAN neurons of a census document resolved against the model's layer names.
/// Throws Error(unknown_neuron) for layers the model does not have.
std::vector<NeuronId> census_pan_set(const CensusDocument& doc, const ConvNetSpec& model);

nlohmann::json truth_to_json(const GroundTruth& truth, const ConvNetSpec& model, std::uint64_t seed,
                             const SyntheticBatchConfig& calibration);

struct TruthDocument {
    GroundTruth truth;
    std::uint64_t seed = 0;
    SyntheticBatchConfig calibration;
};

TruthDocument truth_from_json(const nlohmann::json& doc, const ConvNetSpec& model);

nlohmann::json evaluation_to_json(const DetectorEvaluation& evaluation, const DetectorConfig& config);

nlohmann::json odds_report_to_json(const OddsReport& report, const ConvNetSpec& model);

/// "bin_lo,bin_hi,count" rows.
std::string histogram_csv(const Histogram& histogram);

/// Histograms of the five regions plus the truncated centre ends of one
/// neuron over shared bin edges; one "padding,region,bin_lo,bin_hi,count" row
/// per bin. `label` names the padding setting the samples came from.
struct RegionHistogramSet {
    std::string padding;
    RegionSamples regions;
};

std::string region_histograms_csv(const std::vector<RegionHistogramSet>& sets, std::size_t bins);

/// "padding,sample,row,col,value" rows of single activation maps.
struct HeatmapEntry {
    std::string padding;
    std::size_t sample = 0;
    PlaneView map;
};

std::string heatmap_csv(const std::vector<HeatmapEntry>& entries);

/// Pretty JSON with a trailing newline.
std::string dump_json(const nlohmann::json& doc);

} // namespace panscope
