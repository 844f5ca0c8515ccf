#include "panscope/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "panscope/error.hpp"
#include "panscope/rng.hpp"

#ifndef PANSCOPE_VERSION
#define PANSCOPE_VERSION "0.0.0"
#endif

namespace panscope {

using nlohmann::json;

std::string_view tool_version() noexcept { return PANSCOPE_VERSION; }

namespace {

constexpr std::string_view kCensusFormat = "panscope-census";
constexpr std::string_view kTruthFormat = "panscope-truth";
constexpr int kReportVersion = 1;

json tool_block() { return {{"name", "panscope"}, {"version", tool_version()}}; }

json per_border(const std::array<double, 4>& values) {
    json j;
    for (Border b : kBorders) j[std::string(border_name(b))] = values[static_cast<std::size_t>(b)];
    return j;
}

std::array<double, 4> per_border_from(const json& j) {
    std::array<double, 4> out{};
    for (Border b : kBorders) out[static_cast<std::size_t>(b)] = j.at(std::string(border_name(b))).get<double>();
    return out;
}

json batch_config_json(const SyntheticBatchConfig& c) {
    return {{"seed", c.seed}, {"count", c.count}, {"height", c.height}, {"width", c.width}, {"channels", c.channels}};
}

SyntheticBatchConfig batch_config_from(const json& j) {
    SyntheticBatchConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.count = j.at("count").get<std::size_t>();
    c.height = j.at("height").get<std::size_t>();
    c.width = j.at("width").get<std::size_t>();
    c.channels = j.at("channels").get<std::size_t>();
    return c;
}

void expect_format(const json& doc, std::string_view format) {
    if (!doc.is_object() || !doc.contains("format") || doc.at("format") != format) {
        throw Error(ErrorCode::format, "expected a " + std::string(format) + " document");
    }
    if (doc.at("version").get<int>() != kReportVersion) {
        throw Error(ErrorCode::format, std::string(format) + ": unsupported version");
    }
}

std::string layer_name_of(const Census& c, std::size_t index) {
    for (const auto& l : c.layers) {
        if (l.layer_index == index) return l.name;
    }
    return "layer" + std::to_string(index);
}

template <typename F>
auto parse_guard(std::string_view what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::format, std::string(what) + ": " + e.what());
    }
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

json census_to_json(const Census& census, const CensusSource& source) {
    json doc;
    doc["format"] = kCensusFormat;
    doc["version"] = kReportVersion;
    doc["tool"] = tool_block();
    doc["config"] = {{"theta", census.config.theta}, {"prng", Rng::algorithm}};
    json src;
    src["model"] = source.model_path.empty() ? json(nullptr) : json(source.model_path);
    src["trace"] = source.trace_path.empty() ? json(nullptr) : json(source.trace_path);
    src["synthetic_batch"] = source.synthetic ? batch_config_json(*source.synthetic) : json(nullptr);
    doc["source"] = src;

    std::size_t edges = 0;
    doc["layers"] = json::array();
    for (const auto& l : census.layers) {
        doc["layers"].push_back({{"name", l.name},
                                 {"index", l.layer_index},
                                 {"neurons", l.neurons},
                                 {"pans", l.pans},
                                 {"percent", l.percent()},
                                 {"edge_candidates", l.edge_candidates},
                                 {"excluded", l.excluded}});
        edges += l.edge_candidates;
    }
    const std::size_t total = census.total_neurons();
    doc["totals"] = {{"neurons", total},
                     {"pans", census.total_pans()},
                     {"percent", total == 0 ? 0 : census.total_pans() * 100 / total},
                     {"edge_candidates", edges},
                     {"excluded", census.excluded.size()}};
    json types = json::object();
    const auto counts = census.type_counts();
    for (std::size_t i = 0; i < counts.size(); ++i) types[pan_type_names()[i]] = counts[i];
    doc["type_counts"] = types;

    doc["neurons"] = json::array();
    for (const auto& r : census.records) {
        doc["neurons"].push_back({{"layer", layer_name_of(census, r.report.neuron.layer)},
                                  {"layer_index", r.report.neuron.layer},
                                  {"channel", r.report.neuron.channel},
                                  {"ks", per_border(r.report.ks)},
                                  {"ks_plus", per_border(r.report.ks_plus)},
                                  {"ks_minus", per_border(r.report.ks_minus)},
                                  {"shortfall", r.report.shortfall},
                                  {"verdict", to_string(r.label.verdict)},
                                  {"type", r.label.verdict == Verdict::pan ? json(r.label.type_name) : json(nullptr)}});
    }
    doc["excluded"] = json::array();
    for (const auto& x : census.excluded) {
        doc["excluded"].push_back({{"layer", layer_name_of(census, x.neuron.layer)},
                                   {"layer_index", x.neuron.layer},
                                   {"channel", x.neuron.channel},
                                   {"reason", x.reason}});
    }
    doc["skipped_layers"] = census.skipped_layers;
    return doc;
}

CensusDocument census_from_json(const json& doc) {
    expect_format(doc, kCensusFormat);
    return parse_guard("census", [&] {
        CensusDocument out;
        Census& c = out.census;
        c.config.theta = doc.at("config").at("theta").get<double>();
        c.config.validate();
        const json& src = doc.at("source");
        if (!src.at("model").is_null()) out.source.model_path = src.at("model").get<std::string>();
        if (!src.at("trace").is_null()) out.source.trace_path = src.at("trace").get<std::string>();
        if (!src.at("synthetic_batch").is_null()) out.source.synthetic = batch_config_from(src.at("synthetic_batch"));
        for (const json& l : doc.at("layers")) {
            LayerCensus lc;
            lc.name = l.at("name").get<std::string>();
            lc.layer_index = l.at("index").get<std::size_t>();
            lc.neurons = l.at("neurons").get<std::size_t>();
            lc.pans = l.at("pans").get<std::size_t>();
            lc.edge_candidates = l.at("edge_candidates").get<std::size_t>();
            lc.excluded = l.at("excluded").get<std::size_t>();
            c.layers.push_back(lc);
        }
        for (const json& n : doc.at("neurons")) {
            NeuronRecord r;
            r.report.neuron = {n.at("layer_index").get<std::size_t>(), n.at("channel").get<std::size_t>()};
            r.report.ks = per_border_from(n.at("ks"));
            r.report.ks_plus = per_border_from(n.at("ks_plus"));
            r.report.ks_minus = per_border_from(n.at("ks_minus"));
            r.report.shortfall = n.at("shortfall").get<bool>();
            const auto verdict = parse_verdict(n.at("verdict").get<std::string>());
            if (!verdict) throw Error(ErrorCode::format, "census: unknown verdict");
            r.label.verdict = *verdict;
            if (*verdict == Verdict::pan) {
                const auto borders = BorderSet::parse(n.at("type").get<std::string>());
                if (!borders || borders->empty()) throw Error(ErrorCode::format, "census: bad PAN type");
                r.label.borders = *borders;
                r.label.type_name = borders->letters();
            }
            c.records.push_back(std::move(r));
        }
        std::sort(c.records.begin(), c.records.end(), [](const NeuronRecord& a, const NeuronRecord& b) {
            return a.report.neuron < b.report.neuron;
        });
        for (const json& x : doc.at("excluded")) {
            c.excluded.push_back({{x.at("layer_index").get<std::size_t>(), x.at("channel").get<std::size_t>()},
                                  x.at("reason").get<std::string>()});
        }
        c.skipped_layers = doc.at("skipped_layers").get<std::vector<std::string>>();
        return out;
    });
}

std::vector<NeuronId> census_pan_set(const CensusDocument& doc, const ConvNetSpec& model) {
    std::vector<NeuronId> out;
    for (const NeuronId& id : doc.census.pan_set()) {
        const std::string name = layer_name_of(doc.census, id.layer);
        const auto layer = model.find_layer(name);
        if (!layer) throw Error(ErrorCode::unknown_neuron, "census layer '" + name + "' is not in model " + model.name);
        if (id.channel >= model.layers[*layer].out_channels) {
            throw Error(ErrorCode::unknown_neuron, "census neuron " + name + ":" + std::to_string(id.channel) +
                                                       " is not in model " + model.name);
        }
        out.push_back({*layer, id.channel});
    }
    std::sort(out.begin(), out.end());
    return out;
}

json truth_to_json(const GroundTruth& truth, const ConvNetSpec& model, std::uint64_t seed,
                   const SyntheticBatchConfig& calibration) {
    json doc;
    doc["format"] = kTruthFormat;
    doc["version"] = kReportVersion;
    doc["tool"] = tool_block();
    doc["model"] = model.name;
    doc["prng"] = Rng::algorithm;
    doc["seed"] = seed;
    doc["calibration"] = batch_config_json(calibration);
    doc["entries"] = json::array();
    for (const auto& e : truth.entries) {
        doc["entries"].push_back({{"layer", model.layers.at(e.neuron.layer).name},
                                  {"channel", e.neuron.channel},
                                  {"kind", to_string(e.kind)},
                                  {"expected", to_string(e.expected)},
                                  {"borders", e.borders.letters()}});
    }
    return doc;
}

TruthDocument truth_from_json(const json& doc, const ConvNetSpec& model) {
    expect_format(doc, kTruthFormat);
    return parse_guard("truth", [&] {
        TruthDocument out;
        out.seed = doc.at("seed").get<std::uint64_t>();
        out.calibration = batch_config_from(doc.at("calibration"));
        for (const json& e : doc.at("entries")) {
            const std::string name = e.at("layer").get<std::string>();
            const auto layer = model.find_layer(name);
            if (!layer) throw Error(ErrorCode::unknown_neuron, "truth layer '" + name + "' is not in the model");
            GroundTruthEntry entry;
            entry.neuron = {*layer, e.at("channel").get<std::size_t>()};
            if (entry.neuron.channel >= model.layers[*layer].out_channels) {
                throw Error(ErrorCode::unknown_neuron, "truth channel out of range in layer " + name);
            }
            const auto kind = parse_plant_kind(e.at("kind").get<std::string>());
            const auto expected = parse_verdict(e.at("expected").get<std::string>());
            const auto borders = BorderSet::parse(e.at("borders").get<std::string>());
            if (!kind || !expected || !borders) throw Error(ErrorCode::format, "truth: malformed entry");
            entry.kind = *kind;
            entry.expected = *expected;
            entry.borders = *borders;
            out.truth.entries.push_back(entry);
        }
        return out;
    });
}

json evaluation_to_json(const DetectorEvaluation& ev, const DetectorConfig& config) {
    auto ids = [](const std::vector<NeuronId>& v) {
        json a = json::array();
        for (const auto& id : v) a.push_back({{"layer_index", id.layer}, {"channel", id.channel}});
        return a;
    };
    json confusion = json::object();
    for (std::size_t t = 0; t < ev.confusion.size(); ++t) {
        json row = json::object();
        std::size_t total = 0;
        for (std::size_t d = 0; d < 16; ++d) {
            if (ev.confusion[t][d] == 0) continue;
            row[d == 0 ? std::string("not_pan") : pan_type_names()[d - 1]] = ev.confusion[t][d];
            total += ev.confusion[t][d];
        }
        if (total > 0) confusion[pan_type_names()[t]] = row;
    }
    return {{"tool", tool_block()},
            {"theta", config.theta},
            {"precision", ev.precision},
            {"recall", ev.recall},
            {"nothing_flagged", ev.nothing_flagged},
            {"true_positives", ev.true_positives},
            {"false_positives", ev.false_positives},
            {"false_negatives", ev.false_negatives},
            {"flagged", ev.flagged},
            {"type_mismatches", ev.type_mismatches},
            {"confusion", confusion},
            {"false_positive_neurons", ids(ev.false_positive_neurons)},
            {"missed_neurons", ids(ev.missed_neurons)}};
}

json odds_report_to_json(const OddsReport& report, const ConvNetSpec& model) {
    json doc;
    doc["tool"] = tool_block();
    doc["model"] = model.name;
    doc["variant"] = to_string(report.variant.kind);
    doc["prng"] = Rng::algorithm;
    doc["seed"] = report.variant.seed;
    json reflected = json::array();
    for (const auto& id : report.reflected) {
        reflected.push_back({{"layer", model.layers.at(id.layer).name}, {"channel", id.channel}});
    }
    doc["reflected"] = reflected;
    json classes = json::array();
    for (std::size_t c = 0; c < report.odds.odds.size(); ++c) {
        const auto& o = report.odds.odds[c];
        const auto& l = report.odds.log_odds[c];
        classes.push_back({{"class", c}, {"odds", o ? json(*o) : json(nullptr)}, {"log_odds", l ? json(*l) : json(nullptr)}});
    }
    doc["classes"] = classes;
    doc["log_odds_stddev"] = report.log_odds_stddev;
    doc["cut"] = report.cut;
    doc["above_cut"] = report.beyond_cut.above;
    doc["below_cut"] = report.beyond_cut.below;
    if (report.log_odds_histogram) {
        doc["log_odds_histogram"] = {{"edges", report.log_odds_histogram->edges},
                                     {"counts", report.log_odds_histogram->counts}};
    } else {
        doc["log_odds_histogram"] = nullptr;
    }
    json top = json::array();
    for (std::size_t i = 0; i < std::min(report.top_decile, report.ranking.entries.size()); ++i) {
        const auto& e = report.ranking.entries[i];
        top.push_back({{"sample", e.sample},
                       {"distance", e.distance},
                       {"prediction_original", e.prediction_a},
                       {"prediction_variant", e.prediction_b},
                       {"agree", e.agree()}});
    }
    doc["divergence"] = {{"samples", report.ranking.entries.size()},
                         {"top_decile", report.top_decile},
                         {"top_decile_disagreements", report.top_decile_disagreements},
                         {"top", top}};
    doc["max_softmax_mass_error"] = report.max_softmax_mass_error;
    return doc;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out += number(h.edges[i]) + "," + number(h.edges[i + 1]) + "," + std::to_string(h.counts[i]) + "\n";
    }
    return out;
}

std::string region_histograms_csv(const std::vector<RegionHistogramSet>& sets, std::size_t bins) {
    struct Named {
        std::string padding;
        std::string region;
        std::vector<double> values;
    };
    std::vector<Named> series;
    double lo = 0.0;
    double hi = 0.0;
    bool any = false;
    for (const auto& s : sets) {
        const auto& r = s.regions;
        const TruncatedCentre t = truncate_centre(r.centre, r.top.size());
        for (auto [name, values] : {std::pair<const char*, const std::vector<double>*>{"top", &r.top},
                                    {"bottom", &r.bottom},
                                    {"left", &r.left},
                                    {"right", &r.right},
                                    {"centre", &r.centre},
                                    {"centre_plus", &t.high},
                                    {"centre_minus", &t.low}}) {
            for (double v : *values) {
                lo = any ? std::min(lo, v) : v;
                hi = any ? std::max(hi, v) : v;
                any = true;
            }
            series.push_back({s.padding, name, *values});
        }
    }
    if (!any) throw Error(ErrorCode::empty_sample, "no region samples to histogram");
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    std::string out = "padding,region,bin_lo,bin_hi,count\n";
    for (const auto& s : series) {
        const Histogram h = histogram(s.values, bins, std::pair{lo, hi});
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            out += s.padding + "," + s.region + "," + number(h.edges[i]) + "," + number(h.edges[i + 1]) + "," +
                   std::to_string(h.counts[i]) + "\n";
        }
    }
    return out;
}

std::string heatmap_csv(const std::vector<HeatmapEntry>& entries) {
    std::string out = "padding,sample,row,col,value\n";
    for (const auto& e : entries) {
        for (std::size_t y = 0; y < e.map.height; ++y) {
            for (std::size_t x = 0; x < e.map.width; ++x) {
                out += e.padding + "," + std::to_string(e.sample) + "," + std::to_string(y) + "," + std::to_string(x) +
                       "," + number(e.map.at(y, x)) + "\n";
            }
        }
    }
    return out;
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

} // namespace panscope
