#include "panscope_tools/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "panscope/bias.hpp"
#include "panscope/error.hpp"
#include "panscope/file_io.hpp"
#include "panscope/model_io.hpp"
#include "panscope/planted.hpp"
#include "panscope/report.hpp"
#include "panscope/trace_io.hpp"

namespace panscope::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad flag values found after CLI11 parsing; reported with exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

DetectorConfig detector_config(double theta) {
    DetectorConfig c{theta};
    if (!(theta > 0.0 && theta <= 1.0)) throw UsageError("--theta must lie in (0, 1]");
    return c;
}

json read_json(const fs::path& path) {
    try {
        return json::parse(read_file_text(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::format, path.string() + ": " + e.what());
    }
}

struct BatchChoice {
    std::string trace;
    std::string synthetic;

    bool given() const { return !trace.empty() || !synthetic.empty(); }

    void add_to(CLI::App* cmd) {
        auto* b = cmd->add_option("--batch", trace, "input batch as a PANTRACE file (one layer)");
        auto* s = cmd->add_option("--synthetic-batch", synthetic, "seeded synthetic batch: seed,n,h,w");
        b->excludes(s);
    }

    Tensor load(std::size_t channels, CensusSource* source = nullptr) const {
        if (!trace.empty()) {
            if (source != nullptr) source->trace_path = trace;
            return batch_from_trace(read_trace(trace));
        }
        SyntheticBatchConfig config;
        try {
            config = SyntheticBatchConfig::parse(synthetic, channels);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        if (source != nullptr) source->synthetic = config;
        return make_synthetic_batch(config);
    }
};

void print_census(const Census& c, std::ostream& out) {
    out << std::left << std::setw(16) << "layer" << std::right << std::setw(9) << "neurons" << std::setw(7) << "pans"
        << std::setw(6) << "%" << std::setw(8) << "edges" << std::setw(10) << "excluded" << "\n";
    for (const auto& l : c.layers) {
        out << std::left << std::setw(16) << l.name << std::right << std::setw(9) << l.neurons << std::setw(7) << l.pans
            << std::setw(6) << l.percent() << std::setw(8) << l.edge_candidates << std::setw(10) << l.excluded << "\n";
    }
    out << "total PANs: " << c.total_pans() << " of " << c.total_neurons() << " neurons (theta " << c.config.theta
        << ")\n";
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_file_atomic(path, text);
    }
}

bool is_index(std::string_view text) {
    return !text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::size_t parse_index(std::string_view text, const std::string& what) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw UsageError(what + " must be a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

// ---- plant spec -----------------------------------------------------------

LayerTemplate layer_template_from(const json& j) {
    LayerTemplate t;
    t.out_channels = j.value("out_channels", t.out_channels);
    t.kernel = j.value("kernel", t.kernel);
    t.stride = j.value("stride", t.stride);
    t.padding = j.value("padding", t.kernel / 2);
    if (j.contains("policy")) {
        const auto p = parse_padding_policy(j.at("policy").get<std::string>());
        if (!p) throw Error(ErrorCode::format, "plant spec: unknown padding policy");
        t.policy = *p;
    }
    if (j.contains("activation")) {
        const auto a = parse_nonlinearity(j.at("activation").get<std::string>());
        if (!a) throw Error(ErrorCode::format, "plant spec: unknown activation");
        t.activation = *a;
    }
    return t;
}

NetworkTemplate network_from(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() != "reference") throw Error(ErrorCode::format, "plant spec: unknown network preset");
        return reference_template();
    }
    NetworkTemplate t;
    t.name = j.value("name", t.name);
    t.input_channels = j.value("input_channels", t.input_channels);
    t.head_classes = j.value("head_classes", std::size_t{0});
    for (const json& l : j.at("layers")) t.layers.push_back(layer_template_from(l));
    return t;
}

std::vector<PlantSpec> plants_from(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() != "reference") throw Error(ErrorCode::format, "plant spec: unknown plant preset");
        return reference_plants();
    }
    std::vector<PlantSpec> plants;
    for (const json& p : j) {
        PlantSpec s;
        s.layer = p.at("layer").get<std::size_t>();
        s.channel = p.at("channel").get<std::size_t>();
        const auto kind = parse_plant_kind(p.at("kind").get<std::string>());
        if (!kind) throw Error(ErrorCode::format, "plant spec: unknown kind '" + p.at("kind").get<std::string>() + "'");
        s.kind = *kind;
        if (p.contains("borders")) {
            const auto b = BorderSet::parse(p.at("borders").get<std::string>());
            if (!b) throw Error(ErrorCode::format, "plant spec: bad borders '" + p.at("borders").get<std::string>() + "'");
            s.borders = *b;
        }
        if (p.contains("sources")) s.sources = p.at("sources").get<std::vector<std::size_t>>();
        plants.push_back(std::move(s));
    }
    return plants;
}

// ---- subcommands ----------------------------------------------------------

struct DetectArgs {
    std::string model;
    BatchChoice batch;
    double theta = 0.5;
    std::string out;
};

int cmd_detect(const DetectArgs& a, std::ostream& out) {
    const DetectorConfig config = detector_config(a.theta);
    const ConvNetSpec model = load_model(a.model);
    CensusSource source;
    source.model_path = a.model;
    const Tensor batch = a.batch.load(model.input_channels(), &source);
    const Census c = census(model, batch, config);
    if (!a.out.empty()) write_file_atomic(a.out, dump_json(census_to_json(c, source)));
    print_census(c, out);
    return ok;
}

struct DetectTraceArgs {
    std::string trace;
    double theta = 0.5;
    std::string out;
};

int cmd_detect_trace(const DetectTraceArgs& a, std::ostream& out) {
    const DetectorConfig config = detector_config(a.theta);
    const ActivationTrace trace = read_trace(a.trace);
    CensusSource source;
    source.trace_path = a.trace;
    const Census c = census_trace(trace, config);
    if (!a.out.empty()) write_file_atomic(a.out, dump_json(census_to_json(c, source)));
    print_census(c, out);
    return ok;
}

struct PlantArgs {
    std::string spec;
    std::uint64_t seed = 0;
    std::vector<std::string> out;
};

int cmd_plant(const PlantArgs& a, std::ostream& out) {
    if (a.out.size() != 2) throw UsageError("--out takes two paths: model.json,truth.json");
    const json spec = read_json(a.spec);
    NetworkTemplate net;
    std::vector<PlantSpec> plants;
    SyntheticNetworkOptions options;
    try {
        net = network_from(spec.at("network"));
        plants = plants_from(spec.value("plants", json::array()));
        options.pan_gain = spec.value("pan_gain", options.pan_gain);
        options.plant_separation = spec.value("plant_separation", options.plant_separation);
        options.calibration.seed = a.seed;
        if (spec.contains("calibration")) {
            const json& c = spec.at("calibration");
            options.calibration.seed = c.value("seed", a.seed);
            options.calibration.count = c.value("count", options.calibration.count);
            options.calibration.height = c.value("height", options.calibration.height);
            options.calibration.width = c.value("width", options.calibration.width);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::format, a.spec + ": " + e.what());
    }
    options.seed = a.seed;
    options.calibration.channels = net.input_channels;
    const SyntheticNetwork built = build_synthetic_network(net, plants, options);
    save_model(built.model, a.out[0]);
    write_file_atomic(a.out[1], dump_json(truth_to_json(built.truth, built.model, a.seed, options.calibration)));
    out << "planted " << built.truth.entries.size() << " neurons in " << built.model.name << " ("
        << built.truth.planted_pans().size() << " PANs)\n";
    return ok;
}

struct EvaluateArgs {
    std::string model;
    std::string truth;
    BatchChoice batch;
    double theta = 0.5;
    std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    const DetectorConfig config = detector_config(a.theta);
    const ConvNetSpec model = load_model(a.model);
    const TruthDocument truth = truth_from_json(read_json(a.truth), model);
    const Tensor batch =
        a.batch.given() ? a.batch.load(model.input_channels()) : make_synthetic_batch(truth.calibration);
    const DetectorEvaluation ev = evaluate_detector(model, truth.truth, batch, config);
    write_text(a.out, dump_json(evaluation_to_json(ev, config)), out);
    if (!a.out.empty() && a.out != "-") {
        out << "precision " << ev.precision << " recall " << ev.recall << " (tp " << ev.true_positives << ", fp "
            << ev.false_positives << ", fn " << ev.false_negatives << ")\n";
    }
    return ok;
}

struct BiasArgs {
    std::string model;
    std::string census;
    std::string variant;
    std::uint64_t seed = 0;
    BatchChoice batch;
    double cut = 0.07;
    std::size_t bins = 20;
    std::string out;
    std::string histogram_out;
};

int cmd_bias(const BiasArgs& a, std::ostream& out) {
    const auto kind = parse_variant_kind(a.variant);
    if (!kind) throw UsageError("--variant must be one of original, reflect, pan-reflect, rand-reflect");
    if (a.bins == 0) throw UsageError("--bins must be positive");
    const ConvNetSpec model = load_model(a.model);
    const CensusDocument census = census_from_json(read_json(a.census));
    VariantSpec spec{*kind, census_pan_set(census, model), a.seed};

    Tensor images;
    if (a.batch.given()) {
        images = a.batch.load(model.input_channels());
    } else if (census.source.synthetic) {
        images = make_synthetic_batch(*census.source.synthetic);
    } else if (!census.source.trace_path.empty()) {
        images = batch_from_trace(read_trace(census.source.trace_path));
    } else {
        throw UsageError("no image batch: pass --batch or --synthetic-batch");
    }

    const OddsReport report = run_bias_experiment(model, spec, images, {a.cut, a.bins});
    write_file_atomic(a.out, dump_json(odds_report_to_json(report, model)));
    fs::path hist = a.histogram_out;
    if (hist.empty()) {
        hist = a.out;
        hist.replace_extension(".log_odds.csv");
    }
    write_file_atomic(hist, report.log_odds_histogram ? histogram_csv(*report.log_odds_histogram)
                                                      : std::string("bin_lo,bin_hi,count\n"));
    out << to_string(kind.value()) << ": " << report.reflected.size() << " neurons reflected, log-odds stddev "
        << report.log_odds_stddev << ", " << report.beyond_cut.above.size() << " classes above and "
        << report.beyond_cut.below.size() << " below the " << a.cut << " cut\n";
    return ok;
}

struct HistArgs {
    std::string census;
    std::string neuron;
    std::size_t bins = 40;
    std::string out;
    std::string heatmap;
    std::size_t samples = 1;
};

int cmd_hist(const HistArgs& a, std::ostream& out) {
    const CensusDocument doc = census_from_json(read_json(a.census));
    const auto colon = a.neuron.rfind(':');
    if (colon == std::string::npos) throw UsageError("--neuron must be layer:channel");
    const std::string layer_text = a.neuron.substr(0, colon);
    const std::size_t channel = parse_index(std::string_view(a.neuron).substr(colon + 1), "channel");
    if (a.bins == 0) throw UsageError("--bins must be positive");

    std::vector<RegionHistogramSet> sets;
    std::vector<HeatmapEntry> heat;
    std::vector<Tensor> keep; // owns the maps the heatmap views point into
    keep.reserve(2);

    auto add_maps = [&](const std::string& padding, const Tensor& activations) {
        if (channel >= activations.shape().channels) {
            throw Error(ErrorCode::unknown_neuron, "channel " + std::to_string(channel) + " is out of range");
        }
        keep.push_back(activations);
        const Tensor& t = keep.back();
        sets.push_back({padding, extract_regions(t, channel)});
        const Shape& s = t.shape();
        for (std::size_t n = 0; n < std::min(a.samples, s.batch); ++n) {
            heat.push_back({padding, n, PlaneView{t.plane(n, channel), s.height, s.width}});
        }
    };

    if (!doc.source.model_path.empty()) {
        const ConvNetSpec model = load_model(doc.source.model_path);
        std::optional<std::size_t> layer = model.find_layer(layer_text);
        if (!layer && is_index(layer_text)) {
            const std::size_t index = parse_index(layer_text, "layer");
            if (index < model.layers.size()) layer = index;
        }
        if (!layer) throw Error(ErrorCode::unknown_neuron, "layer '" + layer_text + "' is not in the model");
        Tensor batch;
        if (doc.source.synthetic) {
            batch = make_synthetic_batch(*doc.source.synthetic);
        } else if (!doc.source.trace_path.empty()) {
            batch = batch_from_trace(read_trace(doc.source.trace_path));
        } else {
            throw Error(ErrorCode::format, "census does not record its input batch");
        }
        add_maps("zero", forward(model, batch).trace.layers[*layer].output);
        const VariantSpec swap{VariantKind::pan_reflect, {{*layer, channel}}, 0};
        add_maps("reflect", forward(make_variant(model, swap), batch).trace.layers[*layer].output);
    } else if (!doc.source.trace_path.empty()) {
        const ActivationTrace trace = read_trace(doc.source.trace_path);
        std::optional<std::size_t> layer;
        for (std::size_t i = 0; i < trace.layers.size(); ++i) {
            if (trace.layers[i].name == layer_text) layer = i;
        }
        if (!layer && is_index(layer_text)) {
            const std::size_t index = parse_index(layer_text, "layer");
            if (index < trace.layers.size()) layer = index;
        }
        if (!layer) throw Error(ErrorCode::unknown_neuron, "layer '" + layer_text + "' is not in the trace");
        add_maps("recorded", trace.layers[*layer].output);
    } else {
        throw Error(ErrorCode::format, "census records neither a model nor a trace");
    }

    write_file_atomic(a.out, region_histograms_csv(sets, a.bins));
    if (!a.heatmap.empty()) write_file_atomic(a.heatmap, heatmap_csv(heat));
    out << "wrote " << sets.size() << " histogram set(s) for " << a.neuron << "\n";
    return ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Padding-aware neuron diagnostics", "panscope"};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);

    DetectArgs detect;
    auto* c_detect = app.add_subcommand("detect", "census of a model on an input batch");
    c_detect->add_option("--model", detect.model, "model JSON")->required();
    detect.batch.add_to(c_detect);
    c_detect->add_option("--theta", detect.theta, "KS threshold in (0, 1]")->capture_default_str();
    c_detect->add_option("--out", detect.out, "census JSON");

    DetectTraceArgs dtrace;
    auto* c_dtrace = app.add_subcommand("detect-trace", "census of recorded activations");
    c_dtrace->add_option("--trace", dtrace.trace, "PANTRACE file")->required();
    c_dtrace->add_option("--theta", dtrace.theta, "KS threshold in (0, 1]")->capture_default_str();
    c_dtrace->add_option("--out", dtrace.out, "census JSON");

    PlantArgs plant;
    auto* c_plant = app.add_subcommand("plant", "build a synthetic network with planted neurons");
    c_plant->add_option("--spec", plant.spec, "plant spec JSON")->required();
    c_plant->add_option("--seed", plant.seed, "weight seed")->capture_default_str();
    c_plant->add_option("--out", plant.out, "model.json,truth.json")->required()->delimiter(',');

    EvaluateArgs evaluate;
    auto* c_eval = app.add_subcommand("evaluate", "precision and recall against planted ground truth");
    c_eval->add_option("--model", evaluate.model, "model JSON")->required();
    c_eval->add_option("--truth", evaluate.truth, "ground-truth JSON")->required();
    evaluate.batch.add_to(c_eval);
    c_eval->add_option("--theta", evaluate.theta, "KS threshold in (0, 1]")->capture_default_str();
    c_eval->add_option("--out", evaluate.out, "evaluation JSON (default: stdout)");

    BiasArgs bias;
    auto* c_bias = app.add_subcommand("bias", "padding-swap odds experiment");
    c_bias->add_option("--model", bias.model, "model JSON with a classifier head")->required();
    c_bias->add_option("--census", bias.census, "census JSON naming the PANs")->required();
    c_bias->add_option("--variant", bias.variant, "original, reflect, pan-reflect or rand-reflect")->required();
    c_bias->add_option("--seed", bias.seed, "control sampling seed")->capture_default_str();
    bias.batch.add_to(c_bias);
    c_bias->add_option("--cut", bias.cut, "odds cut")->capture_default_str();
    c_bias->add_option("--bins", bias.bins, "log-odds histogram bins")->capture_default_str();
    c_bias->add_option("--out", bias.out, "odds JSON")->required();
    c_bias->add_option("--histogram-out", bias.histogram_out, "log-odds histogram CSV");

    HistArgs hist;
    auto* c_hist = app.add_subcommand("hist", "region histograms of one neuron");
    c_hist->add_option("--census", hist.census, "census JSON")->required();
    c_hist->add_option("--neuron", hist.neuron, "layer:channel (layer name or index)")->required();
    c_hist->add_option("--bins", hist.bins, "bins")->capture_default_str();
    c_hist->add_option("--out", hist.out, "histogram CSV")->required();
    c_hist->add_option("--heatmap", hist.heatmap, "activation map CSV");
    c_hist->add_option("--samples", hist.samples, "maps per padding in the heatmap")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help / --version
            app.exit(e, out, err);
            return ok;
        }
        err << "panscope: " << e.what() << "\n";
        return usage;
    }

    try {
        if (c_detect->parsed()) {
            if (!detect.batch.given()) throw UsageError("detect needs --batch or --synthetic-batch");
            return cmd_detect(detect, out);
        }
        if (c_dtrace->parsed()) return cmd_detect_trace(dtrace, out);
        if (c_plant->parsed()) return cmd_plant(plant, out);
        if (c_eval->parsed()) return cmd_evaluate(evaluate, out);
        if (c_bias->parsed()) return cmd_bias(bias, out);
        if (c_hist->parsed()) return cmd_hist(hist, out);
    } catch (const UsageError& e) {
        err << "panscope: " << e.what() << "\n";
        return usage;
    } catch (const Error& e) {
        err << "panscope: " << to_string(e.code()) << ": " << e.what() << "\n";
        return data;
    }
    return usage;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace panscope::cli
