#include "panscope/planted.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "panscope/error.hpp"
#include "panscope/rng.hpp"

namespace panscope {

std::string_view to_string(PlantKind kind) noexcept {
    switch (kind) {
    case PlantKind::pan: return "pan";
    case PlantKind::prewitt_v: return "prewitt_v";
    case PlantKind::prewitt_h: return "prewitt_h";
    case PlantKind::sobel_v: return "sobel_v";
    case PlantKind::sobel_h: return "sobel_h";
    case PlantKind::log: return "log";
    case PlantKind::random: return "random";
    }
    return "random";
}

std::optional<PlantKind> parse_plant_kind(std::string_view text) noexcept {
    for (PlantKind k : {PlantKind::pan, PlantKind::prewitt_v, PlantKind::prewitt_h, PlantKind::sobel_v,
                        PlantKind::sobel_h, PlantKind::log, PlantKind::random}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

bool is_edge_kind(PlantKind kind) noexcept { return kind != PlantKind::pan && kind != PlantKind::random; }

float Kernel2D::sum() const { return std::accumulate(values.begin(), values.end(), 0.0f); }

Kernel2D make_edge_kernel(PlantKind kind) {
    Kernel2D k;
    k.size = 3;
    switch (kind) {
    case PlantKind::prewitt_v: k.values = {-1, 0, 1, -1, 0, 1, -1, 0, 1}; break;
    case PlantKind::prewitt_h: k.values = {-1, -1, -1, 0, 0, 0, 1, 1, 1}; break;
    case PlantKind::sobel_v: k.values = {-1, 0, 1, -2, 0, 2, -1, 0, 1}; break;
    case PlantKind::sobel_h: k.values = {-1, -2, -1, 0, 0, 0, 1, 2, 1}; break;
    case PlantKind::log: k.values = {0, -1, 0, -1, 4, -1, 0, -1, 0}; break;
    default: throw Error(ErrorCode::invalid_argument, "not an edge kernel: " + std::string(to_string(kind)));
    }
    return k;
}

Kernel2D make_pan_kernel(BorderSet borders, std::size_t size, float gain) {
    if (borders.empty()) throw Error(ErrorCode::invalid_argument, "PAN kernel needs at least one border");
    if (size < 3 || size % 2 == 0) throw Error(ErrorCode::invalid_argument, "PAN kernel size must be odd and >= 3");
    Kernel2D k;
    k.size = size;
    k.values.assign(size * size, 0.0f);
    const std::size_t p = (size - 3) / 2;
    const std::size_t c = size / 2;
    auto add_column = [&](std::size_t col, float v) {
        for (std::size_t y = 0; y < size; ++y) k.values[y * size + col] += v;
    };
    auto add_row = [&](std::size_t row, float v) {
        for (std::size_t x = 0; x < size; ++x) k.values[row * size + x] += v;
    };
    if (borders.contains(Border::left)) {
        add_column(p, -gain);
        add_column(c, gain);
    }
    if (borders.contains(Border::right)) {
        add_column(size - 1 - p, -gain);
        add_column(c, gain);
    }
    if (borders.contains(Border::top)) {
        add_row(p, -gain);
        add_row(c, gain);
    }
    if (borders.contains(Border::bottom)) {
        add_row(size - 1 - p, -gain);
        add_row(c, gain);
    }
    return k;
}

const GroundTruthEntry* GroundTruth::find(NeuronId id) const {
    for (const auto& e : entries) {
        if (e.neuron == id) return &e;
    }
    return nullptr;
}

std::vector<NeuronId> GroundTruth::planted_pans() const {
    std::vector<NeuronId> out;
    for (const auto& e : entries) {
        if (e.expected == Verdict::pan) out.push_back(e.neuron);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

ConvLayerSpec random_layer(Rng& rng, const LayerTemplate& t, std::size_t index, std::size_t in_channels) {
    ConvLayerSpec layer;
    layer.name = "conv" + std::to_string(index);
    layer.in_channels = in_channels;
    layer.out_channels = t.out_channels;
    layer.kernel_height = t.kernel;
    layer.kernel_width = t.kernel;
    layer.stride = t.stride;
    layer.padding = t.padding;
    layer.policy = t.policy;
    layer.activation = t.activation;
    layer.weights = Tensor(Shape{t.out_channels, in_channels, t.kernel, t.kernel});

    const std::size_t area = t.kernel * t.kernel;
    const double bound = std::sqrt(6.0 / static_cast<double>(in_channels * area));
    auto w = layer.weights.data();
    std::vector<double> slice(area);
    for (std::size_t s = 0; s < t.out_channels * in_channels; ++s) {
        for (double& v : slice) v = rng.uniform(-bound, bound);
        const double mean = std::accumulate(slice.begin(), slice.end(), 0.0) / static_cast<double>(area);
        for (std::size_t i = 0; i < area; ++i) w[s * area + i] = static_cast<float>(slice[i] - mean);
    }
    layer.bias.resize(t.out_channels);
    for (float& b : layer.bias) b = static_cast<float>(rng.uniform(-0.1, 0.1));
    return layer;
}

std::vector<std::size_t> default_sources(const PlantSpec& plant, std::size_t in_channels) {
    if (!plant.sources.empty()) return plant.sources;
    std::vector<std::size_t> all(in_channels);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (plant.layer != 0) return all;
    const std::size_t shade = shading_channel(in_channels);
    if (plant.kind == PlantKind::pan) {
        return shade < in_channels ? std::vector<std::size_t>{shade} : all;
    }
    if (shade < in_channels) all.erase(all.begin() + static_cast<std::ptrdiff_t>(shade));
    return all;
}

void overwrite_channel(ConvLayerSpec& layer, std::size_t channel, const Kernel2D& kernel,
                       const std::vector<std::size_t>& sources) {
    const std::size_t kh = layer.kernel_height;
    const std::size_t kw = layer.kernel_width;
    if (kernel.size > kh || kernel.size > kw) {
        throw Error(ErrorCode::invalid_argument, "plant kernel does not fit layer " + layer.name);
    }
    const std::size_t oy = (kh - kernel.size) / 2;
    const std::size_t ox = (kw - kernel.size) / 2;
    for (std::size_t ic = 0; ic < layer.in_channels; ++ic) {
        for (std::size_t y = 0; y < kh; ++y) {
            for (std::size_t x = 0; x < kw; ++x) layer.weights.at(channel, ic, y, x) = 0.0f;
        }
    }
    for (std::size_t ic : sources) {
        for (std::size_t y = 0; y < kernel.size; ++y) {
            for (std::size_t x = 0; x < kernel.size; ++x) layer.weights.at(channel, ic, oy + y, ox + x) = kernel.at(y, x);
        }
    }
    layer.bias[channel] = 0.0f;
}

void check_plants(const NetworkTemplate& net, const std::vector<PlantSpec>& plants) {
    std::set<NeuronId> seen;
    for (const auto& p : plants) {
        const std::string where = "plant at " + std::to_string(p.layer) + ":" + std::to_string(p.channel);
        if (p.layer >= net.layers.size()) throw Error(ErrorCode::invalid_argument, where + ": no such layer");
        const LayerTemplate& t = net.layers[p.layer];
        if (p.channel >= t.out_channels) throw Error(ErrorCode::invalid_argument, where + ": no such channel");
        if (!seen.insert({p.layer, p.channel}).second) throw Error(ErrorCode::invalid_argument, where + ": duplicate position");
        if (p.kind == PlantKind::pan && p.borders.empty()) throw Error(ErrorCode::invalid_argument, where + ": PAN plant without borders");
        const std::size_t in_channels = p.layer == 0 ? net.input_channels : net.layers[p.layer - 1].out_channels;
        for (std::size_t s : p.sources) {
            if (s >= in_channels) throw Error(ErrorCode::invalid_argument, where + ": source channel out of range");
        }
    }
}

void verify_pan_plants(const ConvNetSpec& model, const GroundTruth& truth, const SyntheticNetworkOptions& options) {
    if (truth.planted_pans().empty()) return;
    SyntheticBatchConfig calibration = options.calibration;
    calibration.channels = model.input_channels();
    const Census c = census(model, make_synthetic_batch(calibration), options.detector);
    const double sep = options.plant_separation;
    for (const auto& e : truth.entries) {
        if (e.expected != Verdict::pan) continue;
        const std::string where = "PAN plant " + e.borders.letters() + " at " + std::to_string(e.neuron.layer) + ":" +
                                  std::to_string(e.neuron.channel);
        const NeuronRecord* r = c.find(e.neuron);
        if (r == nullptr) throw Error(ErrorCode::plant_failure, where + " was not analysed on the calibration batch");
        for (Border b : kBorders) {
            if (!e.borders.contains(b)) continue;
            if (r->report.ks_at(b) < sep || std::max(r->report.ks_plus_at(b), r->report.ks_minus_at(b)) < sep) {
                throw Error(ErrorCode::plant_failure, where + " is not separated on the " + std::string(border_name(b)) +
                                                          " border (ks " + std::to_string(r->report.ks_at(b)) + ", ks+ " +
                                                          std::to_string(r->report.ks_plus_at(b)) + ", ks- " +
                                                          std::to_string(r->report.ks_minus_at(b)) + ")");
            }
        }
        if (r->label.verdict != Verdict::pan || r->label.borders != e.borders) {
            throw Error(ErrorCode::plant_failure, where + " is detected as '" + r->label.type_name + "'");
        }
    }
}

} // namespace

SyntheticNetwork build_synthetic_network(const NetworkTemplate& net, const std::vector<PlantSpec>& plants,
                                         const SyntheticNetworkOptions& options) {
    if (net.layers.empty()) throw Error(ErrorCode::invalid_argument, "network template has no layers");
    if (net.input_channels == 0) throw Error(ErrorCode::invalid_argument, "network template needs input channels");
    check_plants(net, plants);

    SyntheticNetwork out;
    out.model.name = net.name;
    Rng rng(options.seed);
    std::size_t in_channels = net.input_channels;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        out.model.layers.push_back(random_layer(rng, net.layers[i], i, in_channels));
        in_channels = net.layers[i].out_channels;
    }
    if (net.head_classes > 0) {
        LinearHead head;
        head.classes = net.head_classes;
        head.features = in_channels;
        head.weights.resize(head.classes * head.features);
        for (float& w : head.weights) w = static_cast<float>(rng.normal());
        head.bias.assign(head.classes, 0.0f);
        out.model.head = std::move(head);
    }

    for (const auto& p : plants) {
        ConvLayerSpec& layer = out.model.layers[p.layer];
        GroundTruthEntry entry{{p.layer, p.channel}, p.kind, Verdict::none, {}};
        if (p.kind == PlantKind::pan) {
            if (layer.kernel_height != layer.kernel_width) {
                throw Error(ErrorCode::invalid_argument, "PAN plants need a square kernel in " + layer.name);
            }
            overwrite_channel(layer, p.channel, make_pan_kernel(p.borders, layer.kernel_height, options.pan_gain),
                              default_sources(p, layer.in_channels));
            entry.expected = Verdict::pan;
            entry.borders = p.borders;
        } else if (is_edge_kind(p.kind)) {
            overwrite_channel(layer, p.channel, make_edge_kernel(p.kind), default_sources(p, layer.in_channels));
            entry.expected = Verdict::edge_candidate;
        }
        out.truth.entries.push_back(entry);
    }
    std::sort(out.truth.entries.begin(), out.truth.entries.end(),
              [](const GroundTruthEntry& a, const GroundTruthEntry& b) { return a.neuron < b.neuron; });

    out.model.validate();
    verify_pan_plants(out.model, out.truth, options);
    return out;
}

DetectorEvaluation evaluate_labels(const Census& census, const GroundTruth& truth) {
    DetectorEvaluation ev;
    for (const auto& r : census.records) {
        const GroundTruthEntry* e = truth.find(r.report.neuron);
        const bool planted_pan = e != nullptr && e->expected == Verdict::pan;
        const bool flagged = r.label.verdict == Verdict::pan;
        if (flagged) ++ev.flagged;
        if (planted_pan) {
            const std::size_t row = pan_type_index(e->borders);
            if (flagged) {
                ++ev.true_positives;
                ++ev.confusion[row][pan_type_index(r.label.borders) + 1];
                if (r.label.borders != e->borders) ++ev.type_mismatches;
            } else {
                ++ev.false_negatives;
                ++ev.confusion[row][0];
                ev.missed_neurons.push_back(r.report.neuron);
            }
        } else if (flagged) {
            ++ev.false_positives;
            ev.false_positive_neurons.push_back(r.report.neuron);
        }
    }
    for (const auto& x : census.excluded) {
        const GroundTruthEntry* e = truth.find(x.neuron);
        if (e != nullptr && e->expected == Verdict::pan) {
            ++ev.false_negatives;
            ++ev.confusion[pan_type_index(e->borders)][0];
            ev.missed_neurons.push_back(x.neuron);
        }
    }
    ev.nothing_flagged = ev.flagged == 0;
    ev.precision = ev.nothing_flagged ? 1.0
                                      : static_cast<double>(ev.true_positives) /
                                            static_cast<double>(ev.true_positives + ev.false_positives);
    const std::size_t planted = ev.true_positives + ev.false_negatives;
    ev.recall = planted == 0 ? 1.0 : static_cast<double>(ev.true_positives) / static_cast<double>(planted);
    return ev;
}

DetectorEvaluation evaluate_detector(const ConvNetSpec& model, const GroundTruth& truth, const Tensor& batch,
                                     const DetectorConfig& config) {
    return evaluate_labels(census(model, batch, config), truth);
}

NetworkTemplate reference_template(std::size_t head_classes) {
    NetworkTemplate t;
    t.name = "reference";
    t.input_channels = 3;
    t.head_classes = head_classes;
    for (std::size_t stride : {1, 2, 1, 2}) {
        LayerTemplate l;
        l.stride = stride;
        t.layers.push_back(l);
    }
    return t;
}

std::vector<PlantSpec> reference_plants() {
    using B = Border;
    const std::vector<BorderSet> types = {
        {B::top}, {B::bottom}, {B::left, B::right}, {B::top, B::bottom}, {B::top, B::bottom, B::left, B::right}, {B::left},
    };
    std::vector<PlantSpec> plants;
    for (std::size_t i = 0; i < types.size(); ++i) plants.push_back({0, i, PlantKind::pan, types[i], {}});
    return plants;
}

} // namespace panscope
