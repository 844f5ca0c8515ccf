#include "panscope/detector.hpp"

#include <algorithm>
#include <bit>

#include "panscope/error.hpp"
#include "panscope/ks.hpp"
#include "panscope/parallel.hpp"

namespace panscope {

char border_letter(Border border) noexcept {
    switch (border) {
    case Border::top: return 'T';
    case Border::bottom: return 'B';
    case Border::left: return 'L';
    case Border::right: return 'R';
    }
    return '?';
}

std::string_view border_name(Border border) noexcept {
    switch (border) {
    case Border::top: return "top";
    case Border::bottom: return "bottom";
    case Border::left: return "left";
    case Border::right: return "right";
    }
    return "?";
}

std::size_t BorderSet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::string BorderSet::letters() const {
    std::string out;
    for (Border b : kBorders) {
        if (contains(b)) out.push_back(border_letter(b));
    }
    return out;
}

std::optional<BorderSet> BorderSet::parse(std::string_view letters) {
    BorderSet set;
    for (char c : letters) {
        std::optional<Border> b;
        for (Border candidate : kBorders) {
            if (border_letter(candidate) == c) b = candidate;
        }
        if (!b || set.contains(*b)) return std::nullopt;
        set.insert(*b);
    }
    return set;
}

std::string classify_type(BorderSet borders) {
    if (borders.empty()) throw Error(ErrorCode::invalid_argument, "a PAN type needs at least one border");
    return borders.letters();
}

namespace {

std::array<BorderSet, 15> make_type_order() {
    std::array<BorderSet, 15> order{};
    std::size_t next = 0;
    for (std::size_t size = 1; size <= 4; ++size) {
        // Lexicographic over T, B, L, R positions: enumerate index tuples in order.
        std::vector<BorderSet> group;
        for (unsigned bits = 1; bits < 16; ++bits) {
            if (static_cast<std::size_t>(std::popcount(bits)) == size) group.push_back(BorderSet::from_bits(static_cast<std::uint8_t>(bits)));
        }
        std::sort(group.begin(), group.end(), [](BorderSet a, BorderSet b) {
            auto key = [](BorderSet s) {
                std::string k;
                for (std::size_t i = 0; i < 4; ++i) {
                    if (s.contains(kBorders[i])) k.push_back(static_cast<char>('0' + i));
                }
                return k;
            };
            return key(a) < key(b);
        });
        for (BorderSet s : group) order[next++] = s;
    }
    return order;
}

const std::array<BorderSet, 15>& type_order() {
    static const std::array<BorderSet, 15> order = make_type_order();
    return order;
}

} // namespace

const std::array<std::string, 15>& pan_type_names() {
    static const std::array<std::string, 15> names = [] {
        std::array<std::string, 15> out;
        for (std::size_t i = 0; i < 15; ++i) out[i] = type_order()[i].letters();
        return out;
    }();
    return names;
}

std::size_t pan_type_index(BorderSet borders) {
    if (borders.empty()) throw Error(ErrorCode::invalid_argument, "a PAN type needs at least one border");
    const auto& order = type_order();
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), borders) - order.begin());
}

std::string_view to_string(Verdict verdict) noexcept {
    switch (verdict) {
    case Verdict::none: return "none";
    case Verdict::edge_candidate: return "edge_candidate";
    case Verdict::pan: return "pan";
    }
    return "none";
}

std::optional<Verdict> parse_verdict(std::string_view text) noexcept {
    if (text == "none") return Verdict::none;
    if (text == "edge_candidate" || text == "edge-candidate") return Verdict::edge_candidate;
    if (text == "pan") return Verdict::pan;
    return std::nullopt;
}

void DetectorConfig::validate() const {
    if (!(theta > 0.0 && theta <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "theta must lie in (0, 1], got " + std::to_string(theta));
    }
}

KSReport score_neuron(const RegionSamples& regions, NeuronId neuron) {
    if (regions.centre.empty()) throw Error(ErrorCode::empty_sample, "centre region is empty");
    KSReport report;
    report.neuron = neuron;

    std::vector<double> centre = regions.centre;
    std::sort(centre.begin(), centre.end());

    const std::array<const std::vector<double>*, 4> borders = {&regions.top, &regions.bottom, &regions.left,
                                                               &regions.right};
    for (std::size_t i = 0; i < 4; ++i) {
        std::vector<double> border = *borders[i];
        if (border.empty()) throw Error(ErrorCode::empty_sample, "border region is empty");
        std::sort(border.begin(), border.end());
        const TruncatedCentre t = truncate_sorted_centre(centre, border.size());
        report.ks[i] = ks_sorted(border, centre).two_sided;
        report.ks_plus[i] = ks_sorted(border, t.high).less;
        report.ks_minus[i] = ks_sorted(border, t.low).greater;
        report.shortfall = report.shortfall || t.shortfall;
    }
    return report;
}

PANLabel label_neuron(const KSReport& report, const DetectorConfig& config) {
    config.validate();
    const double theta = config.theta;
    PANLabel label;
    bool any_high = false;
    for (std::size_t i = 0; i < 4; ++i) {
        if (report.ks[i] < theta) continue;
        any_high = true;
        if (report.ks_plus[i] >= theta || report.ks_minus[i] >= theta) label.borders.insert(kBorders[i]);
    }
    if (!label.borders.empty()) {
        label.verdict = Verdict::pan;
        label.type_name = classify_type(label.borders);
    } else if (any_high) {
        label.verdict = Verdict::edge_candidate;
    }
    return label;
}

std::size_t Census::total_neurons() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.neurons;
    return n;
}

std::size_t Census::total_pans() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.pans;
    return n;
}

std::vector<NeuronId> Census::pan_set() const {
    std::vector<NeuronId> out;
    for (const auto& r : records) {
        if (r.label.verdict == Verdict::pan) out.push_back(r.report.neuron);
    }
    return out;
}

std::vector<NeuronId> Census::flagged_set() const {
    std::vector<NeuronId> out;
    for (const auto& r : records) {
        if (r.label.verdict != Verdict::none) out.push_back(r.report.neuron);
    }
    return out;
}

std::array<std::size_t, 15> Census::type_counts() const {
    std::array<std::size_t, 15> counts{};
    for (const auto& r : records) {
        if (r.label.verdict == Verdict::pan) ++counts[pan_type_index(r.label.borders)];
    }
    return counts;
}

const NeuronRecord* Census::find(NeuronId id) const {
    auto it = std::lower_bound(records.begin(), records.end(), id,
                               [](const NeuronRecord& r, NeuronId key) { return r.report.neuron < key; });
    if (it == records.end() || it->report.neuron != id) return nullptr;
    return &*it;
}

namespace {

void tally(Census& c) {
    for (auto& layer : c.layers) {
        layer.pans = 0;
        layer.edge_candidates = 0;
    }
    for (const auto& r : c.records) {
        auto it = std::find_if(c.layers.begin(), c.layers.end(),
                               [&](const LayerCensus& l) { return l.layer_index == r.report.neuron.layer; });
        if (it == c.layers.end()) continue;
        if (r.label.verdict == Verdict::pan) ++it->pans;
        if (r.label.verdict == Verdict::edge_candidate) ++it->edge_candidates;
    }
}

} // namespace

Census census_trace(const ActivationTrace& trace, const DetectorConfig& config, const std::vector<bool>& eligible) {
    config.validate();
    if (!eligible.empty() && eligible.size() != trace.layers.size()) {
        throw Error(ErrorCode::invalid_argument, "eligibility mask does not match the trace layers");
    }
    Census c;
    c.config = config;

    struct Job {
        std::size_t layer;
        std::size_t channel;
    };
    std::vector<Job> jobs;
    for (std::size_t li = 0; li < trace.layers.size(); ++li) {
        const LayerActivation& layer = trace.layers[li];
        if (!eligible.empty() && !eligible[li]) {
            c.skipped_layers.push_back(layer.name);
            continue;
        }
        const Shape& s = layer.output.shape();
        LayerCensus lc;
        lc.name = layer.name;
        lc.layer_index = li;
        lc.neurons = s.channels;
        if (s.height < 3 || s.width < 3) {
            lc.excluded = s.channels;
            for (std::size_t ch = 0; ch < s.channels; ++ch) {
                c.excluded.push_back({{li, ch},
                                      "degenerate map " + std::to_string(s.height) + "x" + std::to_string(s.width)});
            }
        } else {
            for (std::size_t ch = 0; ch < s.channels; ++ch) jobs.push_back({li, ch});
        }
        c.layers.push_back(lc);
    }

    std::vector<NeuronRecord> records(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const Job& job = jobs[i];
        const RegionSamples regions = extract_regions(trace.layers[job.layer].output, job.channel);
        records[i].report = score_neuron(regions, {job.layer, job.channel});
        records[i].label = label_neuron(records[i].report, config);
    });
    c.records = std::move(records);
    tally(c);
    return c;
}

Census census(const ConvNetSpec& model, const Tensor& batch, const DetectorConfig& config) {
    config.validate();
    const ForwardResult result = forward(model, batch);
    std::vector<bool> eligible;
    eligible.reserve(model.layers.size());
    for (const auto& layer : model.layers) eligible.push_back(layer.kernel_height * layer.kernel_width > 1);
    return census_trace(result.trace, config, eligible);
}

Census relabel(const Census& census, const DetectorConfig& config) {
    config.validate();
    Census c = census;
    c.config = config;
    for (auto& r : c.records) r.label = label_neuron(r.report, config);
    tally(c);
    return c;
}

} // namespace panscope
