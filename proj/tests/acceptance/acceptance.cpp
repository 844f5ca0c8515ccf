// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria (0 when everything passes).
//
// Usage: panscope_acceptance [path/to/panscope]
// With the CLI path the malformed-trace checks run the real executable;
// without it they go through the same entry point in-process.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "oracles.hpp"
#include "panscope/bias.hpp"
#include "panscope/file_io.hpp"
#include "panscope/ks.hpp"
#include "panscope/planted.hpp"
#include "panscope/trace_io.hpp"
#include "panscope_tools/cli.hpp"

using namespace panscope;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 3) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

std::string ids(const std::vector<NeuronId>& v) {
    std::string out;
    for (const auto& id : v) out += (out.empty() ? "" : " ") + std::to_string(id.layer) + ":" + std::to_string(id.channel);
    return out.empty() ? "-" : out;
}

constexpr std::uint64_t kNetSeed = 1;

SyntheticNetworkOptions options_for(std::uint64_t seed) {
    SyntheticNetworkOptions o;
    o.seed = seed;
    o.calibration = {1000 + seed, 16, 64, 64, 3};
    return o;
}

Tensor evaluation_batch(std::uint64_t seed, std::size_t count = 16) {
    return make_synthetic_batch({2000 + seed, count, 64, 64, 3});
}

// ---------------------------------------------------------------------------

Outcome ks_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<std::size_t> size(2, 200);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> tie(0, 9);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const bool ties = i % 2 == 1;
        std::vector<double> a(size(gen));
        std::vector<double> b(size(gen));
        for (auto* s : {&a, &b}) {
            for (double& v : *s) v = ties ? tie(gen) * 0.1 : u(gen);
        }
        const auto got = ks_statistics(a, b);
        const auto want = oracle::ks_scan(a, b);
        worst = std::max({worst, std::abs(got.two_sided - want.two_sided), std::abs(got.less - want.less),
                          std::abs(got.greater - want.greater)});
    }
    const double t = seconds_since(start);
    return {worst <= 1e-12 && t < 10.0, "1000 pairs, max |diff| " + fmt(worst) + ", " + fmt(t) + " s"};
}

Outcome conv_oracle() {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    std::uniform_int_distribution<std::size_t> ch(1, 5);
    std::uniform_int_distribution<std::size_t> extent(3, 14);
    double worst = 0.0;
    int policies[2] = {0, 0};
    for (int i = 0; i < 100; ++i) {
        ConvLayerSpec l;
        l.name = "case";
        l.in_channels = ch(gen);
        l.out_channels = ch(gen);
        l.kernel_height = 1 + 2 * (i % 3);
        l.kernel_width = 1 + 2 * ((i / 3) % 3);
        l.stride = 1 + i % 2;
        l.padding = std::max(l.kernel_height, l.kernel_width) / 2;
        l.policy = (i / 2) % 2 ? PaddingPolicy::reflect : PaddingPolicy::zero;
        ++policies[static_cast<int>(l.policy)];
        const std::size_t h = std::max(extent(gen), l.padding + 1);
        const std::size_t w = std::max(extent(gen), l.padding + 1);
        l.weights = Tensor(Shape{l.out_channels, l.in_channels, l.kernel_height, l.kernel_width});
        for (float& v : l.weights.data()) v = u(gen);
        l.bias.resize(l.out_channels);
        for (float& v : l.bias) v = u(gen);
        Tensor x(Shape{2, l.in_channels, h, w});
        for (float& v : x.data()) v = u(gen);

        std::size_t oh = 0;
        std::size_t ow = 0;
        const auto want = oracle::conv(x.values(), 2, l.in_channels, h, w, l.weights.values(), l.out_channels,
                                       l.kernel_height, l.kernel_width, l.bias, l.stride, l.padding,
                                       std::vector<bool>(l.out_channels, l.policy == PaddingPolicy::reflect), oh, ow);
        const Tensor got = conv2d(x, l);
        if (got.values().size() != want.size()) return {false, "case " + std::to_string(i) + ": output size differs"};
        for (std::size_t k = 0; k < want.size(); ++k) worst = std::max(worst, std::abs(want[k] - got.values()[k]));
    }
    return {worst < 1e-5, "100 cases (" + std::to_string(policies[0]) + " zero, " + std::to_string(policies[1]) +
                              " reflect), max |diff| " + fmt(worst)};
}

struct PlantedFixture {
    SyntheticNetwork net;
    Tensor batch;
    double build_seconds = 0.0;
};

const PlantedFixture& planted_fixture() {
    static const PlantedFixture fixture = [] {
        PlantedFixture f;
        const auto start = Clock::now();
        f.net = build_synthetic_network(reference_template(), reference_plants(), options_for(kNetSeed));
        f.build_seconds = seconds_since(start);
        f.batch = evaluation_batch(kNetSeed);
        return f;
    }();
    return fixture;
}

Outcome planted_detection() {
    const auto start = Clock::now();
    const PlantedFixture& f = planted_fixture();
    const DetectorEvaluation ev = evaluate_detector(f.net.model, f.net.truth, f.batch, {0.5});
    const double t = seconds_since(start) + f.build_seconds;
    return {ev.precision == 1.0 && ev.recall == 1.0 && !ev.nothing_flagged && ev.type_mismatches == 0 && t < 60.0,
            "precision " + fmt(ev.precision) + ", recall " + fmt(ev.recall) + ", type mismatches " +
                std::to_string(ev.type_mismatches) + ", false positives [" + ids(ev.false_positive_neurons) +
                "], missed [" + ids(ev.missed_neurons) + "], " + fmt(t) + " s"};
}

Outcome edge_discrimination() {
    std::vector<PlantSpec> plants = reference_plants();
    const PlantKind edges[] = {PlantKind::sobel_v, PlantKind::sobel_h, PlantKind::prewitt_v, PlantKind::prewitt_h};
    for (std::size_t i = 0; i < 4; ++i) plants.push_back({0, 6 + i, edges[i], {}, {}});
    std::size_t checked = 0;
    std::size_t candidates = 0;
    std::size_t pans = 0;
    double max_two_sided = 0.0;
    double max_one_sided = 0.0;
    bool all_ok = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto net = build_synthetic_network(reference_template(), plants, options_for(seed));
        const Census c = census(net.model, evaluation_batch(seed), {0.5});
        for (std::size_t i = 0; i < 4; ++i) {
            const NeuronRecord* r = c.find({0, 6 + i});
            if (r == nullptr) return {false, "edge plant was not analysed"};
            ++checked;
            const auto& rep = r->report;
            const double two = *std::max_element(rep.ks.begin(), rep.ks.end());
            const double one = std::max(*std::max_element(rep.ks_plus.begin(), rep.ks_plus.end()),
                                        *std::max_element(rep.ks_minus.begin(), rep.ks_minus.end()));
            max_two_sided = std::max(max_two_sided, two);
            max_one_sided = std::max(max_one_sided, one);
            candidates += r->label.verdict == Verdict::edge_candidate;
            pans += r->label.verdict == Verdict::pan;
            all_ok = all_ok && r->label.verdict == Verdict::edge_candidate && two >= 0.5 && one < 0.5;
        }
    }
    return {all_ok, std::to_string(checked) + " Sobel/Prewitt plants over 5 seeds: " + std::to_string(candidates) +
                        " edge_candidate, " + std::to_string(pans) + " pan; max ks " + fmt(max_two_sided) +
                        ", max one-sided " + fmt(max_one_sided)};
}

Outcome reflect_kill_switch() {
    const PlantedFixture& f = planted_fixture();
    const ConvNetSpec reflected = make_variant(f.net.model, {VariantKind::reflect_all, {}, 0});
    const Census c = census(reflected, f.batch, {0.5});
    double worst = 0.0;
    std::size_t planted_detected = 0;
    for (const NeuronId& id : f.net.truth.planted_pans()) {
        const NeuronRecord* r = c.find(id);
        if (r == nullptr) return {false, "planted neuron missing from census"};
        for (std::size_t b = 0; b < 4; ++b) worst = std::max({worst, r->report.ks_plus[b], r->report.ks_minus[b]});
        planted_detected += r->label.verdict == Verdict::pan;
    }
    return {worst < 0.5 && planted_detected == 0,
            "max planted ks_plus/ks_minus " + fmt(worst) + ", planted detections " + std::to_string(planted_detected) +
                ", census total " + std::to_string(c.total_pans())};
}

Outcome threshold_monotonicity() {
    const PlantedFixture& f = planted_fixture();
    std::vector<std::vector<NeuronId>> sets;
    for (double theta : {0.4, 0.5, 0.6}) sets.push_back(census(f.net.model, f.batch, {theta}).pan_set());
    const bool ok = std::includes(sets[0].begin(), sets[0].end(), sets[1].begin(), sets[1].end()) &&
                    std::includes(sets[1].begin(), sets[1].end(), sets[2].begin(), sets[2].end());
    return {ok, "PANs at 0.4/0.5/0.6: " + std::to_string(sets[0].size()) + "/" + std::to_string(sets[1].size()) + "/" +
                    std::to_string(sets[2].size())};
}

Outcome region_accounting() {
    std::string detail;
    bool ok = true;
    for (std::size_t n : {3u, 5u, 8u, 32u}) {
        const std::size_t maps = 3;
        Tensor t(Shape{maps, 1, n, n});
        float v = 0.0f;
        for (float& x : t.data()) x = v++;
        const RegionSamples r = extract_regions(t, 0);
        const bool good = r.top.size() == maps * n && r.bottom.size() == maps * n && r.left.size() == maps * n &&
                          r.right.size() == maps * n && r.centre.size() == maps * (n - 2) * (n - 2);
        ok = ok && good;
        detail += (detail.empty() ? "" : ", ") + std::string("N=") + std::to_string(n) + ": border " +
                  std::to_string(r.top.size() / maps) + " centre " + std::to_string(r.centre.size() / maps);
    }
    return {ok, detail + " per map"};
}

Outcome odds_identity() {
    const PlantedFixture& f = planted_fixture();
    const ClassScores p = softmax(*forward(f.net.model, f.batch).logits);
    const ClassOdds same = class_odds(p, p);
    double odds_err = 0.0;
    for (const auto& o : same.odds) odds_err = std::max(odds_err, o ? std::abs(*o - 1.0) : 1.0);

    const auto pans = f.net.truth.planted_pans();
    double mass_err = 0.0;
    for (const VariantSpec& v : {VariantSpec{VariantKind::original, {}, 0}, VariantSpec{VariantKind::reflect_all, {}, 0},
                                 VariantSpec{VariantKind::pan_reflect, pans, 0},
                                 VariantSpec{VariantKind::rand_reflect, pans, 3}}) {
        const OddsReport r = run_bias_experiment(f.net.model, v, f.batch);
        mass_err = std::max(mass_err, r.max_softmax_mass_error);
    }
    return {odds_err <= 1e-9 && mass_err <= 1e-6,
            "max |odds(M,M) - 1| " + fmt(odds_err) + ", max |sum softmax - 1| " + fmt(mass_err) + " over 4 variants"};
}

Outcome bias_separation() {
    std::size_t wins = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto net = build_synthetic_network(reference_template(), reference_plants(), options_for(seed));
        const std::vector<NeuronId> pans = census(net.model, evaluation_batch(seed), {0.5}).pan_set();
        const Tensor images = make_synthetic_batch({3000 + seed, 64, 64, 64, 3});
        const double pan = run_bias_experiment(net.model, {VariantKind::pan_reflect, pans, 0}, images).log_odds_stddev;
        const double rand =
            run_bias_experiment(net.model, {VariantKind::rand_reflect, pans, seed}, images).log_odds_stddev;
        wins += pan > rand;
        detail += (detail.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + " pan " + fmt(pan) +
                  " rand " + fmt(rand);
    }
    return {wins == 5, std::to_string(wins) + "/5 (" + detail + ")"};
}

int run_cli_exit(const std::string& exe, const std::vector<std::string>& args) {
    if (exe.empty()) {
        std::ostringstream out;
        std::ostringstream err;
        return cli::run(args, out, err);
    }
    std::string cmd = "'" + exe + "'";
    for (const auto& a : args) cmd += " '" + a + "'";
    cmd += " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome trace_round_trip(const std::string& exe) {
    const fs::path dir = fs::temp_directory_path() / "panscope_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const PlantedFixture& f = planted_fixture();
    const ActivationTrace trace = forward(f.net.model, f.batch.slice_batch(0, 4)).trace;
    write_trace(trace, dir / "good.pantrace");
    const auto bytes = read_file_bytes(dir / "good.pantrace");
    const ActivationTrace back = read_trace(dir / "good.pantrace");
    const bool identity = back == trace && encode_trace(back) == bytes;
    const int good_exit = run_cli_exit(exe, {"detect-trace", "--trace", (dir / "good.pantrace").string()});

    auto bad_magic = bytes;
    bad_magic[7] = 'X';
    auto bad_version = bytes;
    bad_version[8] = 9;
    auto truncated = bytes;
    truncated.resize(bytes.size() / 2);
    std::string codes;
    bool rejected = true;
    for (const auto& [name, data] : {std::pair{"bad_magic", &bad_magic}, {"bad_version", &bad_version},
                                     {"truncated", &truncated}}) {
        const fs::path p = dir / (std::string(name) + ".pantrace");
        write_file_atomic(p, *data);
        const int code = run_cli_exit(exe, {"detect-trace", "--trace", p.string()});
        rejected = rejected && code == 2;
        codes += std::string(codes.empty() ? "" : ", ") + name + " -> " + std::to_string(code);
    }
    fs::remove_all(dir);
    return {identity && good_exit == 0 && rejected,
            std::string("round trip ") + (identity ? "byte-exact" : "MISMATCH") + " (" + std::to_string(bytes.size()) +
                " bytes), valid file -> " + std::to_string(good_exit) + "; " + codes +
                (exe.empty() ? " (in-process)" : "")};
}

} // namespace

int main(int argc, char** argv) {
    const std::string exe = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"ks-oracle-equivalence", ks_oracle},
        {"conv-oracle-equivalence", conv_oracle},
        {"planted-detection", planted_detection},
        {"edge-detector-discrimination", edge_discrimination},
        {"reflect-kill-switch", reflect_kill_switch},
        {"threshold-monotonicity", threshold_monotonicity},
        {"region-accounting", region_accounting},
        {"odds-identity-and-conservation", odds_identity},
        {"planted-bias-separation", bias_separation},
        {"trace-round-trip", [&] { return trace_round_trip(exe); }},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
              << " acceptance criteria passed" << std::endl;
    return failures;
}
