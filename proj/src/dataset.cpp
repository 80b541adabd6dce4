// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator

#include "bmsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "bmsim/rng.hpp"

namespace bmsim {

namespace {
constexpr double kNormSigmaDb = 20.0;

int argmax_beam(const RsrpVector& v) {
    int best_pos = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v.values_dbm[i] > v.values_dbm[best_pos]) best_pos = i;
    return v.beam_ids[best_pos];
}
}  // namespace

std::string to_string(UseCase u) {
    switch (u) {
        case UseCase::sbp1: return "sbp1";
        case UseCase::sbp2: return "sbp2";
        default: return "tbp";
    }
}

UseCase use_case_from_string(const std::string& s) {
    if (s == "sbp1") return UseCase::sbp1;
    if (s == "sbp2") return UseCase::sbp2;
    if (s == "tbp") return UseCase::tbp;
    throw std::invalid_argument("unknown use case: " + s);
}

std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        default: return "test";
    }
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "val") return Split::val;
    if (s == "test") return Split::test;
    throw std::invalid_argument("unknown split: " + s);
}

int DatasetSchema::input_dim() const {
    switch (use_case) {
        case UseCase::sbp1: return 2 * n_b;
        case UseCase::sbp2: return n_b;
        default: return l_o * n_b;
    }
}

std::vector<std::size_t> Dataset::indices_of(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < split.size(); ++i)
        if (split[i] == s) out.push_back(i);
    return out;
}

std::vector<double> normalize_input(std::span<const double> raw_dbm) {
    std::vector<double> out(raw_dbm.begin(), raw_dbm.end());
    if (out.empty()) return out;
    const double mx = *std::max_element(out.begin(), out.end());
    for (double& x : out) x = (x - mx) / kNormSigmaDb;
    return out;
}

namespace {

std::vector<double> restrict_to_pattern(const RsrpVector& set_a, const SetBPattern& pattern) {
    std::vector<double> vals;
    vals.reserve(pattern.indices.size());
    for (int id : pattern.indices) {
        const auto it = std::find(set_a.beam_ids.begin(), set_a.beam_ids.end(), id);
        if (it == set_a.beam_ids.end())
            throw std::invalid_argument("Set B beam missing from Set A measurement");
        vals.push_back(set_a.values_dbm[it - set_a.beam_ids.begin()]);
    }
    return vals;
}

TrainingSample make_sbp1_sample(const InstantMeasurements& inst, const UeTrace& trace) {
    if (!inst.ssb_filtered.has_value())
        throw std::invalid_argument("SBP1 collection needs SSB measurements");
    const RsrpVector& ssb = *inst.ssb_filtered;
    const int n = ssb.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (ssb.values_dbm[a] != ssb.values_dbm[b]) return ssb.values_dbm[a] > ssb.values_dbm[b];
        return ssb.beam_ids[a] < ssb.beam_ids[b];
    });
    std::vector<double> sorted_vals(n);
    for (int i = 0; i < n; ++i) sorted_vals[i] = ssb.values_dbm[order[i]];
    TrainingSample s;
    s.input = normalize_input(sorted_vals);
    s.input.reserve(2 * n);
    for (int i = 0; i < n; ++i)
        s.input.push_back(static_cast<double>(ssb.beam_ids[order[i]]) / n);
    s.label = argmax_beam(inst.set_a_filtered);
    s.meta = {trace.ue_id, trace.drop_id, inst.set_a_filtered.t, trace.speed_mps,
              trace.antenna_config};
    return s;
}

}  // namespace

std::vector<TrainingSample> collect_samples(std::span<const UeTrace> traces, UseCase use_case,
                                            const SetBPattern& pattern, int l_o, int l_p,
                                            CollectStats* stats) {
    if (use_case == UseCase::tbp && (l_o < 1 || l_p < 1))
        throw std::invalid_argument("TBP needs l_o >= 1 and l_p >= 1");

    std::vector<TrainingSample> samples;
    CollectStats local;
    for (const UeTrace& trace : traces) {
        const int n_t = static_cast<int>(trace.instants.size());
        if (use_case == UseCase::sbp1) {
            for (const auto& inst : trace.instants) {
                samples.push_back(make_sbp1_sample(inst, trace));
                ++local.emitted;
            }
        } else if (use_case == UseCase::sbp2) {
            for (const auto& inst : trace.instants) {
                TrainingSample s;
                s.input = normalize_input(restrict_to_pattern(inst.set_a_filtered, pattern));
                s.label = argmax_beam(inst.set_a_filtered);
                s.meta = {trace.ue_id, trace.drop_id, inst.set_a_filtered.t, trace.speed_mps,
                          trace.antenna_config};
                samples.push_back(std::move(s));
                ++local.emitted;
            }
        } else {
            for (int t = 0; t + l_p < n_t; ++t) {
                // Window {t-l_o+1 .. t}; instant 0 only warms up the L1
                // filter, so windows start at instant 1 or later.
                if (t - l_o + 1 < 1) {
                    ++local.skipped_window;
                    continue;
                }
                std::vector<double> window_raw;
                window_raw.reserve(static_cast<std::size_t>(l_o) * pattern.size());
                for (int k = t - l_o + 1; k <= t; ++k) {
                    const auto vals = restrict_to_pattern(trace.instants[k].set_a_filtered, pattern);
                    window_raw.insert(window_raw.end(), vals.begin(), vals.end());
                }
                TrainingSample s;
                s.input = normalize_input(window_raw);
                s.label = argmax_beam(trace.instants[t + l_p].set_a_filtered);
                s.meta = {trace.ue_id, trace.drop_id, trace.instants[t].set_a_filtered.t,
                          trace.speed_mps, trace.antenna_config};
                samples.push_back(std::move(s));
                ++local.emitted;
            }
        }
    }
    if (stats != nullptr) *stats = local;
    return samples;
}

Dataset split_dataset(std::vector<TrainingSample> samples, const DatasetSchema& schema,
                      const std::array<double, 3>& ratios, std::uint64_t seed) {
    if (std::fabs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9)
        throw std::invalid_argument("split ratios must sum to 1");

    std::vector<int> ue_ids;
    for (const auto& s : samples) ue_ids.push_back(s.meta.ue_id);
    std::sort(ue_ids.begin(), ue_ids.end());
    ue_ids.erase(std::unique(ue_ids.begin(), ue_ids.end()), ue_ids.end());
    const int n_ue = static_cast<int>(ue_ids.size());
    if (n_ue < 3) throw std::invalid_argument("need at least 3 UEs for a 3-way split");

    Rng rng(hash_tag(seed, "split"));
    for (int i = n_ue - 1; i > 0; --i)
        std::swap(ue_ids[i], ue_ids[rng.uniform_int(i + 1)]);

    int n_train = static_cast<int>(std::floor(ratios[0] * n_ue));
    int n_val = static_cast<int>(std::floor(ratios[1] * n_ue));
    if (n_val == 0) {
        n_val = 1;
        --n_train;
    }
    if (n_ue - n_train - n_val == 0) --n_train;

    std::unordered_map<int, Split> assignment;
    for (int i = 0; i < n_ue; ++i) {
        Split s = (i < n_train) ? Split::train : (i < n_train + n_val ? Split::val : Split::test);
        assignment[ue_ids[i]] = s;
    }

    Dataset out;
    out.schema = schema;
    out.samples = std::move(samples);
    out.split.reserve(out.samples.size());
    for (const auto& s : out.samples) out.split.push_back(assignment.at(s.meta.ue_id));
    return out;
}

namespace {

nlohmann::json schema_to_json(const DatasetSchema& s) {
    return {{"use_case", to_string(s.use_case)}, {"n_b", s.n_b}, {"n_a", s.n_a},
            {"l_o", s.l_o}, {"l_p", s.l_p}};
}

DatasetSchema schema_from_json(const nlohmann::json& j) {
    DatasetSchema s;
    s.use_case = use_case_from_string(j.at("use_case").get<std::string>());
    s.n_b = j.at("n_b").get<int>();
    s.n_a = j.at("n_a").get<int>();
    s.l_o = j.at("l_o").get<int>();
    s.l_p = j.at("l_p").get<int>();
    return s;
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << nlohmann::json{{"schema", schema_to_json(dataset.schema)}}.dump() << '\n';
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const auto& s = dataset.samples[i];
        nlohmann::json j;
        j["input"] = s.input;
        j["label"] = s.label;
        j["meta"] = {{"ue_id", s.meta.ue_id}, {"drop_id", s.meta.drop_id}, {"t", s.meta.t},
                     {"speed", s.meta.speed_mps}, {"antenna_config", s.meta.antenna_config}};
        j["split"] = to_string(dataset.split[i]);
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path);

    Dataset dataset;
    try {
        dataset.schema = schema_from_json(nlohmann::json::parse(line).at("schema"));
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            TrainingSample s;
            s.input = j.at("input").get<std::vector<double>>();
            s.label = j.at("label").get<int>();
            const auto& m = j.at("meta");
            s.meta = {m.at("ue_id").get<int>(), m.at("drop_id").get<int>(),
                      m.at("t").get<double>(), m.at("speed").get<double>(),
                      m.at("antenna_config").get<std::string>()};
            if (static_cast<int>(s.input.size()) != dataset.schema.input_dim())
                throw std::runtime_error("sample input length does not match schema");
            if (s.label < 0 || s.label >= dataset.schema.n_a)
                throw std::runtime_error("label out of range");
            dataset.split.push_back(split_from_string(j.at("split").get<std::string>()));
            dataset.samples.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt dataset file " + path + ": " + e.what());
    }
    return dataset;
}

Dataset load_dataset(const std::string& path, const DatasetSchema& expected) {
    Dataset d = load_dataset(path);
    if (!(d.schema == expected))
        throw std::runtime_error("dataset schema mismatch: " + path);
    return d;
}

void export_dataset_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const int dim = dataset.schema.input_dim();
    for (int i = 0; i < dim; ++i) out << "x" << i << ",";
    out << "label,ue_id,drop_id,t,split\n";
    out.precision(17);
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const auto& s = dataset.samples[i];
        for (double x : s.input) out << x << ",";
        out << s.label << "," << s.meta.ue_id << "," << s.meta.drop_id << "," << s.meta.t << ","
            << to_string(dataset.split[i]) << '\n';
    }
}

}  // namespace bmsim
