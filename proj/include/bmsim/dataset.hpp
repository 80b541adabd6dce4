// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator
//
// Training-sample construction for spatial and temporal beam prediction,
// input normalization, UE-disjoint dataset splits and JSONL persistence.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bmsim/array_codebook.hpp"
#include "bmsim/measurement.hpp"

namespace bmsim {

enum class UseCase { sbp1, sbp2, tbp };

std::string to_string(UseCase u);
UseCase use_case_from_string(const std::string& s);

struct SampleMeta {
    int ue_id = 0;
    int drop_id = 0;
    double t = 0.0;
    double speed_mps = 0.0;
    std::string antenna_config;
};

struct TrainingSample {
    std::vector<double> input;
    int label = 0;
    SampleMeta meta;
};

enum class Split { train, val, test };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

struct DatasetSchema {
    UseCase use_case = UseCase::sbp2;
    int n_b = 0;       // Set B size
    int n_a = 0;       // Set A size (label space)
    int l_o = 1;       // observation window (TBP)
    int l_p = 0;       // prediction horizon (TBP)

    int input_dim() const;
    bool operator==(const DatasetSchema&) const = default;
};

struct Dataset {
    DatasetSchema schema;
    std::vector<TrainingSample> samples;
    std::vector<Split> split;   // parallel to samples

    std::size_t size() const { return samples.size(); }
    std::vector<std::size_t> indices_of(Split s) const;
};

// Everything one UE produced during a drop: per instant the genie-filtered
// Set A vector (labels) and, for the SSB alternative, the filtered SSB
// vector (inputs).
struct InstantMeasurements {
    RsrpVector set_a_filtered;
    std::optional<RsrpVector> ssb_filtered;
};

struct UeTrace {
    int ue_id = 0;
    int drop_id = 0;
    double speed_mps = 0.0;
    std::string antenna_config;
    double dt = 0.08;
    std::vector<InstantMeasurements> instants;
};

struct CollectStats {
    std::size_t emitted = 0;
    std::size_t skipped_window = 0;
};

// sbp1: sorted SSB report order, RSRPs then idx/N_ssb encodings appended.
// sbp2: Set B restriction of Set A in beam-id order.
// tbp:  flattened time-major window of l_o Set B vectors, label at t + l_p;
//       windows whose start precedes the second instant are skipped (the
//       first instant only warms up the L1 filter).
std::vector<TrainingSample> collect_samples(std::span<const UeTrace> traces, UseCase use_case,
                                            const SetBPattern& pattern, int l_o, int l_p,
                                            CollectStats* stats = nullptr);

// x_i -> (x_i - max_j x_j) / 20 dB: max-referenced, order preserving.
std::vector<double> normalize_input(std::span<const double> raw_dbm);

// UE-disjoint split, deterministic under seed. Requires >= 3 distinct UEs.
Dataset split_dataset(std::vector<TrainingSample> samples, const DatasetSchema& schema,
                      const std::array<double, 3>& ratios, std::uint64_t seed);

void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);
// Loads and checks the file schema against `expected`.
Dataset load_dataset(const std::string& path, const DatasetSchema& expected);

void export_dataset_csv(const Dataset& dataset, const std::string& path);

}  // namespace bmsim
