// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator
//
// Full simulation configuration: deployment, arrays, codebooks, channel,
// measurement, dataset, model and monitoring knobs. JSON round-trip with
// dotted-path overrides and a stable content hash.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmsim/array_codebook.hpp"
#include "bmsim/channel.hpp"
#include "bmsim/dataset.hpp"
#include "bmsim/deployment.hpp"
#include "bmsim/nn/model.hpp"

namespace bmsim {

struct RunConfig {
    int n_drops = 16;
    int ues_per_sector = 10;
    int instants_per_drop = 40;
    double dt_s = 0.08;
    double speed_kmph = 3.0;
    bool measurement_noise = false;
    int l1_filter_window = 3;
    int rx_window = 3;
    int n_s = 0;               // reported beams; 0 = full Set B
};

struct EvalConfig {
    int n_drops = 2;
    int top_k_max = 10;
    bool second_round_refinement = false;
};

struct MonitorConfig {
    bool enabled = false;
    double tau = 0.8;
    int window = 50;
};

struct CodebookConfig {
    int n_az = 16;
    int n_el = 4;
    double az_span_deg_lo = -60.0;   // boresight-relative
    double az_span_deg_hi = 60.0;
    double zen_span_deg_lo = 90.0;
    double zen_span_deg_hi = 135.0;
    int ssb_group_az = 2;
    int ssb_group_el = 2;
};

struct SimConfig {
    std::uint64_t seed = 1;
    LayoutConfig layout;
    ArrayGeometry gnb_array{8, 4, 0.5, 0.5, ElementPattern::sectorized_3gpp};
    ArrayGeometry ue_array{4, 1, 0.5, 0.5, ElementPattern::isotropic};
    int ue_panels = 2;
    int rx_beams_per_panel = 4;
    CodebookConfig codebook;
    UseCase use_case = UseCase::sbp2;
    int set_b_size = 16;
    int l_o = 5;
    int l_p = 1;
    ChannelParams channel;
    double tx_power_dbm = 40.0;
    double ue_noise_figure_db = 10.0;
    double bandwidth_hz = 80e6;
    double overhead = 0.30;
    double max_se = 7.4;
    RunConfig run;
    EvalConfig eval;
    MonitorConfig monitor;
    nn::Hyper hyper;
    std::array<double, 3> dataset_split{0.8, 0.1, 0.1};

    double speed_mps() const { return run.speed_kmph / 3.6; }
    // "MxN" with M vertical and N horizontal rows/columns of the gNB panel.
    std::string antenna_tag() const;
    int set_a_size() const { return codebook.n_az * codebook.n_el; }
    int ssb_size() const;
    int n_rx_beams() const { return ue_panels * rx_beams_per_panel; }
    int effective_n_s(int set_b) const { return run.n_s > 0 ? std::min(run.n_s, set_b) : set_b; }

    DatasetSchema dataset_schema() const;
    nn::ModelConfig model_config() const;
    void validate() const;

    nlohmann::json to_json() const;
    static SimConfig from_json(const nlohmann::json& j);
    static SimConfig load(const std::string& path);
    void save(const std::string& path) const;

    std::uint64_t config_hash() const;
};

// Applies "a.b.c=value" style overrides; values parse as JSON when possible,
// else as strings. Throws std::invalid_argument on unknown paths.
void apply_override(nlohmann::json& j, const std::string& key, const std::string& value);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace bmsim
