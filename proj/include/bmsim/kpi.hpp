// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator
//
// Rel-18 style evaluation KPIs: Top-K accuracy, RSRP error, 1 dB-margin
// accuracy, measurement overhead reduction, Shannon throughput proxy and
// empirical CDF percentiles.

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmsim/dataset.hpp"

namespace bmsim {

struct PredictionRecord {
    std::vector<int> predicted_top_k;
    int genie_index = 0;
    double genie_rsrp_dbm = 0.0;
    double predicted_top1_rsrp_dbm = 0.0;
    int ue_id = 0;
    double t = 0.0;
    double pos_x = 0.0;
    double pos_y = 0.0;
};

// Fraction of records whose Top-K list contains the genie index.
double top_k_accuracy(std::span<const PredictionRecord> records, int k);

// Genie RSRP minus the predicted Top-1's RSRP, always >= 0.
double rsrp_error_db(const PredictionRecord& record);

// Fraction with strictly e_RSRP < 1 dB.
double acc_1db(std::span<const PredictionRecord> records);

// Measurement overhead reduction. SBP: 1 - N_B/N_A; TBP weights the
// observation and prediction windows: 1 - l_o*N_B / ((l_o+l_p)*N_A).
double mor(UseCase use_case, int n_b, int n_a, int l_o = 0, int l_p = 0);

// (1-overhead) * BW * min(log2(1+SINR), max_se) / n_cosched, in Mbps.
double throughput_proxy_mbps(double sinr_linear, double bandwidth_hz, int n_cosched = 1,
                             double overhead = 0.30, double max_se = 7.4);

// Linear-interpolated empirical percentiles (values need not be sorted).
std::map<int, double> percentiles(std::vector<double> values, std::span<const int> ps);

struct KpiRecord {
    std::map<int, double> top_k_accuracy;       // K -> fraction
    std::vector<double> rsrp_errors_db;         // per record, CDF source
    double acc_1db = 0.0;
    double mor = 0.0;
    std::map<int, double> throughput_percentiles_mbps;
    std::size_t n_records = 0;

    nlohmann::json to_json() const;
};

KpiRecord aggregate_kpis(std::span<const PredictionRecord> records,
                         std::span<const double> throughputs_mbps, UseCase use_case, int n_b,
                         int n_a, int l_o, int l_p, std::span<const int> ks);

void export_kpi_csv(const std::map<std::string, KpiRecord>& by_policy, const std::string& path);
void export_rsrp_error_cdf(const KpiRecord& kpi, const std::string& path);

}  // namespace bmsim
