// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator

#include "bmsim/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace bmsim {

double top_k_accuracy(std::span<const PredictionRecord> records, int k) {
    if (records.empty()) throw std::invalid_argument("no prediction records");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::size_t hits = 0;
    for (const auto& r : records) {
        const int take = std::min<int>(k, static_cast<int>(r.predicted_top_k.size()));
        for (int i = 0; i < take; ++i) {
            if (r.predicted_top_k[i] == r.genie_index) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

double rsrp_error_db(const PredictionRecord& record) {
    return record.genie_rsrp_dbm - record.predicted_top1_rsrp_dbm;
}

double acc_1db(std::span<const PredictionRecord> records) {
    if (records.empty()) throw std::invalid_argument("no prediction records");
    std::size_t hits = 0;
    for (const auto& r : records)
        if (rsrp_error_db(r) < 1.0) ++hits;
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

double mor(UseCase use_case, int n_b, int n_a, int l_o, int l_p) {
    if (n_b < 1 || n_a < 1 || n_b > n_a) throw std::invalid_argument("invalid Set B / Set A sizes");
    if (use_case == UseCase::tbp) {
        if (l_o < 1 || l_p < 1) throw std::invalid_argument("TBP MOR needs l_o, l_p >= 1");
        return 1.0 - static_cast<double>(l_o * n_b) / static_cast<double>((l_o + l_p) * n_a);
    }
    return 1.0 - static_cast<double>(n_b) / static_cast<double>(n_a);
}

double throughput_proxy_mbps(double sinr_linear, double bandwidth_hz, int n_cosched,
                             double overhead, double max_se) {
    if (sinr_linear < 0.0) throw std::invalid_argument("SINR must be >= 0");
    if (n_cosched < 1) throw std::invalid_argument("co-scheduled UE count must be >= 1");
    const double se = std::min(std::log2(1.0 + sinr_linear), max_se);
    return (1.0 - overhead) * bandwidth_hz * se / n_cosched / 1e6;
}

std::map<int, double> percentiles(std::vector<double> values, std::span<const int> ps) {
    if (values.empty()) throw std::invalid_argument("no values for percentiles");
    std::sort(values.begin(), values.end());
    std::map<int, double> out;
    const double n = static_cast<double>(values.size());
    for (int p : ps) {
        const double rank = p / 100.0 * (n - 1.0);
        const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
        const std::size_t hi = std::min<std::size_t>(lo + 1, values.size() - 1);
        const double frac = rank - static_cast<double>(lo);
        out[p] = values[lo] + frac * (values[hi] - values[lo]);
    }
    return out;
}

KpiRecord aggregate_kpis(std::span<const PredictionRecord> records,
                         std::span<const double> throughputs_mbps, UseCase use_case, int n_b,
                         int n_a, int l_o, int l_p, std::span<const int> ks) {
    KpiRecord kpi;
    kpi.n_records = records.size();
    for (int k : ks) kpi.top_k_accuracy[k] = top_k_accuracy(records, k);
    kpi.rsrp_errors_db.reserve(records.size());
    for (const auto& r : records) kpi.rsrp_errors_db.push_back(rsrp_error_db(r));
    kpi.acc_1db = acc_1db(records);
    kpi.mor = mor(use_case, n_b, n_a, l_o, l_p);
    if (!throughputs_mbps.empty()) {
        const int ps[] = {5, 50, 95};
        kpi.throughput_percentiles_mbps =
            percentiles({throughputs_mbps.begin(), throughputs_mbps.end()}, ps);
    }
    return kpi;
}

nlohmann::json KpiRecord::to_json() const {
    nlohmann::json j;
    for (const auto& [k, v] : top_k_accuracy) j["top_k_accuracy"][std::to_string(k)] = v;
    j["acc_1db"] = acc_1db;
    j["mor"] = mor;
    j["n_records"] = n_records;
    for (const auto& [p, v] : throughput_percentiles_mbps)
        j["throughput_mbps"]["p" + std::to_string(p)] = v;
    // summary stats of the error distribution; the full CDF is exported on demand
    if (!rsrp_errors_db.empty()) {
        const int ps[] = {50, 90, 95};
        const auto q = percentiles(rsrp_errors_db, ps);
        for (const auto& [p, v] : q) j["rsrp_error_db"]["p" + std::to_string(p)] = v;
    }
    return j;
}

void export_kpi_csv(const std::map<std::string, KpiRecord>& by_policy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "policy,k,top_k_accuracy,acc_1db,mor,tput_p5_mbps,tput_p50_mbps,tput_p95_mbps\n";
    out.precision(10);
    for (const auto& [name, kpi] : by_policy) {
        for (const auto& [k, acc] : kpi.top_k_accuracy) {
            out << name << ',' << k << ',' << acc << ',' << kpi.acc_1db << ',' << kpi.mor;
            for (int p : {5, 50, 95}) {
                out << ',';
                const auto it = kpi.throughput_percentiles_mbps.find(p);
                if (it != kpi.throughput_percentiles_mbps.end()) out << it->second;
            }
            out << '\n';
        }
    }
}

void export_rsrp_error_cdf(const KpiRecord& kpi, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    std::vector<double> sorted = kpi.rsrp_errors_db;
    std::sort(sorted.begin(), sorted.end());
    out << "e_rsrp_db,cdf\n";
    out.precision(10);
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        out << sorted[i] << ',' << (static_cast<double>(i + 1) / n) << '\n';
}

}  // namespace bmsim
