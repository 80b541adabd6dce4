// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator
//
// Per-beam L1-RSRP synthesis, sliding-window RX beam selection, L1
// filtering and Set B measurement report construction.

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "bmsim/array_codebook.hpp"
#include "bmsim/channel.hpp"

namespace bmsim {

// RSRP values below this are clamped so reports and model inputs stay finite.
constexpr double kRsrpFloorDbm = -200.0;

struct LinkBudget {
    double tx_power_dbm = 40.0;
    double noise_figure_db = 10.0;   // receiver side
    double bandwidth_hz = 80e6;
    double noise_power_dbm = 0.0;    // derived: -174 + 10log10(BW) + NF

    static LinkBudget gnb_to_ue(double tx_power_dbm = 40.0, double ue_nf_db = 10.0,
                                double bw_hz = 80e6);
    void validate() const;           // checks the derived field to 1e-9 dB
    double tx_power_w() const { return std::pow(10.0, (tx_power_dbm - 30.0) / 10.0); }
    double noise_power_w() const { return std::pow(10.0, (noise_power_dbm - 30.0) / 10.0); }
};

struct RsrpVector {
    std::vector<double> values_dbm;
    std::vector<int> beam_ids;
    double t = 0.0;

    int size() const { return static_cast<int>(values_dbm.size()); }
};

struct ReportEntry {
    int beam_id = 0;
    double l1_rsrp_dbm = 0.0;
};

struct MeasurementReport {
    std::vector<ReportEntry> entries;  // sorted descending by RSRP, ties by id
    int set_b_size = 0;
    double t = 0.0;
};

// |b_rx^H H b_tx|^2 scaled by TX power, optional receiver noise realization.
double rsrp_dbm(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& b_tx,
                const Eigen::VectorXcd& b_rx, const LinkBudget& link, bool with_noise,
                std::uint64_t seed = 0);

double rsrp_dbm(const LinkChannel& link_channel, int tx_beam, int rx_beam,
                const LinkBudget& link, bool with_noise, std::uint64_t seed = 0);

// Sliding-window RX beam selection state (Table-style window of 3): per TX
// beam, tracks recent per-RX-beam RSRPs; the RX beam with the highest
// window average wins.
class RxBeamSelector {
  public:
    RxBeamSelector() = default;
    RxBeamSelector(int n_tx, int n_rx, int window = 3);

    void push(int tx_idx, int rx_idx, double rsrp_dbm_val);
    int best_rx(int tx_idx, std::span<const double> instantaneous) const;
    int window() const { return window_; }

  private:
    int n_rx_ = 0;
    int window_ = 3;
    // history[tx][rx] = ring of linear-power values
    std::vector<std::vector<std::deque<double>>> history_;
};

// Measures each TX beam of `tx_set` under the best RX beam across both UE
// panels; updates the selector state. tx_set indexes into the link's cached
// TX codebook; beam ids in the result are those indices.
RsrpVector measure_set(const LinkChannel& link_channel, std::span<const int> tx_set,
                       int n_rx_beams, const LinkBudget& link, bool with_noise,
                       RxBeamSelector* selector, double t, std::uint64_t seed = 0,
                       std::vector<int>* rx_choice = nullptr);

// Per-beam arithmetic mean in linear power of the last min(window, len)
// samples; returns dBm.
RsrpVector l1_filter(std::span<const RsrpVector> history, int window);

// Descending top-n_s restricted to the Set B pattern; ties broken by lower
// beam id. `filtered` must carry the beam ids referenced by the pattern.
MeasurementReport build_report(const RsrpVector& filtered, const SetBPattern& pattern, int n_s);

nlohmann::json report_to_json(const MeasurementReport& report, int ue_id);

}  // namespace bmsim
