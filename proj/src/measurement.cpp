// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator

#include "bmsim/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bmsim/rng.hpp"

namespace bmsim {

namespace {

double to_dbm_clamped(double power_w) {
    if (power_w <= 0.0) return kRsrpFloorDbm;
    return std::max(10.0 * std::log10(power_w) + 30.0, kRsrpFloorDbm);
}

double dbm_to_linear(double dbm) { return std::pow(10.0, dbm / 10.0); }

}  // namespace

LinkBudget LinkBudget::gnb_to_ue(double tx_power_dbm, double ue_nf_db, double bw_hz) {
    LinkBudget lb;
    lb.tx_power_dbm = tx_power_dbm;
    lb.noise_figure_db = ue_nf_db;
    lb.bandwidth_hz = bw_hz;
    lb.noise_power_dbm = -174.0 + 10.0 * std::log10(bw_hz) + ue_nf_db;
    return lb;
}

void LinkBudget::validate() const {
    const double expected = -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    if (std::fabs(expected - noise_power_dbm) > 1e-9)
        throw std::invalid_argument("noise power inconsistent with bandwidth and noise figure");
}

static double rsrp_from_amplitude(cdouble amp, const LinkBudget& link, bool with_noise,
                                  std::uint64_t seed) {
    const double sqrt_p = std::sqrt(link.tx_power_w());
    cdouble y = sqrt_p * amp;
    if (with_noise) {
        // b_rx is unit norm, so the combined noise stays CN(0, sigma^2).
        Rng rng(hash_tag(seed, "rxnoise"));
        const double s = std::sqrt(link.noise_power_w() / 2.0);
        y += cdouble(s * rng.normal(), s * rng.normal());
    }
    return to_dbm_clamped(std::norm(y));
}

double rsrp_dbm(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& b_tx,
                const Eigen::VectorXcd& b_rx, const LinkBudget& link, bool with_noise,
                std::uint64_t seed) {
    if (h.cols() != b_tx.size() || h.rows() != b_rx.size())
        throw std::invalid_argument("channel/beam dimension mismatch");
    const cdouble amp = b_rx.dot(h * b_tx);  // b_rx^H H b_tx
    return rsrp_from_amplitude(amp, link, with_noise, seed);
}

double rsrp_dbm(const LinkChannel& link_channel, int tx_beam, int rx_beam,
                const LinkBudget& link, bool with_noise, std::uint64_t seed) {
    return rsrp_from_amplitude(link_channel.coupling(tx_beam, rx_beam), link, with_noise, seed);
}

RxBeamSelector::RxBeamSelector(int n_tx, int n_rx, int window)
    : n_rx_(n_rx), window_(window), history_(n_tx, std::vector<std::deque<double>>(n_rx)) {
    if (window < 1) throw std::invalid_argument("selector window must be >= 1");
}

void RxBeamSelector::push(int tx_idx, int rx_idx, double rsrp_dbm_val) {
    auto& ring = history_.at(tx_idx).at(rx_idx);
    ring.push_back(dbm_to_linear(rsrp_dbm_val));
    while (static_cast<int>(ring.size()) > window_) ring.pop_front();
}

int RxBeamSelector::best_rx(int tx_idx, std::span<const double> instantaneous) const {
    int best = 0;
    double best_avg = -std::numeric_limits<double>::infinity();
    for (int rx = 0; rx < n_rx_; ++rx) {
        const auto& ring = history_.at(tx_idx).at(rx);
        double avg;
        if (ring.empty()) {
            avg = dbm_to_linear(instantaneous[rx]);
        } else {
            // Window average over history plus the current sample.
            double acc = dbm_to_linear(instantaneous[rx]);
            int n = 1;
            for (auto it = ring.rbegin(); it != ring.rend() && n < window_; ++it, ++n) acc += *it;
            avg = acc / n;
        }
        if (avg > best_avg) {
            best_avg = avg;
            best = rx;
        }
    }
    return best;
}

RsrpVector measure_set(const LinkChannel& link_channel, std::span<const int> tx_set,
                       int n_rx_beams, const LinkBudget& link, bool with_noise,
                       RxBeamSelector* selector, double t, std::uint64_t seed,
                       std::vector<int>* rx_choice) {
    if (tx_set.empty() || n_rx_beams < 1)
        throw std::invalid_argument("measure_set needs TX beams and RX beams");

    RsrpVector out;
    out.t = t;
    out.values_dbm.reserve(tx_set.size());
    out.beam_ids.assign(tx_set.begin(), tx_set.end());
    if (rx_choice != nullptr) rx_choice->clear();

    std::vector<double> inst(n_rx_beams);
    for (int tx : tx_set) {
        for (int rx = 0; rx < n_rx_beams; ++rx) {
            const std::uint64_t s =
                hash_combine(hash_combine(seed, static_cast<std::uint64_t>(tx) * 131 + rx),
                             static_cast<std::uint64_t>(t * 1e6));
            inst[rx] = rsrp_dbm(link_channel, tx, rx, link, with_noise, s);
        }
        int best;
        if (selector != nullptr) {
            best = selector->best_rx(tx, inst);
            for (int rx = 0; rx < n_rx_beams; ++rx) selector->push(tx, rx, inst[rx]);
        } else {
            best = static_cast<int>(std::max_element(inst.begin(), inst.end()) - inst.begin());
        }
        out.values_dbm.push_back(inst[best]);
        if (rx_choice != nullptr) rx_choice->push_back(best);
    }
    return out;
}

RsrpVector l1_filter(std::span<const RsrpVector> history, int window) {
    if (window < 1) throw std::invalid_argument("filter window must be >= 1");
    if (history.empty()) throw std::invalid_argument("empty measurement history");

    const int n = history.back().size();
    const int take = std::min<int>(window, static_cast<int>(history.size()));
    RsrpVector out;
    out.t = history.back().t;
    out.beam_ids = history.back().beam_ids;
    out.values_dbm.resize(n);
    for (int b = 0; b < n; ++b) {
        double acc = 0.0;
        for (int k = 0; k < take; ++k) {
            const auto& v = history[history.size() - 1 - k];
            if (v.size() != n) throw std::invalid_argument("inconsistent history lengths");
            acc += dbm_to_linear(v.values_dbm[b]);
        }
        out.values_dbm[b] = to_dbm_clamped(acc / take * 1e-3) ;
    }
    return out;
}

MeasurementReport build_report(const RsrpVector& filtered, const SetBPattern& pattern, int n_s) {
    if (n_s < 1) throw std::invalid_argument("report size must be >= 1");
    const int n_b = pattern.size();
    if (n_s > n_b) throw std::invalid_argument("report size exceeds Set B size");

    // Collect the filtered values of Set B beams.
    std::vector<ReportEntry> entries;
    entries.reserve(n_b);
    if (pattern.mode == SetBPattern::Mode::subset) {
        for (int id : pattern.indices) {
            const auto it = std::find(filtered.beam_ids.begin(), filtered.beam_ids.end(), id);
            if (it == filtered.beam_ids.end())
                throw std::invalid_argument("Set B beam missing from filtered vector");
            entries.push_back({id, filtered.values_dbm[it - filtered.beam_ids.begin()]});
        }
    } else {
        for (int i = 0; i < filtered.size(); ++i)
            entries.push_back({filtered.beam_ids[i], filtered.values_dbm[i]});
    }

    std::sort(entries.begin(), entries.end(), [](const ReportEntry& a, const ReportEntry& b) {
        if (a.l1_rsrp_dbm != b.l1_rsrp_dbm) return a.l1_rsrp_dbm > b.l1_rsrp_dbm;
        return a.beam_id < b.beam_id;
    });
    entries.resize(n_s);

    MeasurementReport report;
    report.entries = std::move(entries);
    report.set_b_size = n_b;
    report.t = filtered.t;
    return report;
}

nlohmann::json report_to_json(const MeasurementReport& report, int ue_id) {
    nlohmann::json j;
    j["ue"] = ue_id;
    j["t"] = report.t;
    auto& entries = j["entries"] = nlohmann::json::array();
    for (const auto& e : report.entries) entries.push_back({e.beam_id, e.l1_rsrp_dbm});
    return j;
}

}  // namespace bmsim
