// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator

#include "bmsim/baselines.hpp"

#include <stdexcept>

namespace bmsim {

int baseline_strongest_set_b(const MeasurementReport& report, const SetBPattern& pattern) {
    if (report.entries.empty()) throw std::invalid_argument("empty report");
    if (pattern.mode != SetBPattern::Mode::subset)
        throw std::invalid_argument("strongest-Set-B baseline needs a subset pattern");
    return report.entries.front().beam_id;
}

std::pair<int, int> sample_and_hold(const MeasurementReport& report_t,
                                    const SetBPattern& pattern) {
    const int idx = baseline_strongest_set_b(report_t, pattern);
    return {idx, idx};
}

int exhaustive_genie(const RsrpVector& set_a_rsrp) {
    if (set_a_rsrp.size() == 0) throw std::invalid_argument("empty Set A measurement");
    int best = 0;
    for (int i = 1; i < set_a_rsrp.size(); ++i)
        if (set_a_rsrp.values_dbm[i] > set_a_rsrp.values_dbm[best]) best = i;
    return set_a_rsrp.beam_ids[best];
}

}  // namespace bmsim
