// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator
//
// Non-ML comparison policies: strongest reported Set B beam, sample-and-hold
// and the exhaustive genie-aided search.

#pragma once

#include <utility>

#include "bmsim/array_codebook.hpp"
#include "bmsim/measurement.hpp"

namespace bmsim {

enum class BaselineKind { strongest_set_b, sample_and_hold, exhaustive_genie };

struct BaselinePolicy {
    BaselineKind kind = BaselineKind::strongest_set_b;
    SetBPattern pattern;
};

// Set A index of the report's top entry. Only defined for subset-mode
// patterns (SSB reports do not carry Set A indices).
int baseline_strongest_set_b(const MeasurementReport& report, const SetBPattern& pattern);

// Strongest Set B beam at time t, reused at t+1: returns {index_t, index_t1}.
std::pair<int, int> sample_and_hold(const MeasurementReport& report_t,
                                    const SetBPattern& pattern);

// Genie-aided Top-1 over the full Set A measurement; ties toward lower id.
int exhaustive_genie(const RsrpVector& set_a_rsrp);

}  // namespace bmsim
