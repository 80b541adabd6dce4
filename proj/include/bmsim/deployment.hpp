// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator
//
// Hexagonal multi-cell deployment with wrap-around, UE drops and straight-
// line mobility with boundary reflection.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace bmsim {

struct SectorDescriptor {
    int sector_id = 0;           // global sector index
    int site_id = 0;
    Eigen::Vector2d site_pos{0.0, 0.0};
    double boresight_az = 0.0;   // global azimuth, radians
};

struct LayoutConfig {
    int n_sites = 1;             // 1, 7 or 19
    int sectors_per_site = 3;    // 1 or 3
    double isd_m = 500.0;
    double gnb_height_m = 25.0;
    double carrier_hz = 30e9;
    bool wrap_around = true;     // only effective for n_sites > 1
    double min_drop_distance_m = 35.0;
};

struct NetworkLayout {
    LayoutConfig config;
    std::vector<Eigen::Vector2d> site_positions;
    std::vector<SectorDescriptor> sectors;
    std::vector<Eigen::Vector2d> wrap_offsets;  // identity first, then images
    double bound_radius_m = 0.0;                // mobility reflection boundary

    int n_sectors() const { return static_cast<int>(sectors.size()); }
};

struct UEState {
    int ue_id = 0;
    Eigen::Vector3d position{0.0, 0.0, 1.5};
    Eigen::Vector2d velocity{0.0, 0.0};
    double heading = 0.0;                        // panel mount reference
    std::vector<double> panel_orientations;      // global azimuths, 2 panels
    int serving_sector = -1;
    std::uint64_t rng_seed = 0;
    std::uint64_t mobility_draws = 0;            // advances per redraw event
};

NetworkLayout build_layout(const LayoutConfig& config);

// 10-per-sector style uniform drop inside each sector's coverage wedge of
// the hexagonal cell, at fixed UE height 1.5 m. Deterministic under seed.
std::vector<UEState> drop_ues(const NetworkLayout& layout, int n_per_sector,
                              double speed_mps, std::uint64_t seed);

// Straight-line constant-speed motion; on crossing the layout boundary the
// direction is redrawn inward (speed magnitude preserved).
UEState step_mobility(const UEState& ue, double dt, const NetworkLayout& layout);

// Displacement from `from` to `to` under wrap-around: the image of `to`
// closest to `from` is used.
Eigen::Vector2d wrapped_offset(const NetworkLayout& layout, const Eigen::Vector2d& from,
                               const Eigen::Vector2d& to);

double distance_2d(const NetworkLayout& layout, const SectorDescriptor& sector,
                   const Eigen::Vector3d& ue_pos);

nlohmann::json layout_to_json(const NetworkLayout& layout);
nlohmann::json ues_to_json(const std::vector<UEState>& ues);

}  // namespace bmsim
