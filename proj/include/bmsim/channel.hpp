// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator
//
// Simplified clustered geometric FR2 channel: UMa-style LoS probability and
// pathloss, spatially correlated shadowing, and a small number of clusters
// drawn around the geometric LoS direction. Preserves angular sparsity,
// best-beam spatial continuity and temporal coherence at desk scale.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bmsim/array_codebook.hpp"
#include "bmsim/deployment.hpp"

namespace bmsim {

struct ChannelParams {
    int n_clusters = 6;
    double k_factor_db = 10.0;          // dominant-cluster power when LoS
    double spread_los_deg = 3.0;        // Laplacian angular spread around geometry
    double spread_nlos_deg = 10.0;
    double shadow_sigma_los_db = 4.0;
    double shadow_sigma_nlos_db = 6.0;
    double shadow_decorr_m = 50.0;
};

// TR 38.901 UMa LoS probability for UE height <= 13 m: P = 1 below 18 m,
// then 18/d + exp(-d/63)(1 - 18/d).
double los_probability_uma(double d2d_m);

// TR 38.901 UMa log-distance pathloss at carrier fc; NLoS takes
// max(PL_LoS, PL'_NLoS). Heights fixed to the 25 m / 1.5 m deployment.
double pathloss_uma_db(double d2d_m, double fc_hz, bool los,
                       double h_bs_m = 25.0, double h_ut_m = 1.5);

struct ClusterParam {
    double aod_az = 0.0;       // global azimuth of departure
    double aod_zen = 0.0;      // zenith of departure
    double aoa_az = 0.0;       // global azimuth of arrival
    double aoa_zen = 0.0;      // zenith of arrival
    double amplitude = 0.0;    // sqrt of cluster power (incl. element gains)
    double phase = 0.0;        // initial phase, radians
    double doppler_rad_s = 0.0;
};

// M_rx x M_tx realization for one (sector, UE panel) link at time t.
struct ChannelRealization {
    Eigen::MatrixXcd h;
    bool los = false;
    double pathloss_db = 0.0;
    std::vector<ClusterParam> clusters;
};

// Per-(UE, sector) channel state. Cluster angle offsets, powers and phases
// are drawn once per drop; angles track the current geometry so the best
// beam drifts as the UE moves. update() re-anchors the geometry and
// advances the cluster phases, keeping the evolution continuous across
// velocity changes.
class LinkChannel {
  public:
    LinkChannel(const NetworkLayout& layout, const SectorDescriptor& sector,
                const ArrayGeometry& tx_geom, const ArrayGeometry& rx_panel_geom,
                const UEState& ue, const ChannelParams& params, std::uint64_t seed);

    // Advance to the UE's current position at time t (monotone t expected).
    void update(const UEState& ue, double t);

    // Cache per-cluster inner products against TX codebook beams and the
    // RX beams of both panels (rx beam j belongs to panel j / beams_per_panel).
    void cache_codebooks(const Codebook& tx, const Codebook& rx_panel,
                         const std::vector<double>& panel_orientations);

    // b_rx^H H b_tx using the cached inner products.
    cdouble coupling(int tx_beam, int rx_beam) const;

    // Full matrix for one panel; used by tests and the matrix-based API.
    Eigen::MatrixXcd matrix(int panel) const;

    bool los() const { return los_; }
    double pathloss_db() const { return pathloss_db_; }
    double shadow_db() const { return shadow_db_; }
    const std::vector<ClusterParam>& clusters() const { return clusters_; }
    int n_rx_beams() const { return static_cast<int>(rx_ip_.rows()); }
    int n_tx_beams() const { return static_cast<int>(tx_ip_.rows()); }

  private:
    void rebuild_cluster_geometry(const Eigen::Vector3d& ue_pos);
    void update_doppler(const UEState& ue);
    void refresh_inner_products();

    const NetworkLayout* layout_;
    SectorDescriptor sector_;
    ArrayGeometry tx_geom_;
    ArrayGeometry rx_geom_;
    ChannelParams params_;
    bool los_ = false;
    double pathloss_db_ = 0.0;
    double shadow_db_ = 0.0;
    double base_loss_db_ = 0.0;          // pathloss + shadowing
    std::uint64_t shadow_seed_ = 0;
    std::uint64_t shadow_step_ = 0;
    Eigen::Vector3d last_pos_{0.0, 0.0, 0.0};
    double last_t_ = 0.0;
    std::vector<double> offset_aod_az_, offset_aod_zen_, offset_aoa_az_, offset_aoa_zen_;
    std::vector<double> power_frac_;
    std::vector<ClusterParam> clusters_;
    // caches: rows = beams, cols = clusters
    const Codebook* tx_codebook_ = nullptr;
    const Codebook* rx_codebook_ = nullptr;
    std::vector<double> panel_orientations_;
    Eigen::MatrixXcd tx_ip_;
    Eigen::MatrixXcd rx_ip_;
    std::vector<Eigen::VectorXcd> rx_steering_;  // per cluster, stacked panels
    std::vector<Eigen::VectorXcd> tx_steering_;
    bool geometry_dirty_ = true;
};

// One-shot realization matching the closed-form construction
// H(t) = sum_c g_c e^{j w_c t} a_rx a_tx^H with E||H||_F^2 normalized to
// M_tx * M_rx * 10^(-PL/10) (isotropic elements). Panel 0 of the UE.
ChannelRealization channel_realization(const NetworkLayout& layout, const SectorDescriptor& sector,
                                       const ArrayGeometry& tx_geom, const ArrayGeometry& ue_panel_geom,
                                       const UEState& ue, double t, const ChannelParams& params,
                                       std::uint64_t seed);

}  // namespace bmsim
