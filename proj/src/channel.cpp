// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator

#include "bmsim/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "bmsim/rng.hpp"

namespace bmsim {

namespace {
constexpr double kSpeedOfLight = 299792458.0;

double wrap_pm_pi(double a) { return std::remainder(a, 2.0 * M_PI); }
double deg2rad(double d) { return d * M_PI / 180.0; }
}  // namespace

double los_probability_uma(double d2d_m) {
    if (d2d_m <= 18.0) return 1.0;
    return 18.0 / d2d_m + std::exp(-d2d_m / 63.0) * (1.0 - 18.0 / d2d_m);
}

double pathloss_uma_db(double d2d_m, double fc_hz, bool los, double h_bs_m, double h_ut_m) {
    const double d2d = std::max(d2d_m, 10.0);
    const double dh = h_bs_m - h_ut_m;
    const double d3d = std::sqrt(d2d * d2d + dh * dh);
    const double fc_ghz = fc_hz / 1e9;
    // Breakpoint distance with 1 m effective environment height.
    const double d_bp = 4.0 * (h_bs_m - 1.0) * (h_ut_m - 1.0) * fc_hz / kSpeedOfLight;
    double pl_los;
    if (d2d <= d_bp) {
        pl_los = 28.0 + 22.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
    } else {
        pl_los = 28.0 + 40.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) -
                 9.0 * std::log10(d_bp * d_bp + dh * dh);
    }
    if (los) return pl_los;
    const double pl_nlos = 13.54 + 39.08 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) -
                           0.6 * (h_ut_m - 1.5);
    return std::max(pl_los, pl_nlos);
}

LinkChannel::LinkChannel(const NetworkLayout& layout, const SectorDescriptor& sector,
                         const ArrayGeometry& tx_geom, const ArrayGeometry& rx_panel_geom,
                         const UEState& ue, const ChannelParams& params, std::uint64_t seed)
    : layout_(&layout), sector_(sector), tx_geom_(tx_geom), rx_geom_(rx_panel_geom),
      params_(params) {
    tx_geom_.validate();
    rx_geom_.validate();
    if (params_.n_clusters < 1) throw std::invalid_argument("need at least one cluster");

    Rng rng(hash_tag(seed, "link"));
    const double d2d = distance_2d(layout, sector, ue.position);
    los_ = rng.uniform() < los_probability_uma(d2d);

    shadow_seed_ = hash_tag(seed, "shadow");
    const double sigma = los_ ? params_.shadow_sigma_los_db : params_.shadow_sigma_nlos_db;
    shadow_db_ = sigma * Rng(shadow_seed_).normal();

    const int nc = params_.n_clusters;
    offset_aod_az_.resize(nc);
    offset_aod_zen_.resize(nc);
    offset_aoa_az_.resize(nc);
    offset_aoa_zen_.resize(nc);
    power_frac_.resize(nc);
    clusters_.resize(nc);
    const double spread = deg2rad(los_ ? params_.spread_los_deg : params_.spread_nlos_deg);
    const double k_lin = std::pow(10.0, params_.k_factor_db / 10.0);
    for (int c = 0; c < nc; ++c) {
        const bool dominant = los_ && c == 0;
        offset_aod_az_[c] = dominant ? 0.0 : rng.laplace(0.0, spread);
        offset_aod_zen_[c] = dominant ? 0.0 : rng.laplace(0.0, spread);
        offset_aoa_az_[c] = dominant ? 0.0 : rng.laplace(0.0, spread);
        offset_aoa_zen_[c] = dominant ? 0.0 : rng.laplace(0.0, spread);
        clusters_[c].phase = rng.uniform(0.0, 2.0 * M_PI);
        if (los_ && nc > 1) {
            power_frac_[c] = (c == 0) ? k_lin / (k_lin + 1.0)
                                      : 1.0 / ((k_lin + 1.0) * (nc - 1));
        } else {
            power_frac_[c] = 1.0 / nc;
        }
    }
    last_pos_ = ue.position;
    last_t_ = 0.0;
    rebuild_cluster_geometry(ue.position);
    update_doppler(ue);
}

void LinkChannel::update(const UEState& ue, double t) {
    const double dt = t - last_t_;
    for (auto& c : clusters_) c.phase += c.doppler_rad_s * dt;

    const double dd = (ue.position.head<2>() - last_pos_.head<2>()).norm();
    if (dd > 0.0) {
        const double rho = std::exp(-dd / params_.shadow_decorr_m);
        const double sigma = los_ ? params_.shadow_sigma_los_db : params_.shadow_sigma_nlos_db;
        Rng rng(hash_combine(shadow_seed_, ++shadow_step_));
        shadow_db_ = rho * shadow_db_ + std::sqrt(1.0 - rho * rho) * sigma * rng.normal();
    }

    rebuild_cluster_geometry(ue.position);
    update_doppler(ue);
    if (tx_codebook_ != nullptr) refresh_inner_products();
    last_pos_ = ue.position;
    last_t_ = t;
}

void LinkChannel::rebuild_cluster_geometry(const Eigen::Vector3d& ue_pos) {
    const Eigen::Vector2d off = wrapped_offset(*layout_, sector_.site_pos, ue_pos.head<2>());
    const double d2d = std::max(off.norm(), 1.0);
    const double dh = layout_->config.gnb_height_m - ue_pos.z();
    const double geo_az = std::atan2(off.y(), off.x());
    const double depression = std::atan2(dh, d2d);
    pathloss_db_ = pathloss_uma_db(d2d, layout_->config.carrier_hz, los_,
                                   layout_->config.gnb_height_m, ue_pos.z());
    base_loss_db_ = pathloss_db_ + shadow_db_;
    const double p_total = tx_geom_.elements() * rx_geom_.elements() *
                           std::pow(10.0, -base_loss_db_ / 10.0);

    for (int c = 0; c < params_.n_clusters; ++c) {
        auto& cl = clusters_[c];
        cl.aod_az = geo_az + offset_aod_az_[c];
        cl.aod_zen = M_PI / 2.0 + depression + offset_aod_zen_[c];
        cl.aoa_az = wrap_pm_pi(geo_az + M_PI) + offset_aoa_az_[c];
        cl.aoa_zen = M_PI / 2.0 - depression + offset_aoa_zen_[c];
        cl.amplitude = std::sqrt(p_total * power_frac_[c]);
    }
    geometry_dirty_ = true;
}

void LinkChannel::update_doppler(const UEState& ue) {
    const double lambda = kSpeedOfLight / layout_->config.carrier_hz;
    for (auto& cl : clusters_) {
        const Eigen::Vector2d arrival(std::cos(cl.aoa_az), std::sin(cl.aoa_az));
        // Horizontal velocity projected on the arrival direction, scaled by
        // the zenith inclination of the incoming ray.
        const double radial = ue.velocity.dot(arrival) * std::sin(cl.aoa_zen);
        cl.doppler_rad_s = 2.0 * M_PI * radial / lambda;
    }
}

void LinkChannel::cache_codebooks(const Codebook& tx, const Codebook& rx_panel,
                                  const std::vector<double>& panel_orientations) {
    tx_codebook_ = &tx;
    rx_codebook_ = &rx_panel;
    panel_orientations_ = panel_orientations;
    refresh_inner_products();
}

void LinkChannel::refresh_inner_products() {
    const int nc = params_.n_clusters;
    const int n_panels = static_cast<int>(panel_orientations_.size());
    const int n_tx = tx_codebook_->size();
    const int n_rx_per_panel = rx_codebook_->size();
    tx_ip_.resize(n_tx, nc);
    rx_ip_.resize(n_rx_per_panel * n_panels, nc);
    tx_steering_.resize(nc);
    rx_steering_.resize(nc);

    for (int c = 0; c < nc; ++c) {
        const auto& cl = clusters_[c];
        // TX steering in sector-local coordinates, scaled by element gain.
        const double tx_off = wrap_pm_pi(cl.aod_az - sector_.boresight_az);
        Eigen::VectorXcd a_tx =
            steering_vector(tx_geom_, {local_azimuth(tx_off), cl.aod_zen}).coefficients;
        a_tx *= std::pow(10.0, element_gain_db(tx_geom_.element_pattern, tx_off, cl.aod_zen) / 20.0);
        tx_steering_[c] = a_tx;
        for (int i = 0; i < n_tx; ++i)
            tx_ip_(i, c) = std::conj(tx_codebook_->beams[i].coefficients.dot(a_tx));

        Eigen::VectorXcd a_rx_all(n_panels * rx_geom_.elements());
        for (int p = 0; p < n_panels; ++p) {
            const double rx_off = wrap_pm_pi(cl.aoa_az - panel_orientations_[p]);
            Eigen::VectorXcd a_rx =
                steering_vector(rx_geom_, {local_azimuth(rx_off), cl.aoa_zen}).coefficients;
            a_rx *= std::pow(10.0,
                             element_gain_db(rx_geom_.element_pattern, rx_off, cl.aoa_zen) / 20.0);
            a_rx_all.segment(p * rx_geom_.elements(), rx_geom_.elements()) = a_rx;
            for (int j = 0; j < n_rx_per_panel; ++j)
                rx_ip_(p * n_rx_per_panel + j, c) = rx_codebook_->beams[j].coefficients.dot(a_rx);
        }
        rx_steering_[c] = a_rx_all;
    }
    geometry_dirty_ = false;
}

cdouble LinkChannel::coupling(int tx_beam, int rx_beam) const {
    if (tx_codebook_ == nullptr) throw std::logic_error("codebooks not cached");
    cdouble acc(0.0, 0.0);
    for (int c = 0; c < params_.n_clusters; ++c) {
        const auto& cl = clusters_[c];
        acc += cl.amplitude * std::polar(1.0, cl.phase) * rx_ip_(rx_beam, c) * tx_ip_(tx_beam, c);
    }
    return acc;
}

Eigen::MatrixXcd LinkChannel::matrix(int panel) const {
    const int m_rx = rx_geom_.elements();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m_rx, tx_geom_.elements());
    for (int c = 0; c < params_.n_clusters; ++c) {
        const auto& cl = clusters_[c];
        Eigen::VectorXcd a_rx;
        Eigen::VectorXcd a_tx;
        if (!rx_steering_.empty() && !geometry_dirty_) {
            a_rx = rx_steering_[c].segment(panel * m_rx, m_rx);
            a_tx = tx_steering_[c];
        } else {
            const double tx_off = wrap_pm_pi(cl.aod_az - sector_.boresight_az);
            a_tx = steering_vector(tx_geom_, {local_azimuth(tx_off), cl.aod_zen}).coefficients;
            a_tx *= std::pow(10.0,
                             element_gain_db(tx_geom_.element_pattern, tx_off, cl.aod_zen) / 20.0);
            const double orient = panel_orientations_.empty() ? 0.0 : panel_orientations_[panel];
            const double rx_off = wrap_pm_pi(cl.aoa_az - orient);
            a_rx = steering_vector(rx_geom_, {local_azimuth(rx_off), cl.aoa_zen}).coefficients;
            a_rx *= std::pow(10.0,
                             element_gain_db(rx_geom_.element_pattern, rx_off, cl.aoa_zen) / 20.0);
        }
        h += cl.amplitude * std::polar(1.0, cl.phase) * a_rx * a_tx.adjoint();
    }
    return h;
}

ChannelRealization channel_realization(const NetworkLayout& layout, const SectorDescriptor& sector,
                                       const ArrayGeometry& tx_geom, const ArrayGeometry& ue_panel_geom,
                                       const UEState& ue, double t, const ChannelParams& params,
                                       std::uint64_t seed) {
    LinkChannel link(layout, sector, tx_geom, ue_panel_geom, ue, params, seed);
    UEState fixed = ue;
    link.update(fixed, t);

    ChannelRealization out;
    out.los = link.los();
    out.pathloss_db = link.pathloss_db();
    out.clusters = link.clusters();
    const double orient = ue.panel_orientations.empty() ? 0.0 : ue.panel_orientations[0];
    // Build the panel-0 matrix directly from cluster parameters.
    const int m_rx = ue_panel_geom.elements();
    out.h = Eigen::MatrixXcd::Zero(m_rx, tx_geom.elements());
    for (const auto& cl : link.clusters()) {
        const double tx_off = wrap_pm_pi(cl.aod_az - sector.boresight_az);
        Eigen::VectorXcd a_tx =
            steering_vector(tx_geom, {local_azimuth(tx_off), cl.aod_zen}).coefficients;
        a_tx *= std::pow(10.0, element_gain_db(tx_geom.element_pattern, tx_off, cl.aod_zen) / 20.0);
        const double rx_off = wrap_pm_pi(cl.aoa_az - orient);
        Eigen::VectorXcd a_rx =
            steering_vector(ue_panel_geom, {local_azimuth(rx_off), cl.aoa_zen}).coefficients;
        a_rx *= std::pow(10.0,
                         element_gain_db(ue_panel_geom.element_pattern, rx_off, cl.aoa_zen) / 20.0);
        out.h += cl.amplitude * std::polar(1.0, cl.phase) * a_rx * a_tx.adjoint();
    }
    return out;
}

}  // namespace bmsim
