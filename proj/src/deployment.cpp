// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator

#include "bmsim/deployment.hpp"

#include <cmath>
#include <stdexcept>

#include "bmsim/rng.hpp"

namespace bmsim {

namespace {

double wrap_pm_pi(double a) { return std::remainder(a, 2.0 * M_PI); }

// Hex grid rings around the origin. Ring 1 sits at distance isd, ring 2
// alternates corner (2*isd) and edge (sqrt(3)*isd) sites.
std::vector<Eigen::Vector2d> hex_sites(int n_sites, double isd) {
    std::vector<Eigen::Vector2d> sites;
    sites.emplace_back(0.0, 0.0);
    if (n_sites == 1) return sites;
    for (int k = 0; k < 6; ++k) {
        const double a = k * M_PI / 3.0;
        sites.emplace_back(isd * std::cos(a), isd * std::sin(a));
    }
    if (n_sites == 7) return sites;
    for (int k = 0; k < 6; ++k) {
        const double a = k * M_PI / 3.0;
        sites.emplace_back(2.0 * isd * std::cos(a), 2.0 * isd * std::sin(a));
    }
    for (int k = 0; k < 6; ++k) {
        const double a = k * M_PI / 3.0 + M_PI / 6.0;
        sites.emplace_back(std::sqrt(3.0) * isd * std::cos(a), std::sqrt(3.0) * isd * std::sin(a));
    }
    return sites;
}

}  // namespace

NetworkLayout build_layout(const LayoutConfig& config) {
    if (config.n_sites != 1 && config.n_sites != 7 && config.n_sites != 19)
        throw std::invalid_argument("site count must be 1, 7 or 19");
    if (config.sectors_per_site != 1 && config.sectors_per_site != 3)
        throw std::invalid_argument("sectors per site must be 1 or 3");
    if (config.isd_m <= 0.0) throw std::invalid_argument("ISD must be > 0");

    NetworkLayout layout;
    layout.config = config;
    layout.site_positions = hex_sites(config.n_sites, config.isd_m);

    int sector_id = 0;
    for (int s = 0; s < config.n_sites; ++s) {
        for (int k = 0; k < config.sectors_per_site; ++k) {
            SectorDescriptor sec;
            sec.sector_id = sector_id++;
            sec.site_id = s;
            sec.site_pos = layout.site_positions[s];
            sec.boresight_az = (config.sectors_per_site == 1) ? 0.0 : k * 2.0 * M_PI / 3.0;
            layout.sectors.push_back(sec);
        }
    }

    layout.wrap_offsets.emplace_back(0.0, 0.0);
    if (config.wrap_around && config.n_sites > 1) {
        // Cluster translation vector: i*u + j*v with (i,j) = (2,1) for 7
        // sites and (3,2) for 19, |D| = sqrt(n_sites)*isd.
        const Eigen::Vector2d u(config.isd_m, 0.0);
        const Eigen::Vector2d v(config.isd_m * 0.5, config.isd_m * std::sqrt(3.0) / 2.0);
        const Eigen::Vector2d base = (config.n_sites == 7) ? (2.0 * u + v).eval() : (3.0 * u + 2.0 * v).eval();
        for (int k = 0; k < 6; ++k) {
            const double a = k * M_PI / 3.0;
            const Eigen::Rotation2Dd rot(a);
            layout.wrap_offsets.push_back(rot * base);
        }
    }

    double max_site = 0.0;
    for (const auto& p : layout.site_positions) max_site = std::max(max_site, p.norm());
    layout.bound_radius_m = max_site + config.isd_m / std::sqrt(3.0);
    return layout;
}

std::vector<UEState> drop_ues(const NetworkLayout& layout, int n_per_sector,
                              double speed_mps, std::uint64_t seed) {
    if (n_per_sector < 1) throw std::invalid_argument("at least one UE per sector");
    const double cell_radius = layout.config.isd_m / std::sqrt(3.0);
    const double wedge = (layout.config.sectors_per_site == 1) ? 2.0 * M_PI : 2.0 * M_PI / 3.0;

    std::vector<UEState> ues;
    int ue_id = 0;
    for (const auto& sec : layout.sectors) {
        Rng rng(hash_combine(hash_tag(seed, "drop"), static_cast<std::uint64_t>(sec.sector_id)));
        for (int n = 0; n < n_per_sector; ++n) {
            // Uniform in the sector wedge by area; rejected below min distance.
            double r, az;
            do {
                r = cell_radius * std::sqrt(rng.uniform());
            } while (r < layout.config.min_drop_distance_m);
            az = sec.boresight_az + rng.uniform(-wedge / 2.0, wedge / 2.0);

            UEState ue;
            ue.ue_id = ue_id++;
            ue.position = Eigen::Vector3d(sec.site_pos.x() + r * std::cos(az),
                                          sec.site_pos.y() + r * std::sin(az), 1.5);
            ue.heading = rng.uniform(0.0, 2.0 * M_PI);
            ue.velocity = speed_mps * Eigen::Vector2d(std::cos(ue.heading), std::sin(ue.heading));
            ue.panel_orientations = {wrap_pm_pi(ue.heading + M_PI / 2.0),
                                     wrap_pm_pi(ue.heading - M_PI / 2.0)};
            ue.serving_sector = sec.sector_id;
            ue.rng_seed = hash_combine(hash_tag(seed, "ue"), static_cast<std::uint64_t>(ue.ue_id));
            ues.push_back(std::move(ue));
        }
    }
    return ues;
}

UEState step_mobility(const UEState& ue, double dt, const NetworkLayout& layout) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");
    UEState next = ue;
    const double speed = ue.velocity.norm();
    if (speed == 0.0) return next;

    Eigen::Vector2d pos = ue.position.head<2>() + ue.velocity * dt;
    if (pos.norm() > layout.bound_radius_m) {
        // Redraw an inward-pointing direction; the move is retaken from the
        // old position so the displacement magnitude stays speed*dt.
        Rng rng(hash_combine(ue.rng_seed, ue.mobility_draws));
        ++next.mobility_draws;
        const Eigen::Vector2d from = ue.position.head<2>();
        Eigen::Vector2d dir;
        do {
            const double a = rng.uniform(0.0, 2.0 * M_PI);
            dir = Eigen::Vector2d(std::cos(a), std::sin(a));
        } while (dir.dot(-from) <= 0.0);
        next.velocity = speed * dir;
        pos = from + next.velocity * dt;
    }
    next.position.head<2>() = pos;
    return next;
}

Eigen::Vector2d wrapped_offset(const NetworkLayout& layout, const Eigen::Vector2d& from,
                               const Eigen::Vector2d& to) {
    Eigen::Vector2d best = to - from;
    double best_norm = best.norm();
    for (const auto& off : layout.wrap_offsets) {
        const Eigen::Vector2d cand = to + off - from;
        if (cand.norm() < best_norm) {
            best = cand;
            best_norm = cand.norm();
        }
    }
    return best;
}

double distance_2d(const NetworkLayout& layout, const SectorDescriptor& sector,
                   const Eigen::Vector3d& ue_pos) {
    return wrapped_offset(layout, sector.site_pos, ue_pos.head<2>()).norm();
}

nlohmann::json layout_to_json(const NetworkLayout& layout) {
    nlohmann::json j;
    j["n_sites"] = layout.config.n_sites;
    j["isd_m"] = layout.config.isd_m;
    auto& sites = j["sites"] = nlohmann::json::array();
    for (const auto& p : layout.site_positions) sites.push_back({p.x(), p.y()});
    auto& sectors = j["sectors"] = nlohmann::json::array();
    for (const auto& s : layout.sectors)
        sectors.push_back({{"sector_id", s.sector_id},
                           {"site_id", s.site_id},
                           {"boresight_az", s.boresight_az}});
    return j;
}

nlohmann::json ues_to_json(const std::vector<UEState>& ues) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& ue : ues)
        j.push_back({{"ue_id", ue.ue_id},
                     {"x", ue.position.x()},
                     {"y", ue.position.y()},
                     {"vx", ue.velocity.x()},
                     {"vy", ue.velocity.y()},
                     {"serving_sector", ue.serving_sector}});
    return j;
}

}  // namespace bmsim
