// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator

#include "bmsim/array_codebook.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bmsim {

std::string to_string(ElementPattern p) {
    return p == ElementPattern::isotropic ? "isotropic" : "sectorized-3gpp";
}

ElementPattern element_pattern_from_string(const std::string& s) {
    if (s == "isotropic") return ElementPattern::isotropic;
    if (s == "sectorized-3gpp") return ElementPattern::sectorized_3gpp;
    throw std::invalid_argument("unknown element pattern: " + s);
}

std::string to_string(CodebookKind k) {
    switch (k) {
        case CodebookKind::csirs: return "csirs";
        case CodebookKind::ssb: return "ssb";
        default: return "rx";
    }
}

CodebookKind codebook_kind_from_string(const std::string& s) {
    if (s == "csirs") return CodebookKind::csirs;
    if (s == "ssb") return CodebookKind::ssb;
    if (s == "rx") return CodebookKind::rx;
    throw std::invalid_argument("unknown codebook kind: " + s);
}

void ArrayGeometry::validate() const {
    if (m_h < 1 || m_v < 1) throw std::invalid_argument("array dimensions must be >= 1");
    if (d_h <= 0.0 || d_v <= 0.0) throw std::invalid_argument("element spacing must be > 0");
}

int SetBPattern::size() const {
    if (mode == Mode::subset) return static_cast<int>(indices.size());
    return ssb ? ssb->size() : 0;
}

void SetBPattern::validate(int set_a_size) const {
    if (mode == Mode::subset) {
        if (indices.empty()) throw std::invalid_argument("empty Set B pattern");
        int prev = -1;
        for (int i : indices) {
            if (i <= prev) throw std::invalid_argument("Set B indices must be sorted and unique");
            if (i < 0 || i >= set_a_size) throw std::invalid_argument("Set B index out of range");
            prev = i;
        }
    } else if (!ssb || ssb->size() == 0) {
        throw std::invalid_argument("separate-codebook pattern needs a non-empty SSB codebook");
    }
}

BeamformingVector steering_vector(const ArrayGeometry& geometry, const SteeringAngles& angles) {
    geometry.validate();
    const double ph = 2.0 * M_PI * geometry.d_h * std::sin(angles.phi) * std::cos(angles.theta);
    const double pv = 2.0 * M_PI * geometry.d_v * std::cos(angles.phi);

    Eigen::VectorXcd h(geometry.m_h);
    const double nh = 1.0 / std::sqrt(static_cast<double>(geometry.m_h));
    for (int p = 0; p < geometry.m_h; ++p) h(p) = nh * std::polar(1.0, -ph * p);

    Eigen::VectorXcd v(geometry.m_v);
    const double nv = 1.0 / std::sqrt(static_cast<double>(geometry.m_v));
    for (int q = 0; q < geometry.m_v; ++q) v(q) = nv * std::polar(1.0, -pv * q);

    BeamformingVector out;
    out.angles = angles;
    out.coefficients.resize(geometry.elements());
    for (int p = 0; p < geometry.m_h; ++p)
        for (int q = 0; q < geometry.m_v; ++q) out.coefficients(p * geometry.m_v + q) = h(p) * v(q);
    return out;
}

Codebook build_tx_codebook(const ArrayGeometry& geometry, int n_az, int n_el,
                           const AngleRange& az_span, const AngleRange& el_span,
                           CodebookKind kind) {
    geometry.validate();
    if (n_az < 1 || n_el < 1) throw std::invalid_argument("codebook grid counts must be >= 1");
    if (az_span.length() == 0.0 && n_az > 1)
        throw std::invalid_argument("zero-length azimuth span with more than one beam");
    if (el_span.length() == 0.0 && n_el > 1)
        throw std::invalid_argument("zero-length elevation span with more than one beam");

    Codebook cb;
    cb.geometry = geometry;
    cb.n_az = n_az;
    cb.n_el = n_el;
    cb.kind = kind;
    cb.beams.reserve(static_cast<std::size_t>(n_az) * n_el);
    for (int e = 0; e < n_el; ++e) {
        const double phi = el_span.lo + (e + 0.5) * el_span.length() / n_el;
        for (int a = 0; a < n_az; ++a) {
            const double theta = az_span.lo + (a + 0.5) * az_span.length() / n_az;
            BeamformingVector b = steering_vector(geometry, {theta, phi});
            b.beam_id = e * n_az + a;
            cb.beams.push_back(std::move(b));
        }
    }
    return cb;
}

Codebook build_ssb_codebook(const Codebook& csirs, int group_az, int group_el) {
    if (group_az < 1 || group_el < 1) throw std::invalid_argument("group sizes must be >= 1");
    if (group_az > csirs.n_az || group_el > csirs.n_el)
        throw std::invalid_argument("group size exceeds codebook grid dimension");

    const int g_az = (csirs.n_az + group_az - 1) / group_az;
    const int g_el = (csirs.n_el + group_el - 1) / group_el;

    Codebook ssb;
    ssb.geometry = csirs.geometry;
    ssb.n_az = g_az;
    ssb.n_el = g_el;
    ssb.kind = CodebookKind::ssb;
    ssb.beams.reserve(static_cast<std::size_t>(g_az) * g_el);
    for (int ge = 0; ge < g_el; ++ge) {
        for (int ga = 0; ga < g_az; ++ga) {
            Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(csirs.geometry.elements());
            double theta_acc = 0.0, phi_acc = 0.0;
            int count = 0;
            for (int e = ge * group_el; e < std::min((ge + 1) * group_el, csirs.n_el); ++e) {
                for (int a = ga * group_az; a < std::min((ga + 1) * group_az, csirs.n_az); ++a) {
                    const BeamformingVector& member = csirs.beams[e * csirs.n_az + a];
                    sum += member.coefficients;
                    theta_acc += member.angles.theta;
                    phi_acc += member.angles.phi;
                    ++count;
                }
            }
            BeamformingVector wide;
            wide.coefficients = sum / sum.norm();
            wide.angles = {theta_acc / count, phi_acc / count};
            wide.beam_id = ge * g_az + ga;
            ssb.beams.push_back(std::move(wide));
        }
    }
    return ssb;
}

SetBPattern select_set_b(const Codebook& set_a, int n_b) {
    const int n = set_a.size();
    if (n_b < 1 || n_b > n) throw std::invalid_argument("Set B size out of range");

    int best_a = -1, best_e = -1, best_diff = -1;
    for (int a = 1; a <= n_b; ++a) {
        if (n_b % a != 0) continue;
        const int e = n_b / a;
        if (a > set_a.n_az || e > set_a.n_el) continue;
        if (set_a.n_az % a != 0 || set_a.n_el % e != 0) continue;
        const int stride_az = set_a.n_az / a;
        const int stride_el = set_a.n_el / e;
        const int diff = std::abs(stride_az - stride_el);
        if (best_diff < 0 || diff < best_diff || (diff == best_diff && e > best_e)) {
            best_a = a;
            best_e = e;
            best_diff = diff;
        }
    }
    if (best_a < 0) throw std::invalid_argument("Set B size does not divide the Set A grid");

    const int stride_az = set_a.n_az / best_a;
    const int stride_el = set_a.n_el / best_e;
    SetBPattern pattern;
    pattern.mode = SetBPattern::Mode::subset;
    for (int e = 0; e < best_e; ++e)
        for (int a = 0; a < best_a; ++a)
            pattern.indices.push_back(e * stride_el * set_a.n_az + a * stride_az);
    std::sort(pattern.indices.begin(), pattern.indices.end());
    return pattern;
}

double element_gain_db(ElementPattern pattern, double azimuth_off, double phi) {
    if (pattern == ElementPattern::isotropic) return 0.0;
    constexpr double kMaxGainDb = 8.0;
    constexpr double kHpbwRad = 65.0 * M_PI / 180.0;
    constexpr double kFrontBackDb = 30.0;
    const double az = std::remainder(azimuth_off, 2.0 * M_PI);
    const double a_h = -std::min(12.0 * (az / kHpbwRad) * (az / kHpbwRad), kFrontBackDb);
    const double dv = phi - M_PI / 2.0;
    const double a_v = -std::min(12.0 * (dv / kHpbwRad) * (dv / kHpbwRad), kFrontBackDb);
    return kMaxGainDb - std::min(-(a_h + a_v), kFrontBackDb);
}

nlohmann::json codebook_to_json(const Codebook& cb) {
    nlohmann::json j;
    j["geometry"] = {{"m_h", cb.geometry.m_h},
                     {"m_v", cb.geometry.m_v},
                     {"d_h", cb.geometry.d_h},
                     {"d_v", cb.geometry.d_v},
                     {"element_pattern", to_string(cb.geometry.element_pattern)}};
    j["kind"] = to_string(cb.kind);
    j["n_az"] = cb.n_az;
    j["n_el"] = cb.n_el;
    auto& beams = j["beams"] = nlohmann::json::array();
    for (const auto& b : cb.beams) {
        nlohmann::json jb;
        jb["beam_id"] = b.beam_id;
        jb["theta_rad"] = b.angles.theta;
        jb["phi_rad"] = b.angles.phi;
        auto& coeffs = jb["coeffs"] = nlohmann::json::array();
        for (int i = 0; i < b.coefficients.size(); ++i)
            coeffs.push_back({b.coefficients(i).real(), b.coefficients(i).imag()});
        beams.push_back(std::move(jb));
    }
    return j;
}

Codebook codebook_from_json(const nlohmann::json& j) {
    Codebook cb;
    const auto& g = j.at("geometry");
    cb.geometry.m_h = g.at("m_h").get<int>();
    cb.geometry.m_v = g.at("m_v").get<int>();
    cb.geometry.d_h = g.at("d_h").get<double>();
    cb.geometry.d_v = g.at("d_v").get<double>();
    cb.geometry.element_pattern = element_pattern_from_string(g.at("element_pattern").get<std::string>());
    cb.kind = codebook_kind_from_string(j.at("kind").get<std::string>());
    cb.n_az = j.at("n_az").get<int>();
    cb.n_el = j.at("n_el").get<int>();
    for (const auto& jb : j.at("beams")) {
        BeamformingVector b;
        b.beam_id = jb.at("beam_id").get<int>();
        b.angles.theta = jb.at("theta_rad").get<double>();
        b.angles.phi = jb.at("phi_rad").get<double>();
        const auto& coeffs = jb.at("coeffs");
        b.coefficients.resize(static_cast<Eigen::Index>(coeffs.size()));
        for (Eigen::Index i = 0; i < b.coefficients.size(); ++i)
            b.coefficients(i) = cdouble(coeffs[i][0].get<double>(), coeffs[i][1].get<double>());
        cb.beams.push_back(std::move(b));
    }
    return cb;
}

}  // namespace bmsim
