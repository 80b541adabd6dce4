// SPDX-License-Identifier: Apache-2.0
//
// bmsim: system-level mmWave beam management simulator
//
// Uniform planar array steering vectors, DFT-style TX/RX beam codebooks,
// wide-beam (SSB) codebook synthesis and Set B selection patterns.

#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace bmsim {

using cdouble = std::complex<double>;

enum class ElementPattern { isotropic, sectorized_3gpp };

std::string to_string(ElementPattern p);
ElementPattern element_pattern_from_string(const std::string& s);

// UPA dimensions. m_h horizontal elements, m_v vertical; spacing in
// wavelengths. element_pattern selects the per-element gain applied when
// synthesizing channel clusters.
struct ArrayGeometry {
    int m_h = 1;
    int m_v = 1;
    double d_h = 0.5;
    double d_v = 0.5;
    ElementPattern element_pattern = ElementPattern::isotropic;

    int elements() const { return m_h * m_v; }
    void validate() const;
};

// theta: azimuth in the steering-phase convention (the horizontal phase term
// is proportional to sin(phi)*cos(theta), so the array axis sits at theta=0
// and a sector boresight maps to theta=pi/2). phi: zenith angle, 0 = up.
struct SteeringAngles {
    double theta = M_PI / 2.0;
    double phi = M_PI / 2.0;
};

// Maps a boresight-relative azimuth offset to the steering convention above.
inline double local_azimuth(double offset) { return M_PI / 2.0 + offset; }

struct BeamformingVector {
    Eigen::VectorXcd coefficients;
    SteeringAngles angles;
    int beam_id = 0;
};

enum class CodebookKind { csirs, ssb, rx };

std::string to_string(CodebookKind k);
CodebookKind codebook_kind_from_string(const std::string& s);

struct AngleRange {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    double center() const { return 0.5 * (lo + hi); }
};

// Ordered beam grid. Beam i points at azimuth index (i mod n_az) and
// elevation index (i div n_az): azimuth varies fastest.
struct Codebook {
    ArrayGeometry geometry;
    std::vector<BeamformingVector> beams;
    int n_az = 0;
    int n_el = 0;
    CodebookKind kind = CodebookKind::csirs;

    int size() const { return static_cast<int>(beams.size()); }
    int az_index(int beam_id) const { return beam_id % n_az; }
    int el_index(int beam_id) const { return beam_id / n_az; }
};

// Which Set A beams form Set B. Subset mode lists Set A indices; separate
// mode references an SSB codebook measured instead of Set A.
struct SetBPattern {
    enum class Mode { subset, separate_codebook };
    Mode mode = Mode::subset;
    std::vector<int> indices;                 // subset mode, sorted ascending
    std::shared_ptr<const Codebook> ssb;      // separate mode

    int size() const;
    void validate(int set_a_size) const;
};

// Eq.-style UPA steering vector: Kronecker product of the horizontal factor
// (phase term sin(phi)cos(theta)) and the vertical factor (phase term
// cos(phi)), each 1/sqrt(M)-normalized. Entry (p*m_v + q) = h_p * v_q.
BeamformingVector steering_vector(const ArrayGeometry& geometry, const SteeringAngles& angles);

// Uniform angular grid over the spans, sampled at bin centers; azimuth index
// varies fastest. Throws std::invalid_argument on degenerate spans with more
// than one beam requested.
Codebook build_tx_codebook(const ArrayGeometry& geometry, int n_az, int n_el,
                           const AngleRange& az_span, const AngleRange& el_span,
                           CodebookKind kind = CodebookKind::csirs);

// Wide beams from normalized sums of group_az x group_el blocks of adjacent
// CSI-RS beams; a ragged final block absorbs the remainder.
Codebook build_ssb_codebook(const Codebook& csirs, int group_az, int group_el);

// Deterministic evenly strided subset of Set A covering both angular axes.
// The Set B grid (a x e) with a*e = n_b divides the Set A grid; among valid
// splits the one minimizing |stride_az - stride_el| wins, ties resolved
// toward more elevation rows.
SetBPattern select_set_b(const Codebook& set_a, int n_b);

// 3GPP sectorized element gain in dB (8 dBi peak, 65 deg HPBW, 30 dB
// front-to-back); azimuth_off is relative to the element boresight, phi is
// zenith. Isotropic returns 0.
double element_gain_db(ElementPattern pattern, double azimuth_off, double phi);

nlohmann::json codebook_to_json(const Codebook& cb);
Codebook codebook_from_json(const nlohmann::json& j);

}  // namespace bmsim
