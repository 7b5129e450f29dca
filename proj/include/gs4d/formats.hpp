#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gs4d/constellation.hpp"

namespace gs4d {

/// Two-parameter description of the 4D-64PRS family.
///
/// The outer ring R1 carries the points (nu1, nu3) and (nu3, nu1), placed
/// `theta_deg` either side of the quadrant diagonal; the inner ring R2 = r * R1
/// carries (nu2, nu2). Both rings appear in every symbol, one per polarization,
/// so the 4D energy is R1^2 + R2^2 for every point.
struct PrsParams {
    double r = 0.54;
    double theta_deg = 25.5;
    double es = 2.0;

    /// Throws a validation error unless 0 < r <= 1, 0 < theta < 45, es > 0.
    void validate() const;

    /// Radii and coordinates for mean energy `es`.
    double outer_radius() const;
    double inner_radius() const { return r * outer_radius(); }
    double nu1() const;
    double nu2() const;
    double nu3() const;

    /// Points sit (numerically) on the axes: nu1 is below 1e-6 of R1.
    bool degenerate() const;
};

LabeledConstellation prs_from_params(const PrsParams& p);

/// Recovers (r, theta, es) from any member of the PRS family.
/// Throws a validation error when the constellation is not of that shape.
PrsParams prs_params_from(const LabeledConstellation& c);

/// The published 4D-64PRS coordinates verbatim, with nu = (0.87, 1, 2.47); not normalized.
LabeledConstellation table1_reference();

/// Row-major 4D product of a 2D base format (polarization 1 selects the row),
/// label = (label1 << bits) | label2, normalized to es.
struct Format2d {
    std::vector<std::array<double, 2>> points;
    std::vector<Label> labels;
};

LabeledConstellation pm_product(const Format2d& base, double es = 2.0);

/// Circular 8QAM (inner square, outer cross on the axes, all nearest
/// neighbours equidistant) with its GMI-best labeling.
Format2d circular_8qam();
Format2d gray_8psk();
Format2d gray_16qam();
Format2d gray_qpsk();

LabeledConstellation pm8qam();
LabeledConstellation pm8psk();
LabeledConstellation pm16qam();

/// 4D-2A8PSK: 8PSK in each polarization with complementary amplitudes.
/// The ring of polarization 1 is outer when the two phase indices have even
/// sum and inner otherwise; polarization 2 takes the other ring. Labels are
/// [Gray(k1), Gray(k2)]; `ring_ratio` is inner / outer radius. Normalized to es = 2.
LabeledConstellation reconstruct_2a8psk(double ring_ratio = 0.65);

/// 4D-64SP-12QAM geometry: pairs of 12QAM points (16QAM without corners)
/// from the same set-partition class, without inner-inner pairs.
/// Labels: Gray quadrant bits [b1 b2] / [b4 b5] and two intra-quadrant bits.
LabeledConstellation reconstruct_sp12qam();

/// Result of comparing a reconstruction against its published fingerprint.
struct FingerprintCheck {
    bool msed_match = false;  // MSED and pair count
    bool hd1_match = false;   // HD-1 (d2, n) groups
    std::string detail;
};

/// Compares against MSED 1 with 272 pairs and HD-1 groups (1,128), (2,32), (5,32).
FingerprintCheck sp12qam_fingerprint(const LabeledConstellation& c);

/// Built-in names: prs64, table1, pm8qam, pm8psk, pm16qam, 2a8psk, sp12qam.
/// `prs64` uses the default PrsParams. Everything except `table1` is
/// returned normalized to es = 2; `table1` is normalized too (callers can
/// use table1_reference() for the raw values).
std::optional<LabeledConstellation> builtin_format(std::string_view name);
std::vector<std::string> builtin_format_names();

}  // namespace gs4d
