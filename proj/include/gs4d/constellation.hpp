#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gs4d {

/// One 4D symbol: (I1, Q1, I2, Q2), i.e. in-phase/quadrature of polarization 1 then 2.
using Point4 = std::array<double, 4>;
using Label = std::uint32_t;

double squared_norm(const Point4& p);
double squared_distance(const Point4& a, const Point4& b);
int hamming_distance(Label a, Label b);

/// M points in R^4 with a bijective m-bit labeling, M = 2^m.
///
/// Label bit k (k = 0 is b1) is the most significant of the m bits, so the
/// label 0b010000 for m = 6 has b2 = 1. Construction validates every
/// invariant; a live object is always consistent.
class LabeledConstellation {
public:
    LabeledConstellation(std::vector<Point4> points, std::vector<Label> labels);

    std::size_t size() const { return points_.size(); }
    int bits() const { return bits_; }

    std::span<const Point4> points() const { return points_; }
    std::span<const Label> labels() const { return labels_; }
    const Point4& point(std::size_t i) const { return points_[i]; }
    Label label(std::size_t i) const { return labels_[i]; }

    /// Bit b_{k+1} of the label of point i.
    int bit(std::size_t i, int k) const { return static_cast<int>((labels_[i] >> (bits_ - 1 - k)) & 1U); }

    double mean_energy() const;

    LabeledConstellation with_points(std::vector<Point4> points) const;
    LabeledConstellation with_labels(std::vector<Label> labels) const;

    friend bool operator==(const LabeledConstellation&, const LabeledConstellation&) = default;

private:
    std::vector<Point4> points_;
    std::vector<Label> labels_;
    int bits_ = 0;
};

/// Uniformly rescales `c` so the mean symbol energy equals `es`.
LabeledConstellation normalize(const LabeledConstellation& c, double es);

bool is_constant_modulus(const LabeledConstellation& c, double tol);

/// Standardized moment of the per-polarization complex symbol, both
/// polarizations pooled, after removing the mean: E|x|^p / (E|x|^2)^(p/2).
double standardized_moment(const LabeledConstellation& c, int p);

struct MomentSet {
    double mu4 = 0.0;
    double mu6 = 0.0;
};

MomentSet moments(const LabeledConstellation& c);

struct SpectrumEntry {
    double d2 = 0.0;
    std::size_t count = 0;
    std::size_t hd1_count = 0;
};

/// Squared Euclidean distances over all unordered point pairs, grouped into
/// buckets, each split by whether the two labels differ in exactly one bit.
struct DistanceSpectrum {
    std::vector<SpectrumEntry> entries;

    const SpectrumEntry& msed() const { return entries.front(); }
    std::size_t total_pairs() const;
};

/// Buckets whose distances differ by at most 1e-9 * mean energy are merged.
DistanceSpectrum distance_spectrum(const LabeledConstellation& c);

/// True iff every pair at the minimum squared distance differs in one label bit.
bool gray_check(const LabeledConstellation& c);

/// Where orthant_expand puts the bits of a label: `sign_bit[d]` is the bit
/// index (0 = b1) carrying the sign of coordinate d (1 means negative), and
/// `intra_bits` lists, most significant first, the bit indices that carry
/// the generator label.
struct OrthantBitMap {
    std::array<int, 4> sign_bit{};
    std::vector<int> intra_bits;

    int bits() const { return 4 + static_cast<int>(intra_bits.size()); }
};

/// The 4D-64PRS assignment: [b1 b2] are the quadrant of polarization 1
/// (b2 from the sign of I1, b1 from Q1), [b4 b5] likewise for polarization 2,
/// and [b3 b6] select the generator within the orthant.
OrthantBitMap prs_orthant_bit_map();

/// Applies the 16 sign patterns to each generator. Every generator coordinate
/// must be strictly positive and the generator count must be 2^|intra_bits|.
LabeledConstellation orthant_expand(std::span<const Point4> generators, std::span<const Label> generator_labels,
                                    const OrthantBitMap& map);

/// Inverse of orthant_expand for an orthant-symmetric constellation: the
/// points in the open positive orthant and their intra-orthant labels.
/// Throws a validation error when `c` is not the expansion of those
/// generators under `map`.
struct OrthantGenerators {
    std::vector<Point4> points;
    std::vector<Label> labels;
};

OrthantGenerators orthant_generators(const LabeledConstellation& c, const OrthantBitMap& map);

struct ProjectedPoint {
    std::array<double, 2> xy{};
    std::size_t multiplicity = 0;
};

/// Distinct 2D points of polarization 1 or 2, sorted lexicographically.
std::vector<ProjectedPoint> project_2d(const LabeledConstellation& c, int polarization);

}  // namespace gs4d
