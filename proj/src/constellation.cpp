#include "gs4d/constellation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include "gs4d/error.hpp"

namespace gs4d {

namespace {

constexpr double kDuplicateTol = 1e-20;  // relative to mean energy, on d^2
constexpr double kBucketTol = 1e-9;      // relative to mean energy, on d^2
constexpr double kProjectionTol = 1e-12;  // relative to rms amplitude, per coordinate

double mean_energy_of(std::span<const Point4> pts) {
    double acc = 0.0;
    for (const auto& p : pts) acc += squared_norm(p);
    return acc / static_cast<double>(pts.size());
}

}  // namespace

double squared_norm(const Point4& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]; }

double squared_distance(const Point4& a, const Point4& b) {
    double acc = 0.0;
    for (int d = 0; d < 4; ++d) {
        const double t = a[d] - b[d];
        acc += t * t;
    }
    return acc;
}

int hamming_distance(Label a, Label b) { return std::popcount(a ^ b); }

LabeledConstellation::LabeledConstellation(std::vector<Point4> points, std::vector<Label> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
    const std::size_t m_points = points_.size();
    if (m_points < 2 || !std::has_single_bit(m_points))
        fail(ErrorKind::validation, "constellation size must be a power of two >= 2, got " + std::to_string(m_points));
    if (labels_.size() != m_points)
        fail(ErrorKind::validation, "label count " + std::to_string(labels_.size()) + " does not match point count " +
                                        std::to_string(m_points));
    bits_ = std::countr_zero(m_points);

    std::vector<bool> seen(m_points, false);
    for (Label l : labels_) {
        if (l >= m_points) fail(ErrorKind::validation, "label " + std::to_string(l) + " out of range");
        if (seen[l]) fail(ErrorKind::validation, "duplicate label " + std::to_string(l));
        seen[l] = true;
    }
    for (const auto& p : points_)
        for (double v : p)
            if (!std::isfinite(v)) fail(ErrorKind::validation, "non-finite coordinate");

    const double es = mean_energy_of(points_);
    if (es == 0.0) fail(ErrorKind::degenerate, "all-zero constellation");
    const double tol = kDuplicateTol * es;
    for (std::size_t i = 0; i < m_points; ++i)
        for (std::size_t j = i + 1; j < m_points; ++j)
            if (squared_distance(points_[i], points_[j]) <= tol)
                fail(ErrorKind::validation,
                     "duplicate points at rows " + std::to_string(i) + " and " + std::to_string(j));
}

double LabeledConstellation::mean_energy() const { return mean_energy_of(points_); }

LabeledConstellation LabeledConstellation::with_points(std::vector<Point4> points) const {
    return LabeledConstellation(std::move(points), labels_);
}

LabeledConstellation LabeledConstellation::with_labels(std::vector<Label> labels) const {
    return LabeledConstellation(points_, std::move(labels));
}

LabeledConstellation normalize(const LabeledConstellation& c, double es) {
    if (!(es > 0.0) || !std::isfinite(es)) fail(ErrorKind::validation, "target energy must be positive");
    const double current = c.mean_energy();
    if (current == 0.0) fail(ErrorKind::degenerate, "cannot normalize an all-zero constellation");
    const double scale = std::sqrt(es / current);
    std::vector<Point4> pts(c.points().begin(), c.points().end());
    for (auto& p : pts)
        for (double& v : p) v *= scale;
    return c.with_points(std::move(pts));
}

bool is_constant_modulus(const LabeledConstellation& c, double tol) {
    const double es = c.mean_energy();
    return std::ranges::all_of(c.points(), [&](const Point4& p) { return std::abs(squared_norm(p) - es) <= tol; });
}

double standardized_moment(const LabeledConstellation& c, int p) {
    if (p != 4 && p != 6) fail(ErrorKind::validation, "standardized moment order must be 4 or 6");
    const auto n = static_cast<double>(c.size());

    std::complex<double> mean1{}, mean2{};
    for (const auto& s : c.points()) {
        mean1 += std::complex<double>(s[0], s[1]);
        mean2 += std::complex<double>(s[2], s[3]);
    }
    mean1 /= n;
    mean2 /= n;

    double m2 = 0.0, mp = 0.0;
    for (const auto& s : c.points()) {
        for (const auto x : {std::complex<double>(s[0], s[1]) - mean1, std::complex<double>(s[2], s[3]) - mean2}) {
            const double a2 = std::norm(x);
            m2 += a2;
            mp += p == 4 ? a2 * a2 : a2 * a2 * a2;
        }
    }
    m2 /= 2.0 * n;
    mp /= 2.0 * n;
    if (m2 == 0.0) fail(ErrorKind::degenerate, "zero second moment");
    return mp / std::pow(m2, p / 2);
}

MomentSet moments(const LabeledConstellation& c) { return {standardized_moment(c, 4), standardized_moment(c, 6)}; }

std::size_t DistanceSpectrum::total_pairs() const {
    return std::accumulate(entries.begin(), entries.end(), std::size_t{0},
                           [](std::size_t acc, const SpectrumEntry& e) { return acc + e.count; });
}

DistanceSpectrum distance_spectrum(const LabeledConstellation& c) {
    struct Pair {
        double d2;
        bool hd1;
    };
    const std::size_t n = c.size();
    std::vector<Pair> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            pairs.push_back({squared_distance(c.point(i), c.point(j)), hamming_distance(c.label(i), c.label(j)) == 1});
    std::ranges::sort(pairs, {}, &Pair::d2);

    const double tol = kBucketTol * c.mean_energy();
    DistanceSpectrum out;
    double first = 0.0, sum = 0.0;
    for (const auto& p : pairs) {
        if (out.entries.empty() || p.d2 - first > tol) {
            if (!out.entries.empty()) out.entries.back().d2 = sum / static_cast<double>(out.entries.back().count);
            out.entries.push_back({p.d2, 0, 0});
            first = p.d2;
            sum = 0.0;
        }
        auto& e = out.entries.back();
        ++e.count;
        e.hd1_count += p.hd1 ? 1 : 0;
        sum += p.d2;
    }
    out.entries.back().d2 = sum / static_cast<double>(out.entries.back().count);
    return out;
}

bool gray_check(const LabeledConstellation& c) {
    const auto spec = distance_spectrum(c);
    return spec.msed().hd1_count == spec.msed().count;
}

OrthantBitMap prs_orthant_bit_map() { return {{1, 0, 4, 3}, {2, 5}}; }

namespace {

void check_bit_map(const OrthantBitMap& map, std::size_t generator_count) {
    const int m = map.bits();
    std::vector<bool> used(static_cast<std::size_t>(m), false);
    auto claim = [&](int b) {
        if (b < 0 || b >= m || used[static_cast<std::size_t>(b)])
            fail(ErrorKind::validation, "orthant bit map is not a permutation of the label bits");
        used[static_cast<std::size_t>(b)] = true;
    };
    for (int b : map.sign_bit) claim(b);
    for (int b : map.intra_bits) claim(b);
    if (generator_count != (std::size_t{1} << map.intra_bits.size()))
        fail(ErrorKind::validation, "generator count must be 2^(intra bits), got " + std::to_string(generator_count));
}

Label compose_label(const OrthantBitMap& map, unsigned sign_mask, Label intra) {
    const int m = map.bits();
    Label out = 0;
    for (int d = 0; d < 4; ++d)
        if (sign_mask & (1U << d)) out |= Label{1} << (m - 1 - map.sign_bit[d]);
    const auto k = map.intra_bits.size();
    for (std::size_t t = 0; t < k; ++t)
        if ((intra >> (k - 1 - t)) & 1U) out |= Label{1} << (m - 1 - map.intra_bits[t]);
    return out;
}

}  // namespace

LabeledConstellation orthant_expand(std::span<const Point4> generators, std::span<const Label> generator_labels,
                                    const OrthantBitMap& map) {
    check_bit_map(map, generators.size());
    if (generator_labels.size() != generators.size())
        fail(ErrorKind::validation, "one label per generator required");
    for (const auto& g : generators)
        for (double v : g)
            if (!(v > 0.0)) fail(ErrorKind::validation, "generator coordinates must be strictly positive");

    std::vector<Point4> pts;
    std::vector<Label> labels;
    pts.reserve(16 * generators.size());
    labels.reserve(16 * generators.size());
    for (std::size_t g = 0; g < generators.size(); ++g) {
        for (unsigned mask = 0; mask < 16; ++mask) {
            Point4 p = generators[g];
            for (int d = 0; d < 4; ++d)
                if (mask & (1U << d)) p[d] = -p[d];
            pts.push_back(p);
            labels.push_back(compose_label(map, mask, generator_labels[g]));
        }
    }
    return LabeledConstellation(std::move(pts), std::move(labels));
}

OrthantGenerators orthant_generators(const LabeledConstellation& c, const OrthantBitMap& map) {
    if (c.bits() != map.bits()) fail(ErrorKind::validation, "bit map width does not match constellation");
    OrthantGenerators out;
    const int m = map.bits();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto& p = c.point(i);
        if (!std::ranges::all_of(p, [](double v) { return v > 0.0; })) continue;
        Label intra = 0;
        for (int b : map.intra_bits) intra = (intra << 1) | ((c.label(i) >> (m - 1 - b)) & 1U);
        out.points.push_back(p);
        out.labels.push_back(intra);
    }
    if (out.points.size() != (std::size_t{1} << map.intra_bits.size()))
        fail(ErrorKind::validation, "constellation is not orthant-symmetric: wrong number of positive-orthant points");

    const auto expanded = orthant_expand(out.points, out.labels, map);
    std::vector<std::size_t> by_label(c.size());
    for (std::size_t i = 0; i < expanded.size(); ++i) by_label[expanded.label(i)] = i;
    const double tol = 1e-18 * c.mean_energy();
    for (std::size_t i = 0; i < c.size(); ++i)
        if (squared_distance(c.point(i), expanded.point(by_label[c.label(i)])) > tol)
            fail(ErrorKind::validation, "constellation is not the orthant expansion of its positive-orthant points");
    return out;
}

std::vector<ProjectedPoint> project_2d(const LabeledConstellation& c, int polarization) {
    if (polarization != 1 && polarization != 2) fail(ErrorKind::validation, "polarization must be 1 or 2");
    const std::size_t off = polarization == 1 ? 0 : 2;
    const double tol = kProjectionTol * std::sqrt(c.mean_energy());

    std::vector<std::array<double, 2>> xy;
    xy.reserve(c.size());
    for (const auto& p : c.points()) xy.push_back({p[off], p[off + 1]});
    std::ranges::sort(xy);

    std::vector<ProjectedPoint> out;
    for (const auto& q : xy) {
        auto same = [&](const ProjectedPoint& e) {
            return std::abs(e.xy[0] - q[0]) <= tol && std::abs(e.xy[1] - q[1]) <= tol;
        };
        auto it = std::ranges::find_if(out, same);
        if (it == out.end())
            out.push_back({q, 1});
        else
            ++it->multiplicity;
    }
    return out;
}

}  // namespace gs4d
