#include "gs4d/formats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gs4d/error.hpp"

namespace gs4d {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Label gray(Label k) { return k ^ (k >> 1); }

// One table1 row: coordinate i is sign[i] * nu[index[i]], index in {1,2,3}.
struct Table1Row {
    std::array<int, 4> coord;  // +-1, +-2, +-3
    Label label;
};

// clang-format off
constexpr std::array<Table1Row, 64> kTable1 = {{
    {{+1, +3, +2, +2}, 0b000000}, {{+1, +3, -2, +2}, 0b000010},
    {{+1, +3, -2, -2}, 0b000110}, {{+1, +3, +2, -2}, 0b000100},
    {{-1, +3, +2, +2}, 0b010000}, {{-1, +3, -2, +2}, 0b010010},
    {{-1, +3, -2, -2}, 0b010110}, {{-1, +3, +2, -2}, 0b010100},
    {{-3, +1, +2, +2}, 0b011001}, {{-3, +1, -2, +2}, 0b011011},
    {{-3, +1, -2, -2}, 0b011111}, {{-3, +1, +2, -2}, 0b011101},
    {{-3, -1, +2, +2}, 0b111001}, {{-3, -1, -2, +2}, 0b111011},
    {{-3, -1, -2, -2}, 0b111111}, {{-3, -1, +2, -2}, 0b111101},
    {{-1, -3, +2, +2}, 0b110000}, {{-1, -3, -2, +2}, 0b110010},
    {{-1, -3, -2, -2}, 0b110110}, {{-1, -3, +2, -2}, 0b110100},
    {{+1, -3, +2, +2}, 0b100000}, {{+1, -3, -2, +2}, 0b100010},
    {{+1, -3, -2, -2}, 0b100110}, {{+1, -3, +2, -2}, 0b100100},
    {{+3, -1, +2, +2}, 0b101001}, {{+3, -1, -2, +2}, 0b101011},
    {{+3, -1, -2, -2}, 0b101111}, {{+3, -1, +2, -2}, 0b101101},
    {{+3, +1, +2, +2}, 0b001001}, {{+3, +1, -2, +2}, 0b001011},
    {{+3, +1, -2, -2}, 0b001111}, {{+3, +1, +2, -2}, 0b001101},
    {{+2, +2, +1, +3}, 0b001000}, {{+2, +2, -1, +3}, 0b001010},
    {{+2, +2, -3, +1}, 0b000011}, {{+2, +2, -3, -1}, 0b000111},
    {{+2, +2, -1, -3}, 0b001110}, {{+2, +2, +1, -3}, 0b001100},
    {{+2, +2, +3, -1}, 0b000101}, {{+2, +2, +3, +1}, 0b000001},
    {{-2, +2, +1, +3}, 0b011000}, {{-2, +2, -1, +3}, 0b011010},
    {{-2, +2, -3, +1}, 0b010011}, {{-2, +2, -3, -1}, 0b010111},
    {{-2, +2, -1, -3}, 0b011110}, {{-2, +2, +1, -3}, 0b011100},
    {{-2, +2, +3, -1}, 0b010101}, {{-2, +2, +3, +1}, 0b010001},
    {{-2, -2, +1, +3}, 0b111000}, {{-2, -2, -1, +3}, 0b111010},
    {{-2, -2, -3, +1}, 0b110011}, {{-2, -2, -3, -1}, 0b110111},
    {{-2, -2, -1, -3}, 0b111110}, {{-2, -2, +1, -3}, 0b111100},
    {{-2, -2, +3, -1}, 0b110101}, {{-2, -2, +3, +1}, 0b110001},
    {{+2, -2, +1, +3}, 0b101000}, {{+2, -2, -1, +3}, 0b101010},
    {{+2, -2, -3, +1}, 0b100011}, {{+2, -2, -3, -1}, 0b100111},
    {{+2, -2, -1, -3}, 0b101110}, {{+2, -2, +1, -3}, 0b101100},
    {{+2, -2, +3, -1}, 0b100101}, {{+2, -2, +3, +1}, 0b100001},
}};
// clang-format on

// Generator labels [b3 b6] for (nu1,nu3,nu2,nu2), (nu3,nu1,nu2,nu2),
// (nu2,nu2,nu1,nu3), (nu2,nu2,nu3,nu1), read off the table1 coordinates.
constexpr std::array<Label, 4> kPrsGeneratorLabels = {0b00, 0b11, 0b10, 0b01};

}  // namespace

void PrsParams::validate() const {
    if (!(r > 0.0 && r <= 1.0)) fail(ErrorKind::validation, "ring ratio r must lie in (0, 1]");
    if (!(theta_deg > 0.0 && theta_deg < 45.0)) fail(ErrorKind::validation, "theta must lie in (0, 45) degrees");
    if (!(es > 0.0) || !std::isfinite(es)) fail(ErrorKind::validation, "es must be positive");
}

double PrsParams::outer_radius() const { return std::sqrt(es / (1.0 + r * r)); }
double PrsParams::nu1() const { return outer_radius() * std::cos((45.0 + theta_deg) * kDeg); }
double PrsParams::nu2() const { return inner_radius() / std::numbers::sqrt2; }
double PrsParams::nu3() const { return outer_radius() * std::sin((45.0 + theta_deg) * kDeg); }
bool PrsParams::degenerate() const { return nu1() < 1e-6 * outer_radius(); }

LabeledConstellation prs_from_params(const PrsParams& p) {
    p.validate();
    const double n1 = p.nu1(), n2 = p.nu2(), n3 = p.nu3();
    const std::array<Point4, 4> generators = {{
        {n1, n3, n2, n2},
        {n3, n1, n2, n2},
        {n2, n2, n1, n3},
        {n2, n2, n3, n1},
    }};
    return orthant_expand(generators, kPrsGeneratorLabels, prs_orthant_bit_map());
}

PrsParams prs_params_from(const LabeledConstellation& c) {
    const double es = c.mean_energy();
    if (c.size() != 64 || !is_constant_modulus(c, 1e-9 * es))
        fail(ErrorKind::validation, "not a 64-point constant-modulus constellation");

    const double tol = 1e-9 * std::sqrt(es);
    double outer2 = -1.0, inner2 = -1.0, theta = -1.0;
    auto agree = [&](double& slot, double v, double slack) {
        if (slot < 0.0) {
            slot = v;
        } else if (std::abs(slot - v) > slack) {
            fail(ErrorKind::validation, "points do not follow the PRS ring structure");
        }
    };
    for (const auto& s : c.points()) {
        for (int off : {0, 2}) {
            const double x = std::abs(s[off]), y = std::abs(s[off + 1]);
            if (std::abs(x - y) <= tol) {
                agree(inner2, x * x + y * y, 1e-9 * es);
            } else {
                agree(outer2, x * x + y * y, 1e-9 * es);
                agree(theta, std::abs(std::atan2(y, x) / kDeg - 45.0), 1e-7);
            }
        }
    }
    if (outer2 <= 0.0 || inner2 <= 0.0) fail(ErrorKind::validation, "PRS needs both an inner and an outer ring");
    const PrsParams p{std::sqrt(inner2 / outer2), theta, es};
    if (!(p.r > 0.0 && p.r <= 1.0 + 1e-12) || !(theta > 0.0 && theta < 45.0))
        fail(ErrorKind::validation, "ring ratio or angle outside the PRS family");

    // The fitted parameters must rebuild the same point for every label.
    const auto rebuilt = prs_from_params({std::min(p.r, 1.0), theta, es});
    std::vector<std::size_t> by_label(rebuilt.size());
    for (std::size_t i = 0; i < rebuilt.size(); ++i) by_label[rebuilt.label(i)] = i;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (squared_distance(c.point(i), rebuilt.point(by_label[c.label(i)])) > 1e-12 * es)
            fail(ErrorKind::validation, "points or labels do not follow the PRS layout");
    return p;
}

LabeledConstellation table1_reference() {
    const std::array<double, 4> nu = {0.0, 0.87, 1.0, 2.47};
    std::vector<Point4> pts;
    std::vector<Label> labels;
    for (const auto& row : kTable1) {
        Point4 p{};
        for (int d = 0; d < 4; ++d) p[d] = (row.coord[d] < 0 ? -1.0 : 1.0) * nu[std::abs(row.coord[d])];
        pts.push_back(p);
        labels.push_back(row.label);
    }
    return LabeledConstellation(std::move(pts), std::move(labels));
}

LabeledConstellation pm_product(const Format2d& base, double es) {
    const std::size_t n = base.points.size();
    if (n < 2 || base.labels.size() != n) fail(ErrorKind::validation, "malformed 2D base format");
    const int bits = std::countr_zero(n);
    std::vector<Point4> pts;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            pts.push_back({base.points[i][0], base.points[i][1], base.points[j][0], base.points[j][1]});
            labels.push_back((base.labels[i] << bits) | base.labels[j]);
        }
    }
    return normalize(LabeledConstellation(std::move(pts), std::move(labels)), es);
}

Format2d circular_8qam() {
    const double s = 1.0 + std::numbers::sqrt3;
    // Every outer point is Gray-adjacent to its two inner neighbours; the
    // inner square edges carry Hamming distance 2. Best of all 8! labelings
    // by GMI at 8 dB per polarization.
    return {{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}, {s, 0}, {0, s}, {-s, 0}, {0, -s}}, {0, 6, 5, 3, 2, 4, 7, 1}};
}

Format2d gray_8psk() {
    Format2d f;
    for (Label k = 0; k < 8; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 8.0;
        f.points.push_back({std::cos(a), std::sin(a)});
        f.labels.push_back(gray(k));
    }
    return f;
}

Format2d gray_16qam() {
    Format2d f;
    for (Label ix = 0; ix < 4; ++ix) {
        for (Label iy = 0; iy < 4; ++iy) {
            f.points.push_back({2.0 * ix - 3.0, 2.0 * iy - 3.0});
            f.labels.push_back((gray(ix) << 2) | gray(iy));
        }
    }
    return f;
}

Format2d gray_qpsk() { return {{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}, {0, 1, 2, 3}}; }

LabeledConstellation pm8qam() { return pm_product(circular_8qam()); }
LabeledConstellation pm8psk() { return pm_product(gray_8psk()); }
LabeledConstellation pm16qam() { return pm_product(gray_16qam()); }

LabeledConstellation reconstruct_2a8psk(double ring_ratio) {
    if (!(ring_ratio > 0.0 && ring_ratio < 1.0)) fail(ErrorKind::validation, "ring ratio must lie in (0, 1)");
    std::vector<Point4> pts;
    std::vector<Label> labels;
    for (Label k1 = 0; k1 < 8; ++k1) {
        for (Label k2 = 0; k2 < 8; ++k2) {
            const bool pol1_outer = (k1 + k2) % 2 == 0;
            const double a1 = pol1_outer ? 1.0 : ring_ratio;
            const double a2 = pol1_outer ? ring_ratio : 1.0;
            const double p1 = 2.0 * std::numbers::pi * k1 / 8.0, p2 = 2.0 * std::numbers::pi * k2 / 8.0;
            pts.push_back({a1 * std::cos(p1), a1 * std::sin(p1), a2 * std::cos(p2), a2 * std::sin(p2)});
            labels.push_back((gray(k1) << 3) | gray(k2));
        }
    }
    return normalize(LabeledConstellation(std::move(pts), std::move(labels)), 2.0);
}

LabeledConstellation reconstruct_sp12qam() {
    struct P2 {
        int x, y;
    };
    std::vector<P2> qam12;
    for (int x : {-3, -1, 1, 3})
        for (int y : {-3, -1, 1, 3})
            if (!(std::abs(x) == 3 && std::abs(y) == 3)) qam12.push_back({x, y});

    // Set-partition class: ((x + y) / 2) mod 2. Equal classes in both
    // polarizations keep the 4D minimum squared distance at 8 (raw units).
    auto cls = [](P2 p) { return (((p.x + p.y) / 2) % 2 + 2) % 2; };
    auto inner = [](P2 p) { return std::abs(p.x) == 1 && std::abs(p.y) == 1; };
    auto quadrant = [](P2 p) { return (Label(p.x < 0) << 1) | Label(p.y < 0); };
    auto wide = [](P2 p) { return Label(std::abs(p.x) > std::abs(p.y)); };

    std::vector<Point4> pts;
    std::vector<Label> labels;
    for (P2 a : qam12) {
        for (P2 b : qam12) {
            if (cls(a) != cls(b) || (inner(a) && inner(b))) continue;
            Label i0 = 0, i1 = 0;
            if (inner(a)) {
                i0 = 1;
                i1 = wide(b);
            } else if (inner(b)) {
                i0 = 0;
                i1 = wide(a);
            } else {
                i0 = wide(a);
                i1 = wide(b);
            }
            pts.push_back({double(a.x), double(a.y), double(b.x), double(b.y)});
            labels.push_back((quadrant(a) << 4) | (i0 << 3) | (quadrant(b) << 1) | i1);
        }
    }
    return normalize(LabeledConstellation(std::move(pts), std::move(labels)), 2.0);
}

FingerprintCheck sp12qam_fingerprint(const LabeledConstellation& c) {
    const auto spec = distance_spectrum(normalize(c, 2.0));
    FingerprintCheck out;
    const auto& first = spec.msed();
    out.msed_match = std::abs(first.d2 - 1.0) <= 0.005 && first.count == 272;

    const std::vector<std::pair<double, std::size_t>> want = {{1.0, 128}, {2.0, 32}, {5.0, 32}};
    std::vector<std::pair<double, std::size_t>> got;
    for (const auto& e : spec.entries)
        if (e.hd1_count > 0) got.emplace_back(e.d2, e.hd1_count);
    out.hd1_match = got.size() == want.size() &&
                    std::ranges::equal(got, want, [](const auto& g, const auto& w) {
                        return std::abs(g.first - w.first) <= 0.01 && g.second == w.second;
                    });

    std::ostringstream os;
    os << "MSED " << first.d2 << " x " << first.count << "; HD-1 groups:";
    for (const auto& [d2, n] : got) os << " (" << d2 << ", " << n << ")";
    out.detail = os.str();
    return out;
}

std::optional<LabeledConstellation> builtin_format(std::string_view name) {
    if (name == "prs64") return prs_from_params(PrsParams{});
    if (name == "table1") return normalize(table1_reference(), 2.0);
    if (name == "pm8qam") return pm8qam();
    if (name == "pm8psk") return pm8psk();
    if (name == "pm16qam") return pm16qam();
    if (name == "2a8psk") return reconstruct_2a8psk();
    if (name == "sp12qam") return reconstruct_sp12qam();
    return std::nullopt;
}

std::vector<std::string> builtin_format_names() {
    return {"prs64", "table1", "pm8qam", "pm8psk", "pm16qam", "2a8psk", "sp12qam"};
}

}  // namespace gs4d
