#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "gs4d/constellation.hpp"

namespace testing {

using Matrix4 = std::array<std::array<double, 4>, 4>;

// Gram-Schmidt on Gaussian columns gives a random orthogonal matrix.
inline Matrix4 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix4 q{};
    for (int c = 0; c < 4; ++c) {
        std::array<double, 4> v;
        for (double& x : v) x = g(rng);
        for (int p = 0; p < c; ++p) {
            double dot = 0.0;
            for (int r = 0; r < 4; ++r) dot += v[r] * q[r][p];
            for (int r = 0; r < 4; ++r) v[r] -= dot * q[r][p];
        }
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
        for (int r = 0; r < 4; ++r) q[r][c] = v[r] / n;
    }
    return q;
}

inline gs4d::LabeledConstellation rotate(const gs4d::LabeledConstellation& c, const Matrix4& q) {
    std::vector<gs4d::Point4> pts;
    for (const auto& p : c.points()) {
        gs4d::Point4 out{};
        for (int r = 0; r < 4; ++r)
            for (int k = 0; k < 4; ++k) out[r] += q[r][k] * p[k];
        pts.push_back(out);
    }
    return c.with_points(std::move(pts));
}

inline gs4d::LabeledConstellation random_constellation(std::mt19937_64& rng, std::size_t m_points, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<gs4d::Point4> pts(m_points);
    for (auto& p : pts)
        for (double& v : p) v = g(rng);
    std::vector<gs4d::Label> labels(m_points);
    std::iota(labels.begin(), labels.end(), 0U);
    std::shuffle(labels.begin(), labels.end(), rng);
    return gs4d::LabeledConstellation(std::move(pts), std::move(labels));
}

inline gs4d::LabeledConstellation xor_labels(const gs4d::LabeledConstellation& c, gs4d::Label mask) {
    std::vector<gs4d::Label> l(c.labels().begin(), c.labels().end());
    for (auto& v : l) v ^= mask;
    return c.with_labels(l);
}

inline gs4d::LabeledConstellation permute_bits(const gs4d::LabeledConstellation& c, const std::vector<int>& perm) {
    const int m = c.bits();
    std::vector<gs4d::Label> l;
    for (gs4d::Label v : c.labels()) {
        gs4d::Label out = 0;
        for (int i = 0; i < m; ++i)
            if ((v >> i) & 1U) out |= gs4d::Label{1} << perm[i];
        l.push_back(out);
    }
    return c.with_labels(l);
}

}  // namespace testing
