#pragma once

#include <bit>
#include <cmath>
#include <random>

#include "gs4d/air.hpp"
#include "gs4d/formats.hpp"

namespace testing {

// Plain 2D GMI estimator, written independently of the library kernel.
inline gs4d::AirEstimate gmi_2d(const gs4d::Format2d& f, double snr_db, std::size_t n, std::uint64_t seed) {
    const std::size_t m = f.points.size();
    const int bits = std::countr_zero(m);
    double es = 0.0;
    for (const auto& p : f.points) es += p[0] * p[0] + p[1] * p[1];
    es /= static_cast<double>(m);
    const double scale = std::sqrt(1.0 / es);  // unit energy per polarization
    const double sigma2 = std::pow(10.0, -snr_db / 10.0) / 2.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(sigma2));
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t x = k % m;
        const double yx = f.points[x][0] * scale + g(rng), yy = f.points[x][1] * scale + g(rng);
        double term = 0.0;
        for (int b = 0; b < bits; ++b) {
            double num = 0.0, den = 0.0;
            const unsigned bx = (f.labels[x] >> b) & 1U;
            for (std::size_t j = 0; j < m; ++j) {
                const double dx = yx - f.points[j][0] * scale, dy = yy - f.points[j][1] * scale;
                const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma2));
                den += w;
                if (((f.labels[j] >> b) & 1U) == bx) num += w;
            }
            term += std::log2(den / num);
        }
        s1 += term;
        s2 += term * term;
    }
    const double mean = s1 / n;
    const double var = (s2 - n * mean * mean) / (n - 1.0);
    return {bits - mean, std::sqrt(var / n), n, seed};
}

}  // namespace testing
