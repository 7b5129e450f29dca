#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gs4d/constellation.hpp"

namespace gs4d {

/// AWGN channel with SNR per two real dimensions. With E_s = 2 the noise
/// variance per real dimension is 10^(-snr_db/10) / 2.
struct AwgnSpec {
    double snr_db = 8.0;

    void validate() const;
    double noise_variance() const;  // per real dimension
};

struct AirEstimate {
    double value = 0.0;      // bit / 4D-sym
    double std_error = 0.0;  // Monte Carlo standard error, bit
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

struct AirPair {
    AirEstimate mi;
    AirEstimate gmi;
};

inline constexpr std::size_t kDefaultSamples = 1'000'000;
inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr double kUnitEnergy = 2.0;

/// Monte Carlo MI and GMI from the same noise draws. Sample k transmits point
/// k mod M; noise comes from independent streams per block of 4096 samples,
/// so the result depends only on (c, ch, n, seed). Requires mean energy 2
/// (precondition error otherwise) and n >= 1.
AirPair air_mc(const LabeledConstellation& c, const AwgnSpec& ch, std::size_t n = kDefaultSamples,
               std::uint64_t seed = kDefaultSeed);

AirEstimate mi_mc(const LabeledConstellation& c, const AwgnSpec& ch, std::size_t n = kDefaultSamples,
                  std::uint64_t seed = kDefaultSeed);
AirEstimate gmi_mc(const LabeledConstellation& c, const AwgnSpec& ch, std::size_t n = kDefaultSamples,
                   std::uint64_t seed = kDefaultSeed);

/// Gauss-Hermite product rule with `nodes` points per real dimension; a
/// deterministic cross-check for the Monte Carlo path (std_error is 0).
AirPair air_gauss_hermite(const LabeledConstellation& c, const AwgnSpec& ch, int nodes = 10);

/// Fixed unit-variance 4D noise draws, reused across candidate evaluations
/// so that differences between candidates are not swamped by sampling noise.
class NoiseBank {
public:
    NoiseBank(std::size_t n, std::uint64_t seed);

    std::span<const Point4> samples() const { return samples_; }

private:
    std::vector<Point4> samples_;
};

/// GMI with every point of `transmit` (all points when empty) sent through
/// every noise draw of `bank`. Requires mean energy 2.
double gmi_fixed_noise(const LabeledConstellation& c, const AwgnSpec& ch, const NoiseBank& bank,
                       std::span<const std::size_t> transmit = {});

/// Max-log surrogate of the GMI. For point x and bit i the bit error
/// probability is approximated by the union bound over the opposite subset,
///   p_i(x) = min(1/2, sum_{x' : b_i(x') != b_i(x)} Q(|x - x'| / (2 sigma))),
/// and G~ = sum_i [1 - mean_x h2(p_i(x))] with h2 the binary entropy.
/// When `transmit` is non-empty the mean runs over those points only.
double gmi_maxlog(const LabeledConstellation& c, const AwgnSpec& ch, std::span<const std::size_t> transmit = {});

/// Per-point cost sum_i h2(p_i(x)) under the same surrogate.
std::vector<double> maxlog_symbol_costs(const LabeledConstellation& c, const AwgnSpec& ch);

struct SweepPoint {
    double snr_db = 0.0;
    AirPair air;
};

std::vector<SweepPoint> air_sweep(const LabeledConstellation& c, std::span<const double> snr_db,
                                  std::size_t n = kDefaultSamples, std::uint64_t seed = kDefaultSeed);

/// Columns snr_db, mi, mi_stderr, gmi, gmi_stderr, samples, seed.
void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> sweep);

/// SNR (dB) at which a rate-vs-SNR curve first reaches `rate`, by linear
/// interpolation between samples. The curve is made monotone with a running
/// maximum first. Out-of-range error when the rate is never reached or lies
/// below the first sample.
double snr_at_rate(std::span<const double> snr_db, std::span<const double> rate, double target);

/// Horizontal gap snr_b(rate) - snr_a(rate) in dB between two GMI curves;
/// positive when `a` needs less SNR.
double snr_gain_at_rate(std::span<const SweepPoint> a, std::span<const SweepPoint> b, double rate);

}  // namespace gs4d
