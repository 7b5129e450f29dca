#include "gs4d/air.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "gs4d/error.hpp"
#include "gs4d/parallel.hpp"

namespace gs4d {

namespace {

constexpr std::size_t kBlock = 4096;

void require_unit_energy(const LabeledConstellation& c) {
    const double es = c.mean_energy();
    if (std::abs(es - kUnitEnergy) > 1e-9 * kUnitEnergy)
        fail(ErrorKind::precondition,
             "constellation must be normalized to mean energy 2 (got " + std::to_string(es) + ")");
}

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    return std::mt19937_64(seq);
}

// Per-received-sample log-likelihood sums. Both terms are in nats:
//   mi  = log sum_j w_j - log w_x
//   gmi = sum_i [log sum_j w_j - log sum_{j : b_i(j) = b_i(x)} w_j]
class Demapper {
public:
    Demapper(const LabeledConstellation& c, double sigma2)
        : c_(c), m_(c.bits()), inv2s2_(0.5 / sigma2), ll_(c.size()), bits_(c.size() * c.bits()) {
        for (std::size_t j = 0; j < c.size(); ++j)
            for (int i = 0; i < m_; ++i) bits_[j * m_ + i] = static_cast<unsigned char>(c.bit(j, i));
    }

    void eval(const Point4& y, std::size_t x, double& mi, double& gmi) {
        const std::size_t n = c_.size();
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            ll_[j] = -squared_distance(y, c_.point(j)) * inv2s2_;
            mx = std::max(mx, ll_[j]);
        }
        double total = 0.0;
        std::array<double, 32> same{};
        const unsigned char* bx = &bits_[x * m_];
        for (std::size_t j = 0; j < n; ++j) {
            const double w = std::exp(ll_[j] - mx);
            total += w;
            const unsigned char* bj = &bits_[j * m_];
            for (int i = 0; i < m_; ++i)
                if (bj[i] == bx[i]) same[i] += w;
        }
        const double lt = std::log(total);
        mi = lt - (ll_[x] - mx);
        gmi = 0.0;
        for (int i = 0; i < m_; ++i) gmi += lt - std::log(same[i]);
    }

private:
    const LabeledConstellation& c_;
    int m_;
    double inv2s2_;
    std::vector<double> ll_;
    std::vector<unsigned char> bits_;
};

struct Moments {
    double s1 = 0.0, s2 = 0.0;

    void add(double v) {
        s1 += v;
        s2 += v * v;
    }
};

AirEstimate finish(const Moments& mo, std::size_t n, double ceiling, std::uint64_t seed) {
    const double dn = static_cast<double>(n);
    const double mean = mo.s1 / dn;
    const double var = n > 1 ? std::max(0.0, (mo.s2 - dn * mean * mean) / (dn - 1.0)) : 0.0;
    return {ceiling - mean / std::numbers::ln2, std::sqrt(var / dn) / std::numbers::ln2, n, seed};
}

double binary_entropy(double p) {
    if (p <= 0.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

std::vector<double> pair_error_table(const LabeledConstellation& c, const AwgnSpec& ch) {
    const std::size_t n = c.size();
    const double sigma = std::sqrt(ch.noise_variance());
    std::vector<double> q(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            q[a * n + b] = q[b * n + a] = q_function(std::sqrt(squared_distance(c.point(a), c.point(b))) / (2.0 * sigma));
    return q;
}

double symbol_cost(const LabeledConstellation& c, const std::vector<double>& q, std::size_t x) {
    const std::size_t n = c.size();
    double cost = 0.0;
    for (int i = 0; i < c.bits(); ++i) {
        double p = 0.0;
        const int bx = c.bit(x, i);
        for (std::size_t j = 0; j < n; ++j)
            if (c.bit(j, i) != bx) p += q[x * n + j];
        cost += binary_entropy(std::min(0.5, p));
    }
    return cost;
}

}  // namespace

void AwgnSpec::validate() const {
    if (!std::isfinite(snr_db)) fail(ErrorKind::validation, "SNR must be finite");
}

double AwgnSpec::noise_variance() const {
    validate();
    return std::pow(10.0, -snr_db / 10.0) / 2.0;
}

AirPair air_mc(const LabeledConstellation& c, const AwgnSpec& ch, std::size_t n, std::uint64_t seed) {
    require_unit_energy(c);
    if (n == 0) fail(ErrorKind::validation, "sample count must be positive");
    const double sigma2 = ch.noise_variance();
    const double sigma = std::sqrt(sigma2);
    const std::size_t blocks = (n + kBlock - 1) / kBlock;

    std::vector<Moments> mi_parts(blocks), gmi_parts(blocks);
    for_each_block(blocks, [&](std::size_t b) {
        auto rng = block_rng(seed, b);
        std::normal_distribution<double> gauss;
        Demapper dm(c, sigma2);
        const std::size_t end = std::min(n, (b + 1) * kBlock);
        for (std::size_t k = b * kBlock; k < end; ++k) {
            const std::size_t x = k % c.size();
            Point4 y = c.point(x);
            for (double& v : y) v += sigma * gauss(rng);
            double mi = 0.0, gmi = 0.0;
            dm.eval(y, x, mi, gmi);
            mi_parts[b].add(mi);
            gmi_parts[b].add(gmi);
        }
    });

    Moments mi, gmi;
    for (std::size_t b = 0; b < blocks; ++b) {
        mi.s1 += mi_parts[b].s1;
        mi.s2 += mi_parts[b].s2;
        gmi.s1 += gmi_parts[b].s1;
        gmi.s2 += gmi_parts[b].s2;
    }
    return {finish(mi, n, c.bits(), seed), finish(gmi, n, c.bits(), seed)};
}

AirEstimate mi_mc(const LabeledConstellation& c, const AwgnSpec& ch, std::size_t n, std::uint64_t seed) {
    return air_mc(c, ch, n, seed).mi;
}

AirEstimate gmi_mc(const LabeledConstellation& c, const AwgnSpec& ch, std::size_t n, std::uint64_t seed) {
    return air_mc(c, ch, n, seed).gmi;
}

AirPair air_gauss_hermite(const LabeledConstellation& c, const AwgnSpec& ch, int nodes) {
    require_unit_energy(c);
    if (nodes < 1) fail(ErrorKind::validation, "node count must be positive");
    const double sigma2 = ch.noise_variance();

    // Physicists' rule: integral of exp(-t^2) f(t) ~ sum w_i f(t_i).
    gsl_integration_fixed_workspace* ws =
        gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, static_cast<std::size_t>(nodes), 0.0, 1.0, 0.0, 0.0);
    if (!ws) fail(ErrorKind::validation, "could not build Gauss-Hermite rule");
    std::vector<double> t(gsl_integration_fixed_nodes(ws), gsl_integration_fixed_nodes(ws) + nodes);
    std::vector<double> w(gsl_integration_fixed_weights(ws), gsl_integration_fixed_weights(ws) + nodes);
    gsl_integration_fixed_free(ws);

    const double scale = std::sqrt(2.0 * sigma2);
    const double norm = 1.0 / (std::numbers::pi * std::numbers::pi);  // pi^(-4/2)
    Demapper dm(c, sigma2);
    double mi_acc = 0.0, gmi_acc = 0.0;
    for (std::size_t x = 0; x < c.size(); ++x) {
        for (int a = 0; a < nodes; ++a)
            for (int b = 0; b < nodes; ++b)
                for (int d = 0; d < nodes; ++d)
                    for (int e = 0; e < nodes; ++e) {
                        const Point4& s = c.point(x);
                        const Point4 y = {s[0] + scale * t[a], s[1] + scale * t[b], s[2] + scale * t[d],
                                          s[3] + scale * t[e]};
                        const double weight = w[a] * w[b] * w[d] * w[e] * norm;
                        double mi = 0.0, gmi = 0.0;
                        dm.eval(y, x, mi, gmi);
                        mi_acc += weight * mi;
                        gmi_acc += weight * gmi;
                    }
    }
    const double m = c.bits();
    const double dn = static_cast<double>(c.size());
    return {{m - mi_acc / dn / std::numbers::ln2, 0.0, 0, 0}, {m - gmi_acc / dn / std::numbers::ln2, 0.0, 0, 0}};
}

NoiseBank::NoiseBank(std::size_t n, std::uint64_t seed) {
    samples_.reserve(n);
    for (std::size_t b = 0; samples_.size() < n; ++b) {
        auto rng = block_rng(seed, b);
        std::normal_distribution<double> gauss;
        for (std::size_t k = 0; k < kBlock && samples_.size() < n; ++k) {
            Point4 z;
            for (double& v : z) v = gauss(rng);
            samples_.push_back(z);
        }
    }
}

double gmi_fixed_noise(const LabeledConstellation& c, const AwgnSpec& ch, const NoiseBank& bank,
                       std::span<const std::size_t> transmit) {
    require_unit_energy(c);
    if (bank.samples().empty()) fail(ErrorKind::validation, "empty noise bank");
    const double sigma2 = ch.noise_variance();
    const double sigma = std::sqrt(sigma2);
    Demapper dm(c, sigma2);

    auto run = [&](std::size_t x, double& acc) {
        for (const auto& z : bank.samples()) {
            const Point4& s = c.point(x);
            const Point4 y = {s[0] + sigma * z[0], s[1] + sigma * z[1], s[2] + sigma * z[2], s[3] + sigma * z[3]};
            double mi = 0.0, gmi = 0.0;
            dm.eval(y, x, mi, gmi);
            acc += gmi;
        }
    };
    double acc = 0.0;
    std::size_t count = 0;
    if (transmit.empty()) {
        for (std::size_t x = 0; x < c.size(); ++x) run(x, acc);
        count = c.size();
    } else {
        for (std::size_t x : transmit) {
            if (x >= c.size()) fail(ErrorKind::validation, "transmit index out of range");
            run(x, acc);
        }
        count = transmit.size();
    }
    return c.bits() - acc / static_cast<double>(count * bank.samples().size()) / std::numbers::ln2;
}

double gmi_maxlog(const LabeledConstellation& c, const AwgnSpec& ch, std::span<const std::size_t> transmit) {
    const auto q = pair_error_table(c, ch);
    double acc = 0.0;
    std::size_t count = 0;
    if (transmit.empty()) {
        for (std::size_t x = 0; x < c.size(); ++x) acc += symbol_cost(c, q, x);
        count = c.size();
    } else {
        for (std::size_t x : transmit) {
            if (x >= c.size()) fail(ErrorKind::validation, "transmit index out of range");
            acc += symbol_cost(c, q, x);
        }
        count = transmit.size();
    }
    return c.bits() - acc / static_cast<double>(count);
}

std::vector<double> maxlog_symbol_costs(const LabeledConstellation& c, const AwgnSpec& ch) {
    const auto q = pair_error_table(c, ch);
    std::vector<double> out(c.size());
    for (std::size_t x = 0; x < c.size(); ++x) out[x] = symbol_cost(c, q, x);
    return out;
}

std::vector<SweepPoint> air_sweep(const LabeledConstellation& c, std::span<const double> snr_db, std::size_t n,
                                  std::uint64_t seed) {
    std::vector<SweepPoint> out;
    out.reserve(snr_db.size());
    for (double s : snr_db) out.push_back({s, air_mc(c, AwgnSpec{s}, n, seed)});
    return out;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> sweep) {
    const auto old = os.precision(10);
    os << "snr_db,mi,mi_stderr,gmi,gmi_stderr,samples,seed\n";
    for (const auto& p : sweep)
        os << p.snr_db << ',' << p.air.mi.value << ',' << p.air.mi.std_error << ',' << p.air.gmi.value << ','
           << p.air.gmi.std_error << ',' << p.air.gmi.samples << ',' << p.air.gmi.seed << '\n';
    os.precision(old);
}

double snr_at_rate(std::span<const double> snr_db, std::span<const double> rate, double target) {
    if (snr_db.size() != rate.size() || snr_db.empty()) fail(ErrorKind::validation, "malformed rate curve");
    for (std::size_t i = 1; i < snr_db.size(); ++i)
        if (!(snr_db[i] > snr_db[i - 1])) fail(ErrorKind::validation, "SNR grid must be strictly increasing");

    double prev = rate[0];
    if (prev >= target) {
        if (prev == target) return snr_db[0];
        fail(ErrorKind::out_of_range, "rate lies below the swept SNR range");
    }
    for (std::size_t i = 1; i < rate.size(); ++i) {
        const double cur = std::max(prev, rate[i]);
        if (cur >= target) {
            const double f = (target - prev) / (cur - prev);
            return snr_db[i - 1] + f * (snr_db[i] - snr_db[i - 1]);
        }
        prev = cur;
    }
    fail(ErrorKind::out_of_range, "rate is not reached within the swept SNR range");
}

double snr_gain_at_rate(std::span<const SweepPoint> a, std::span<const SweepPoint> b, double rate) {
    auto at = [rate](std::span<const SweepPoint> s) {
        std::vector<double> x, y;
        for (const auto& p : s) {
            x.push_back(p.snr_db);
            y.push_back(p.air.gmi.value);
        }
        return snr_at_rate(x, y, rate);
    };
    return at(b) - at(a);
}

}  // namespace gs4d
