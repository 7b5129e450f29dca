#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gs4d/air.hpp"
#include "gs4d/error.hpp"
#include "gs4d/formats.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gs4d;

namespace {

constexpr std::size_t kN = 100'000;

double combined(const AirEstimate& a, const AirEstimate& b) { return std::hypot(a.std_error, b.std_error); }

}  // namespace

TEST_CASE("noise variance convention") {
    CHECK(AwgnSpec{0.0}.noise_variance() == doctest::Approx(0.5));
    CHECK(AwgnSpec{10.0}.noise_variance() == doctest::Approx(0.05));
    CHECK_THROWS_AS(AwgnSpec{NAN}.noise_variance(), Error);
}

TEST_CASE("estimators require unit energy") {
    try {
        mi_mc(table1_reference(), {8.0}, 1000);
        FAIL("expected a precondition error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::precondition);
    }
}

TEST_CASE("high and low SNR limits") {
    const auto c = normalize(table1_reference(), 2.0);
    CHECK(mi_mc(c, {40.0}, 20'000).value == doctest::Approx(6.0).epsilon(1e-3 / 6.0));
    CHECK(std::abs(mi_mc(c, {-30.0}, kN).value) <= 0.01);
    CHECK(gmi_maxlog(c, {40.0}) == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("design point values") {
    const auto t1 = normalize(table1_reference(), 2.0);
    CHECK(gmi_mc(t1, {8.0}, kN).value == doctest::Approx(5.0).epsilon(0.05 / 5.0));
    CHECK(gmi_mc(pm8qam(), {8.0}, kN).value == doctest::Approx(4.76).epsilon(0.05 / 4.76));
}

TEST_CASE("MI of the constant-modulus 4D formats is similar at 8 dB") {
    const double a = mi_mc(normalize(table1_reference(), 2.0), {8.0}, kN).value;
    const double b = mi_mc(reconstruct_2a8psk(), {8.0}, kN).value;
    const double c = mi_mc(reconstruct_sp12qam(), {8.0}, kN).value;
    CHECK(std::abs(a - b) <= 0.05);
    CHECK(std::abs(a - c) <= 0.05);
    CHECK(std::abs(b - c) <= 0.05);
}

TEST_CASE("GMI never exceeds MI") {
    for (const auto& name : builtin_format_names()) {
        if (name == "pm16qam") continue;  // 8 bit/4D-sym, covered separately below
        const auto c = *builtin_format(name);
        for (double snr : {0.0, 4.0, 8.0, 12.0}) {
            const auto a = air_mc(c, {snr}, 20'000, 3);
            CHECK(a.gmi.value <= a.mi.value + 3.0 * combined(a.mi, a.gmi));
        }
    }
    const auto a = air_mc(pm16qam(), {12.0}, 5'000, 3);
    CHECK(a.gmi.value <= a.mi.value + 3.0 * combined(a.mi, a.gmi));
}

TEST_CASE("estimates are invariant under rotation, label XOR and bit permutation") {
    std::mt19937_64 rng(7);
    const auto c = normalize(table1_reference(), 2.0);
    const auto base = air_mc(c, {8.0}, kN, 1);
    auto same = [&](const LabeledConstellation& d, std::uint64_t seed) {
        const auto x = air_mc(d, {8.0}, kN, seed);
        CHECK(std::abs(x.mi.value - base.mi.value) <= 3.0 * combined(x.mi, base.mi));
        CHECK(std::abs(x.gmi.value - base.gmi.value) <= 3.0 * combined(x.gmi, base.gmi));
    };
    same(testing::rotate(c, testing::random_rotation(rng)), 2);
    same(testing::xor_labels(c, 0b101101), 3);
    same(testing::permute_bits(c, {3, 0, 5, 1, 4, 2}), 4);
}

TEST_CASE("estimates increase with SNR") {
    const auto c = normalize(table1_reference(), 2.0);
    AirPair prev = air_mc(c, {0.0}, 20'000, 9);
    for (double snr = 2.0; snr <= 20.0; snr += 2.0) {
        const auto cur = air_mc(c, {snr}, 20'000, 9);
        CHECK(cur.mi.value >= prev.mi.value - 3.0 * combined(cur.mi, prev.mi));
        CHECK(cur.gmi.value >= prev.gmi.value - 3.0 * combined(cur.gmi, prev.gmi));
        prev = cur;
    }
}

TEST_CASE("results do not depend on the worker count") {
    const auto c = pm8qam();
    ::setenv("GS4D_THREADS", "1", 1);
    const auto a = air_mc(c, {8.0}, 50'000, 5);
    ::setenv("GS4D_THREADS", "3", 1);
    const auto b = air_mc(c, {8.0}, 50'000, 5);
    ::setenv("GS4D_THREADS", "8", 1);
    const auto d = air_mc(c, {8.0}, 50'000, 5);
    ::unsetenv("GS4D_THREADS");
    CHECK(a.mi.value == b.mi.value);
    CHECK(a.gmi.value == b.gmi.value);
    CHECK(a.gmi.std_error == b.gmi.std_error);
    CHECK(a.gmi.value == d.gmi.value);
    CHECK(a.mi.value == d.mi.value);
}

TEST_CASE("PM products are separable") {
    for (const auto& base : {circular_8qam(), gray_8psk()}) {
        const auto four = gmi_mc(pm_product(base), {8.0}, kN, 2);
        const auto two = testing::gmi_2d(base, 8.0, kN, 77);
        CHECK(std::abs(four.value - 2.0 * two.value) <= 3.0 * std::hypot(four.std_error, 2.0 * two.std_error));
    }
}

TEST_CASE("Gauss-Hermite agrees with Monte Carlo") {
    const auto c = pm8psk();
    const auto gh = air_gauss_hermite(c, {8.0}, 10);
    const auto mc = air_mc(c, {8.0}, 200'000, 1);
    CHECK(std::abs(gh.gmi.value - mc.gmi.value) <= 0.02);
    CHECK(std::abs(gh.mi.value - mc.mi.value) <= 0.02);
}

TEST_CASE("max-log surrogate") {
    const AwgnSpec ch{8.0};
    const auto t1 = normalize(table1_reference(), 2.0);
    const double s_prs = gmi_maxlog(t1, ch), s_psk = gmi_maxlog(pm8psk(), ch), s_qam = gmi_maxlog(pm8qam(), ch);
    const double g_prs = gmi_mc(t1, ch).value, g_psk = gmi_mc(pm8psk(), ch).value, g_qam = gmi_mc(pm8qam(), ch).value;
    CHECK((s_prs > s_psk) == (g_prs > g_psk));
    CHECK((s_psk > s_qam) == (g_psk > g_qam));
    CHECK((s_prs > s_qam) == (g_prs > g_qam));
    CHECK(g_prs > g_psk);
    CHECK(g_psk > g_qam);

    CHECK(gmi_maxlog(testing::permute_bits(t1, {5, 4, 3, 2, 1, 0}), ch) == doctest::Approx(s_prs).epsilon(1e-12));
    const auto costs = maxlog_symbol_costs(t1, ch);
    double mean = 0.0;
    for (double v : costs) mean += v / 64.0;
    CHECK(6.0 - mean == doctest::Approx(s_prs).epsilon(1e-12));

    const std::array<std::size_t, 4> gens = {0, 16, 32, 48};
    CHECK(gmi_maxlog(t1, ch, gens) == doctest::Approx(s_prs).epsilon(1e-12));
}

TEST_CASE("fixed-noise GMI with generator subsets matches the full average") {
    const auto c = prs_from_params({});
    const NoiseBank bank(3000, 4);
    const std::array<std::size_t, 4> gens = {0, 16, 32, 48};
    // Each orthant copy sees the same statistics; the subset estimate sits
    // within Monte Carlo error of the full one.
    const double sub = gmi_fixed_noise(c, {8.0}, bank, gens);
    const double full = gmi_fixed_noise(c, {8.0}, bank);
    CHECK(std::abs(sub - full) <= 0.03);
    CHECK(gmi_fixed_noise(c, {8.0}, bank, gens) == sub);
}

TEST_CASE("SNR at a rate and horizontal gaps") {
    const std::vector<double> snr = {0, 1, 2, 3};
    const std::vector<double> rate = {1.0, 2.0, 2.0, 4.0};
    CHECK(snr_at_rate(snr, rate, 1.5) == doctest::Approx(0.5));
    CHECK(snr_at_rate(snr, rate, 3.0) == doctest::Approx(2.5));
    CHECK(snr_at_rate(snr, rate, 1.0) == 0.0);
    CHECK_THROWS_AS(snr_at_rate(snr, rate, 5.0), Error);
    CHECK_THROWS_AS(snr_at_rate(snr, rate, 0.5), Error);

    const auto c = pm8qam();
    const std::vector<double> grid = {7.0, 8.0, 9.0};
    const auto a = air_sweep(c, grid, 5000, 1);
    CHECK(snr_gain_at_rate(a, a, 4.8) == 0.0);
    CHECK_THROWS_AS(snr_gain_at_rate(a, a, 5.9), Error);
}
