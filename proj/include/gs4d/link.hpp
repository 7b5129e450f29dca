#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "gs4d/constellation.hpp"

namespace gs4d {

/// Multi-span EDFA link. `eta` holds the NLIN coefficients eta1..eta4 per
/// span in W^-2; the total NLI grows as n_spans^(1 + coherence_factor).
/// Dispersion and nonlinearity are kept only to document where a
/// coefficient set came from.
struct LinkSpec {
    double span_length_km = 80.0;
    int n_spans = 100;
    double alpha_db_per_km = 0.21;
    double noise_figure_db = 5.0;
    double symbol_rate_gbaud = 45.0;
    double carrier_wavelength_nm = 1550.0;
    std::array<double, 4> eta{};
    double coherence_factor = 0.0;
    double dispersion_ps_nm_km = 16.9;
    double gamma_per_w_km = 1.3175;

    void validate() const;
    double distance_km() const { return span_length_km * n_spans; }
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double w);

/// N_sp (G - 1) h f_c n_sp R_s with G the span gain and n_sp = F / 2 (W).
double ase_variance(const LinkSpec& link);

/// Coefficient of P^3 in one span: eta1 + eta2 (mu4 - 2) + eta3 (mu4 - 2)^2 + eta4 mu6.
double eta_effective(const LinkSpec& link, const MomentSet& mu);

/// Total NLI variance at launch power p_w (W per channel). Model-domain
/// error when the coefficient is negative.
double nli_variance(const LinkSpec& link, const LabeledConstellation& c, double p_w);

/// Per-polarization signal power over total noise, (p/2) / (ase + nli), in dB.
double effective_snr_db(const LinkSpec& link, const LabeledConstellation& c, double p_w);

struct LinkOperatingPoint {
    double launch_power_dbm = 0.0;
    double sigma2_ase = 0.0;
    double sigma2_nli = 0.0;
    double snr_eff_db = 0.0;
    double gmi = 0.0;  // NaN until evaluated
};

LinkOperatingPoint operating_point(const LinkSpec& link, const LabeledConstellation& c, double p_dbm);

/// Closed-form optimum p* = (ase / (2 N eta_eff))^(1/3), cross-checked with
/// a golden-section search on the SNR curve. Model-domain error when the
/// NLI coefficient is not positive.
LinkOperatingPoint optimal_launch_power(const LinkSpec& link, const LabeledConstellation& c);

/// GMI of c at an AWGN SNR in dB.
using AirFunction = std::function<double(const LabeledConstellation&, double)>;

struct DistancePoint {
    double distance_km = 0.0;
    double p_opt_dbm = 0.0;
    double snr_eff_db = 0.0;
    double gmi = 0.0;
};

/// One point per distance, each at its own optimal launch power. Distances
/// must be whole multiples of the span length.
std::vector<DistancePoint> air_vs_distance(const LinkSpec& link, const LabeledConstellation& c,
                                           std::span<const double> distances_km, const AirFunction& air);

/// Largest distance where the GMI is still at the threshold, by linear
/// interpolation of the first downward crossing.
double reach_at_threshold(std::span<const DistancePoint> curve, double gmi_threshold);

/// Columns distance_km, p_opt_dbm, snr_eff_db, gmi.
void write_distance_csv(std::ostream& os, std::span<const DistancePoint> curve);

/// Columns launch_power_dbm, sigma2_ase, sigma2_nli, snr_eff_db.
void write_power_csv(std::ostream& os, std::span<const LinkOperatingPoint> sweep);

}  // namespace gs4d
