#include "gs4d/link.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "gs4d/error.hpp"

namespace gs4d {

namespace {

constexpr double kPlanck = 6.62607015e-34;  // J s
constexpr double kLightSpeed = 299792458.0;  // m/s

double span_scale(const LinkSpec& link) { return std::pow(static_cast<double>(link.n_spans), 1.0 + link.coherence_factor); }

double nli_coefficient(const LinkSpec& link, const LabeledConstellation& c) {
    const double eta = eta_effective(link, moments(c));
    if (eta < 0.0) fail(ErrorKind::model_domain, "NLI coefficient is negative for this format and eta set");
    return span_scale(link) * eta;
}

double snr_linear(double ase, double k, double p) { return 0.5 * p / (ase + k * p * p * p); }

}  // namespace

void LinkSpec::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::validation, std::string(what) + " must be positive");
    };
    positive(span_length_km, "span_length_km");
    positive(alpha_db_per_km, "alpha_db_per_km");
    positive(noise_figure_db, "noise_figure_db");
    positive(symbol_rate_gbaud, "symbol_rate_gbaud");
    positive(carrier_wavelength_nm, "carrier_wavelength_nm");
    if (n_spans < 1) fail(ErrorKind::validation, "n_spans must be at least 1");
    if (!(eta[0] >= 0.0)) fail(ErrorKind::validation, "eta1 must be non-negative");
    for (double e : eta)
        if (!std::isfinite(e)) fail(ErrorKind::validation, "eta must be finite");
    if (!std::isfinite(coherence_factor) || coherence_factor < 0.0)
        fail(ErrorKind::validation, "coherence_factor must be non-negative");
}

double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

double ase_variance(const LinkSpec& link) {
    link.validate();
    const double gain = std::pow(10.0, link.alpha_db_per_km * link.span_length_km / 10.0);
    const double fc = kLightSpeed / (link.carrier_wavelength_nm * 1e-9);
    const double nsp = std::pow(10.0, link.noise_figure_db / 10.0) / 2.0;
    return link.n_spans * (gain - 1.0) * kPlanck * fc * nsp * link.symbol_rate_gbaud * 1e9;
}

double eta_effective(const LinkSpec& link, const MomentSet& mu) {
    const auto& e = link.eta;
    const double k = mu.mu4 - 2.0;
    return e[0] + e[1] * k + e[2] * k * k + e[3] * mu.mu6;
}

double nli_variance(const LinkSpec& link, const LabeledConstellation& c, double p_w) {
    link.validate();
    if (!(p_w > 0.0)) fail(ErrorKind::validation, "launch power must be positive");
    return nli_coefficient(link, c) * p_w * p_w * p_w;
}

double effective_snr_db(const LinkSpec& link, const LabeledConstellation& c, double p_w) {
    return 10.0 * std::log10(0.5 * p_w / (ase_variance(link) + nli_variance(link, c, p_w)));
}

LinkOperatingPoint operating_point(const LinkSpec& link, const LabeledConstellation& c, double p_dbm) {
    const double p = dbm_to_watt(p_dbm);
    LinkOperatingPoint op;
    op.launch_power_dbm = p_dbm;
    op.sigma2_ase = ase_variance(link);
    op.sigma2_nli = nli_variance(link, c, p);
    op.snr_eff_db = 10.0 * std::log10(0.5 * p / (op.sigma2_ase + op.sigma2_nli));
    op.gmi = std::numeric_limits<double>::quiet_NaN();
    return op;
}

LinkOperatingPoint optimal_launch_power(const LinkSpec& link, const LabeledConstellation& c) {
    const double ase = ase_variance(link);
    const double k = nli_coefficient(link, c);
    if (!(k > 0.0)) fail(ErrorKind::model_domain, "no finite optimal launch power: NLI coefficient is zero");
    const double p_star = std::cbrt(ase / (2.0 * k));
    const double p_star_dbm = watt_to_dbm(p_star);

    // Golden-section on -SNR(dBm) around the closed form.
    struct Ctx {
        double ase, k;
    } ctx{ase, k};
    gsl_function fn;
    fn.function = [](double dbm, void* v) {
        const auto* cx = static_cast<Ctx*>(v);
        return -snr_linear(cx->ase, cx->k, dbm_to_watt(dbm));
    };
    fn.params = &ctx;
    gsl_set_error_handler_off();
    gsl_min_fminimizer* s = gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection);
    double numeric = p_star_dbm + 0.7;
    if (gsl_min_fminimizer_set(s, &fn, numeric, p_star_dbm - 10.0, p_star_dbm + 10.0) == GSL_SUCCESS) {
        for (int it = 0; it < 200; ++it) {
            gsl_min_fminimizer_iterate(s);
            const double lo = gsl_min_fminimizer_x_lower(s), hi = gsl_min_fminimizer_x_upper(s);
            if (gsl_min_test_interval(lo, hi, 1e-6, 0.0) == GSL_SUCCESS) break;
        }
        numeric = gsl_min_fminimizer_x_minimum(s);
    }
    gsl_min_fminimizer_free(s);

    const double snr_closed = 10.0 * std::log10(snr_linear(ase, k, p_star));
    const double snr_numeric = 10.0 * std::log10(snr_linear(ase, k, dbm_to_watt(numeric)));
    if (std::abs(snr_closed - snr_numeric) > 0.01)
        fail(ErrorKind::model_domain, "optimal launch power disagrees with numeric search");

    return operating_point(link, c, p_star_dbm);
}

std::vector<DistancePoint> air_vs_distance(const LinkSpec& link, const LabeledConstellation& c,
                                           std::span<const double> distances_km, const AirFunction& air) {
    std::vector<DistancePoint> out;
    out.reserve(distances_km.size());
    for (double d : distances_km) {
        const double spans = d / link.span_length_km;
        const double whole = std::round(spans);
        if (whole < 1.0 || std::abs(spans - whole) > 1e-9 * std::max(1.0, spans))
            fail(ErrorKind::validation, "distance " + std::to_string(d) + " km is not a whole number of spans");
        LinkSpec at = link;
        at.n_spans = static_cast<int>(whole);
        const auto op = optimal_launch_power(at, c);
        out.push_back({d, op.launch_power_dbm, op.snr_eff_db, air ? air(c, op.snr_eff_db) : op.gmi});
    }
    return out;
}

double reach_at_threshold(std::span<const DistancePoint> curve, double gmi_threshold) {
    if (curve.empty()) fail(ErrorKind::out_of_range, "empty curve");
    if (curve[0].gmi < gmi_threshold) fail(ErrorKind::out_of_range, "threshold lies above the curve");
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].gmi == gmi_threshold) return curve[i].distance_km;
        if (curve[i].gmi < gmi_threshold) {
            const auto& a = curve[i - 1];
            const auto& b = curve[i];
            const double f = (a.gmi - gmi_threshold) / (a.gmi - b.gmi);
            return a.distance_km + f * (b.distance_km - a.distance_km);
        }
    }
    if (curve.size() == 1 && curve[0].gmi == gmi_threshold) return curve[0].distance_km;
    fail(ErrorKind::out_of_range, "threshold is never crossed within the distance range");
}

void write_distance_csv(std::ostream& os, std::span<const DistancePoint> curve) {
    const auto old = os.precision(10);
    os << "distance_km,p_opt_dbm,snr_eff_db,gmi\n";
    for (const auto& p : curve) os << p.distance_km << ',' << p.p_opt_dbm << ',' << p.snr_eff_db << ',' << p.gmi << '\n';
    os.precision(old);
}

void write_power_csv(std::ostream& os, std::span<const LinkOperatingPoint> sweep) {
    const auto old = os.precision(10);
    os << "launch_power_dbm,sigma2_ase,sigma2_nli,snr_eff_db\n";
    for (const auto& p : sweep)
        os << p.launch_power_dbm << ',' << p.sigma2_ase << ',' << p.sigma2_nli << ',' << p.snr_eff_db << '\n';
    os.precision(old);
}

}  // namespace gs4d
