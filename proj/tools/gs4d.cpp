// gs4d: command-line front end for the gs4d library.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gs4d/air.hpp"
#include "gs4d/error.hpp"
#include "gs4d/formats.hpp"
#include "gs4d/io.hpp"
#include "gs4d/link.hpp"
#include "gs4d/optimizer.hpp"

using namespace gs4d;
using nlohmann::json;

namespace {

constexpr int kExitArgs = 2;
constexpr int kExitValidation = 3;
constexpr int kExitModel = 4;

struct ArgError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = kDefaultSeed;
    std::string samples = "1e6";
    std::string out;
    std::string format = "json";
    bool reconstructed = false;
};

std::vector<double> parse_range(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ':');) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ArgError("bad number '" + tok + "' in range '" + text + "'");
        }
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3) throw ArgError("range must be start:stop:step, got '" + text + "'");
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0)) throw ArgError("range step must be positive in '" + text + "'");
    if (!(start <= stop)) throw ArgError("range start must not exceed stop in '" + text + "'");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = start + static_cast<double>(i) * step;
    return out;
}

std::size_t parse_count(const std::string& text) {
    double v = 0.0;
    try {
        std::size_t used = 0;
        v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw ArgError("bad sample count '" + text + "'");
    }
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) throw ArgError("sample count must be a positive integer");
    return static_cast<std::size_t>(v);
}

LabeledConstellation resolve(const std::string& ref, const Globals& g) {
    if (ref == "sp12qam" && !g.reconstructed)
        throw ArgError("sp12qam is a reconstruction; pass --reconstructed to use it");
    if (auto c = builtin_format(ref)) {
        if (ref == "sp12qam") {
            const auto fp = sp12qam_fingerprint(*c);
            if (!fp.msed_match) fail(ErrorKind::validation, "sp12qam reconstruction rejected: " + fp.detail);
            if (!fp.hd1_match) std::cerr << "warning: sp12qam labeling differs from the reference: " << fp.detail << "\n";
        }
        return *c;
    }
    if (!std::filesystem::exists(ref)) fail(ErrorKind::io, "unknown format or missing file: " + ref);
    return read_constellation(ref).constellation;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) fail(ErrorKind::io, "cannot write " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

json analyze_report(const std::string& ref, const LabeledConstellation& raw) {
    const auto c = normalize(raw, 2.0);
    double emin = INFINITY, emax = 0.0;
    for (const auto& p : c.points()) {
        emin = std::min(emin, squared_norm(p));
        emax = std::max(emax, squared_norm(p));
    }
    const auto mu = moments(c);
    const auto spec = distance_spectrum(c);
    json entries = json::array();
    for (const auto& e : spec.entries) entries.push_back({{"d2", e.d2}, {"count", e.count}, {"hd1_count", e.hd1_count}});

    json r = {{"name", ref},
              {"M", c.size()},
              {"m", c.bits()},
              {"input_mean_energy", raw.mean_energy()},
              {"es", 2.0},
              {"energy_min", emin},
              {"energy_max", emax},
              {"constant_modulus", is_constant_modulus(c, 1e-9)},
              {"mu4", mu.mu4},
              {"mu6", mu.mu6},
              {"gray", gray_check(c)},
              {"msed", {{"d2", spec.msed().d2}, {"count", spec.msed().count}, {"hd1_count", spec.msed().hd1_count}}},
              {"total_pairs", spec.total_pairs()},
              {"spectrum", entries},
              {"projection_points", {{"pol1", project_2d(c, 1).size()}, {"pol2", project_2d(c, 2).size()}}}};
    try {
        const auto p = prs_params_from(raw);
        r["prs"] = {{"r", p.r}, {"theta_deg", p.theta_deg}, {"es", p.es}};
    } catch (const Error&) {
    }
    return r;
}

void emit_json(const json& j, const Globals& g) {
    Output out(g.out);
    out.os() << std::setprecision(17) << j.dump(2) << "\n";
}

std::string constellation_name(const std::string& ref) {
    return std::filesystem::path(ref).stem().string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Four-dimensional geometric shaping: analysis, AIR estimation, optimization and link model"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
    app.add_option("--samples", g.samples, "Monte Carlo samples (accepts 1e6)")->capture_default_str();
    app.add_option("--out", g.out, "output file (default stdout)");
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_flag("--reconstructed", g.reconstructed, "allow the sp12qam reconstruction");

    // analyze
    std::string analyze_ref;
    auto* analyze = app.add_subcommand("analyze", "structural report for a format name or constellation file");
    analyze->add_option("format", analyze_ref)->required();

    // air
    std::string air_ref, air_snr = "0:14:0.5", air_est = "both";
    auto* air = app.add_subcommand("air", "MI / GMI versus SNR as CSV");
    air->add_option("format", air_ref)->required();
    air->add_option("--snr", air_snr, "SNR range start:stop:step in dB")->capture_default_str();
    air->add_option("--estimator", air_est)->check(CLI::IsMember({"mi", "gmi", "both"}))->capture_default_str();

    // prs
    auto* prs = app.add_subcommand("prs", "4D-64PRS family");
    prs->require_subcommand(1);
    PrsParams gen_params;
    auto* gen = prs->add_subcommand("gen", "constellation JSON for (r, theta, es)");
    gen->add_option("--r", gen_params.r)->capture_default_str();
    gen->add_option("--theta", gen_params.theta_deg)->capture_default_str();
    gen->add_option("--es", gen_params.es)->capture_default_str();

    std::string sweep_snr = "8", sweep_r = "0.3:0.9:0.02", sweep_theta = "10:44:1";
    std::string scoring_name = "mc";
    auto* sweep = prs->add_subcommand("sweep", "GMI surface over (r, theta)");
    auto* opt = prs->add_subcommand("opt", "optimal (r, theta) per SNR");
    for (auto* sc : {sweep, opt}) {
        sc->add_option("--snr", sweep_snr, "SNR in dB (a range for opt)")->capture_default_str();
        sc->add_option("--r", sweep_r, "r grid start:stop:step")->capture_default_str();
        sc->add_option("--theta", sweep_theta, "theta grid start:stop:step in degrees")->capture_default_str();
        sc->add_option("--scoring", scoring_name)->check(CLI::IsMember({"mc", "maxlog"}))->capture_default_str();
    }

    // optimize
    OptimizerConfig ocfg;
    std::string init_ref = "pm8qam", symmetry = "orthant", opt_scoring = "mc", trace_path;
    auto* optimize = app.add_subcommand("optimize", "joint POA / BSA optimization");
    optimize->add_option("--init", init_ref)->capture_default_str();
    optimize->add_option("--snr", ocfg.snr_db)->capture_default_str();
    optimize->add_option("--symmetry", symmetry)->check(CLI::IsMember({"orthant", "free"}))->capture_default_str();
    optimize->add_option("--scoring", opt_scoring)->check(CLI::IsMember({"mc", "maxlog"}))->capture_default_str();
    optimize->add_option("--poa-iters", ocfg.poa_iters)->capture_default_str();
    optimize->add_option("--bsa-passes", ocfg.bsa_passes)->capture_default_str();
    optimize->add_option("--outer-iters", ocfg.outer_iters)->capture_default_str();
    optimize->add_option("--surrogate-samples", ocfg.surrogate_samples)->capture_default_str();
    optimize->add_option("--poa-evals", ocfg.poa_max_evals)->capture_default_str();
    optimize->add_option("--es", ocfg.es)->capture_default_str();
    optimize->add_option("--trace", trace_path, "write accepted moves as JSON lines");

    // link
    auto* link = app.add_subcommand("link", "analytic NLIN link model");
    link->require_subcommand(1);
    std::string link_cfg, power_range = "-6:6:0.25", dist_range = "800:12000:400";
    std::vector<std::string> link_refs;
    double reach_at = NAN;
    auto* power = link->add_subcommand("power", "SNR_eff versus launch power");
    auto* dist = link->add_subcommand("distance", "GMI versus distance at optimal power");
    for (auto* sc : {power, dist}) {
        sc->add_option("config", link_cfg, "link config JSON")->required();
        sc->add_option("formats", link_refs, "format names or files")->required();
    }
    power->add_option("--power", power_range, "launch power range in dBm")->capture_default_str();
    dist->add_option("--distance", dist_range, "distance range in km")->capture_default_str();
    dist->add_option("--reach-at", reach_at, "report the distance where GMI falls to this level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitArgs;
    }

    try {
        const std::size_t samples = parse_count(g.samples);

        if (*analyze) {
            const auto c = resolve(analyze_ref, g);
            auto report = analyze_report(analyze_ref, c);
            if (g.format == "csv") {
                Output out(g.out);
                out.os() << std::setprecision(10) << "d2,count,hd1_count\n";
                for (const auto& e : report["spectrum"])
                    out.os() << e["d2"].get<double>() << ',' << e["count"] << ',' << e["hd1_count"] << '\n';
            } else {
                emit_json(report, g);
            }
        } else if (*air) {
            const auto snr = parse_range(air_snr);
            const auto c = normalize(resolve(air_ref, g), 2.0);
            const auto sweep_pts = air_sweep(c, snr, samples, g.seed);
            std::ostringstream csv;
            write_sweep_csv(csv, sweep_pts);
            Output out(g.out);
            if (air_est == "both") {
                out.os() << csv.str();
            } else {
                // Blank the columns of the estimator that was not requested.
                std::istringstream in(csv.str());
                std::string line;
                std::getline(in, line);
                out.os() << line << '\n';
                while (std::getline(in, line)) {
                    std::vector<std::string> f;
                    std::stringstream ls(line);
                    for (std::string t; std::getline(ls, t, ',');) f.push_back(t);
                    const std::size_t a = air_est == "mi" ? 3 : 1;
                    f[a] = f[a + 1] = "";
                    for (std::size_t i = 0; i < f.size(); ++i) out.os() << (i ? "," : "") << f[i];
                    out.os() << '\n';
                }
            }
        } else if (*gen) {
            const auto c = prs_from_params(gen_params);
            std::ostringstream meta_r, meta_t, meta_e;
            meta_r << std::setprecision(17) << gen_params.r;
            meta_t << std::setprecision(17) << gen_params.theta_deg;
            meta_e << std::setprecision(17) << gen_params.es;
            if (gen_params.degenerate()) std::cerr << "warning: theta is at the degenerate limit\n";
            Output out(g.out);
            out.os() << constellation_to_json(
                c, {{"name", "prs64"}, {"r", meta_r.str()}, {"theta_deg", meta_t.str()}, {"es", meta_e.str()}});
        } else if (*sweep || *opt) {
            const auto r_grid = parse_range(sweep_r);
            const auto t_grid = parse_range(sweep_theta);
            const auto snrs = parse_range(sweep_snr);
            PrsSweepConfig pcfg;
            pcfg.seed = g.seed;
            // Noise draws are shared by the four generators; the global
            // default is far more than a surface needs.
            pcfg.samples = app.count("--samples") ? std::max<std::size_t>(1, samples / 4) : 5000;
            pcfg.scoring = scoring_name == "maxlog" ? Scoring::maxlog : Scoring::monte_carlo;
            Output out(g.out);
            out.os() << std::setprecision(10);
            if (*sweep) {
                if (snrs.size() != 1) throw ArgError("prs sweep takes a single SNR");
                const auto s = prs_param_sweep(snrs[0], r_grid, t_grid, pcfg);
                if (g.format == "json") {
                    out.os() << json{{"snr_db", s.snr_db}, {"r", s.r},           {"theta_deg", s.theta_deg},
                                     {"gmi", s.gmi},       {"r_opt", s.r_opt},   {"theta_opt", s.theta_opt},
                                     {"gmi_opt", s.gmi_opt}}
                                    .dump(2)
                             << '\n';
                } else {
                    write_surface_csv(out.os(), s);
                }
                std::cerr << "argmax r=" << s.r_opt << " theta=" << s.theta_opt << " gmi=" << s.gmi_opt << '\n';
            } else {
                out.os() << "snr_db,r_opt,theta_opt,gmi_opt\n";
                for (double snr : snrs) {
                    const auto s = prs_param_sweep(snr, r_grid, t_grid, pcfg);
                    out.os() << snr << ',' << s.r_opt << ',' << s.theta_opt << ',' << s.gmi_opt << '\n';
                }
            }
        } else if (*optimize) {
            ocfg.seed = g.seed;
            ocfg.final_samples = samples;
            ocfg.symmetry = symmetry == "free" ? SymmetryMode::free : SymmetryMode::orthant;
            ocfg.scoring = opt_scoring == "maxlog" ? Scoring::maxlog : Scoring::monte_carlo;
            const auto init = resolve(init_ref, g);
            const auto trace = joint_optimize(init, ocfg);
            if (!trace_path.empty()) {
                std::ofstream tf(trace_path, std::ios::binary);
                if (!tf) fail(ErrorKind::io, "cannot write " + trace_path);
                write_trace_jsonl(tf, trace);
            }
            std::ostringstream gmi;
            gmi << std::setprecision(17) << trace.final_gmi.value;
            Output out(g.out);
            out.os() << constellation_to_json(trace.final_constellation,
                                              {{"name", "optimized"},
                                               {"init", constellation_name(init_ref)},
                                               {"snr_db", std::to_string(ocfg.snr_db)},
                                               {"seed", std::to_string(ocfg.seed)},
                                               {"gmi", gmi.str()}});
            std::cerr << std::setprecision(6) << "rounds " << trace.rounds << ", moves " << trace.moves.size()
                      << ", objective " << trace.initial_objective << " -> " << trace.final_objective << ", gmi "
                      << trace.final_gmi.value << " +- " << trace.final_gmi.std_error << '\n';
        } else if (*power || *dist) {
            const auto spec = read_link(link_cfg);
            Output out(g.out);
            out.os() << std::setprecision(10);
            if (*power) {
                const auto p = parse_range(power_range);
                out.os() << "format,launch_power_dbm,sigma2_ase,sigma2_nli,snr_eff_db\n";
                for (const auto& ref : link_refs) {
                    const auto c = normalize(resolve(ref, g), 2.0);
                    for (double dbm : p) {
                        const auto op = operating_point(spec, c, dbm);
                        out.os() << ref << ',' << op.launch_power_dbm << ',' << op.sigma2_ase << ','
                                 << op.sigma2_nli << ',' << op.snr_eff_db << '\n';
                    }
                    const auto best = optimal_launch_power(spec, c);
                    std::cerr << std::setprecision(6) << ref << ": p_opt " << best.launch_power_dbm
                              << " dBm, snr_eff " << best.snr_eff_db << " dB\n";
                }
            } else {
                const auto d = parse_range(dist_range);
                const AirFunction gmi = [&](const LabeledConstellation& c, double snr) {
                    return gmi_mc(c, AwgnSpec{snr}, samples, g.seed).value;
                };
                out.os() << "format,distance_km,p_opt_dbm,snr_eff_db,gmi\n";
                std::vector<double> reach;
                for (const auto& ref : link_refs) {
                    const auto c = normalize(resolve(ref, g), 2.0);
                    const auto curve = air_vs_distance(spec, c, d, gmi);
                    for (const auto& pt : curve)
                        out.os() << ref << ',' << pt.distance_km << ',' << pt.p_opt_dbm << ',' << pt.snr_eff_db << ','
                                 << pt.gmi << '\n';
                    if (!std::isnan(reach_at)) {
                        reach.push_back(reach_at_threshold(curve, reach_at));
                        std::cerr << std::setprecision(6) << ref << ": reach " << reach.back() << " km";
                        if (reach.size() > 1) std::cerr << " (" << reach.front() - reach.back() << " km less than "
                                                        << link_refs.front() << ")";
                        std::cerr << '\n';
                    }
                }
            }
        }
    } catch (const ArgError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitArgs;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::model_domain ? kExitModel : kExitValidation;
    }
    return 0;
}
