#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gs4d/air.hpp"
#include "gs4d/constellation.hpp"
#include "gs4d/formats.hpp"

namespace gs4d {

enum class SymmetryMode { free, orthant };

/// How candidates are scored inside the search loops.
/// monte_carlo: GMI over a fixed noise bank of `surrogate_samples` draws.
/// maxlog: the closed-form surrogate gmi_maxlog.
enum class Scoring { monte_carlo, maxlog };

struct OptimizerConfig {
    double snr_db = 8.0;
    int poa_iters = 6;   // pair updates per round
    int bsa_passes = 1;  // label sweeps per round
    int outer_iters = 10;
    std::uint64_t seed = 1;
    SymmetryMode symmetry = SymmetryMode::orthant;
    double es = 2.0;
    Scoring scoring = Scoring::monte_carlo;
    std::size_t surrogate_samples = 3000;
    std::size_t final_samples = kDefaultSamples;
    int poa_max_evals = 200;  // per simplex run; one restart doubles it
    double tolerance = 1e-4;  // bit per round

    void validate() const;
};

/// Scores constellations for one configuration. In orthant mode only the
/// positive-orthant representatives are transmitted, which is exact because
/// every orthant copy has the same error statistics.
class Objective {
public:
    explicit Objective(const OptimizerConfig& cfg);

    double operator()(const LabeledConstellation& c, std::span<const std::size_t> transmit = {}) const;

private:
    AwgnSpec ch_;
    Scoring scoring_;
    std::optional<NoiseBank> bank_;
};

struct MoveResult {
    LabeledConstellation constellation;
    int accepted = 0;
    double before = 0.0;
    double after = 0.0;
};

/// Moves points j and k (generators j and k in orthant mode) over the
/// sphere of radius sqrt(es), searching their six hyperspherical angles with
/// a Nelder-Mead simplex plus one randomly perturbed restart. Keeps the
/// input when no candidate scores higher. `stream` seeds the restart.
MoveResult poa_step(const LabeledConstellation& c, std::size_t j, std::size_t k, const OptimizerConfig& cfg,
                    std::uint64_t stream = 0);

/// One binary-switch sweep: symbols are ranked by their surrogate bit cost,
/// and label swaps are tried from the most costly pair downwards; a swap is
/// kept only when it raises the objective. In orthant mode the four
/// generator labels are switched.
MoveResult bsa_pass(const LabeledConstellation& c, const OptimizerConfig& cfg);

struct TraceRecord {
    int round = 0;
    std::string kind;  // "poa" or "bsa"
    double before = 0.0;
    double after = 0.0;
    std::size_t j = 0;
    std::size_t k = 0;
};

struct OptTrace {
    std::vector<TraceRecord> moves;
    LabeledConstellation final_constellation;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    AirEstimate final_gmi;  // gmi_mc with cfg.final_samples
    int rounds = 0;
};

/// Alternates POA and BSA rounds until a round gains less than
/// cfg.tolerance or cfg.outer_iters rounds have run. The start point is
/// projected onto the constant-modulus sphere; in orthant mode a
/// non-symmetric start is folded into the positive orthant and four of its
/// distinct folded points, picked by the seed, become the generators.
OptTrace joint_optimize(const LabeledConstellation& init, const OptimizerConfig& cfg);

/// Orthant-mode starting generators (and labels 0..3) derived from `init`.
OrthantGenerators orthant_seed(const LabeledConstellation& init, const OptimizerConfig& cfg);

/// JSON lines: round, kind, objective_before, objective_after, j, k.
void write_trace_jsonl(std::ostream& os, const OptTrace& trace);

struct PrsSurface {
    double snr_db = 0.0;
    std::vector<double> r;
    std::vector<double> theta_deg;
    std::vector<double> gmi;  // r-major: gmi[i * theta.size() + t]
    double r_opt = 0.0;
    double theta_opt = 0.0;
    double gmi_opt = 0.0;
};

struct PrsSweepConfig {
    std::size_t samples = 5000;  // noise draws per generator
    std::uint64_t seed = kDefaultSeed;
    Scoring scoring = Scoring::monte_carlo;
    bool refine = true;
};

/// GMI of prs_from_params over the grid with a shared noise bank, the grid
/// argmax, and a golden-section refinement along r and then theta around it.
PrsSurface prs_param_sweep(double snr_db, std::span<const double> r_grid, std::span<const double> theta_grid,
                           const PrsSweepConfig& cfg = {});

/// Columns r, theta_deg, gmi.
void write_surface_csv(std::ostream& os, const PrsSurface& s);

}  // namespace gs4d
