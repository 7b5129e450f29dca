#include "gs4d/optimizer.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "gs4d/error.hpp"

namespace gs4d {

namespace {

constexpr double kFloor = 1e-6;       // smallest folded coordinate, relative to the radius
constexpr double kSeedFloor = 0.05;   // same, for seeds taken from a non-symmetric start
constexpr double kSeedJitter = 0.05;  // absolute jitter on seed generators
constexpr double kSimplexStep = 0.05; // initial simplex size, radians
constexpr double kInvalid = 1e3;      // objective for candidates that collide
constexpr double kMinGain = 1e-12;    // bit; smaller gains are rounding, not moves

std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(purpose >> 32)};
    return std::mt19937_64(seq);
}

Point4 scaled_to(Point4 p, double radius) {
    const double n = std::sqrt(squared_norm(p));
    if (n == 0.0) fail(ErrorKind::degenerate, "cannot project the origin onto the sphere");
    for (double& v : p) v *= radius / n;
    return p;
}

Point4 folded(Point4 p, double radius, double floor) {
    for (double& v : p) v = std::max(std::abs(v), floor * radius);
    return scaled_to(p, radius);
}

std::array<double, 3> to_angles(const Point4& p) {
    const double n = std::sqrt(squared_norm(p));
    const double u0 = std::clamp(p[0] / n, -1.0, 1.0);
    return {std::acos(u0), std::atan2(std::hypot(p[2], p[3]), p[1]), std::atan2(p[3], p[2])};
}

Point4 from_angles(const double* a, double radius) {
    const double s0 = std::sin(a[0]), s1 = std::sin(a[1]);
    return {radius * std::cos(a[0]), radius * s0 * std::cos(a[1]), radius * s0 * s1 * std::cos(a[2]),
            radius * s0 * s1 * std::sin(a[2])};
}

// The free variables of a search: every point (free mode) or the four
// positive-orthant generators (orthant mode).
struct Design {
    SymmetryMode mode = SymmetryMode::free;
    double radius = 1.0;
    std::vector<Point4> points;
    std::vector<Label> labels;

    LabeledConstellation build() const {
        if (mode == SymmetryMode::free) return LabeledConstellation(points, labels);
        return orthant_expand(points, labels, prs_orthant_bit_map());
    }

    std::vector<std::size_t> transmit() const {
        if (mode == SymmetryMode::free) return {};
        std::vector<std::size_t> t(points.size());
        for (std::size_t g = 0; g < t.size(); ++g) t[g] = 16 * g;
        return t;
    }

    Point4 place(const double* angles) const {
        const Point4 p = from_angles(angles, radius);
        return mode == SymmetryMode::orthant ? folded(p, radius, kFloor) : p;
    }
};

double score(const Objective& obj, const Design& d) {
    try {
        return obj(d.build(), d.transmit());
    } catch (const Error&) {
        return -kInvalid;
    }
}

Design design_from(const LabeledConstellation& c, const OptimizerConfig& cfg) {
    Design d;
    d.mode = cfg.symmetry;
    d.radius = std::sqrt(cfg.es);
    if (cfg.symmetry == SymmetryMode::orthant) {
        auto g = orthant_generators(c, prs_orthant_bit_map());
        d.points = std::move(g.points);
        d.labels = std::move(g.labels);
    } else {
        d.points.assign(c.points().begin(), c.points().end());
        d.labels.assign(c.labels().begin(), c.labels().end());
    }
    return d;
}

// Nelder-Mead over the six angles of points j and k, tracking the best
// point seen so the evaluation budget is exact.
struct PairSearch {
    const Objective* obj;
    Design* design;
    std::size_t j, k;
    int evals = 0;
    int budget = 0;
    double best_f = std::numeric_limits<double>::infinity();
    std::array<double, 6> best_x{};

    double eval(const double* x) {
        ++evals;
        const Point4 pj = design->points[j], pk = design->points[k];
        design->points[j] = design->place(x);
        design->points[k] = design->place(x + 3);
        const double f = -score(*obj, *design);
        design->points[j] = pj;
        design->points[k] = pk;
        if (f < best_f) {
            best_f = f;
            std::copy(x, x + 6, best_x.begin());
        }
        return f;
    }

    void run(const std::array<double, 6>& start) {
        gsl_multimin_function fn;
        fn.n = 6;
        fn.f = [](const gsl_vector* v, void* self) {
            auto* s = static_cast<PairSearch*>(self);
            if (s->evals >= s->budget) return kInvalid;
            return s->eval(v->data);
        };
        fn.params = this;

        gsl_vector* x = gsl_vector_alloc(6);
        gsl_vector* step = gsl_vector_alloc(6);
        for (std::size_t i = 0; i < 6; ++i) {
            gsl_vector_set(x, i, start[i]);
            gsl_vector_set(step, i, kSimplexStep);
        }
        const int stop = evals + budget;
        budget = stop;
        gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 6);
        if (gsl_multimin_fminimizer_set(s, &fn, x, step) == GSL_SUCCESS) {
            while (evals < stop) {
                if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
                if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-7) == GSL_SUCCESS) break;
            }
        }
        gsl_multimin_fminimizer_free(s);
        gsl_vector_free(step);
        gsl_vector_free(x);
    }
};

bool poa_move(const Objective& obj, Design& d, std::size_t j, std::size_t k, const OptimizerConfig& cfg,
              std::uint64_t stream, double& current) {
    const auto aj = to_angles(d.points[j]), ak = to_angles(d.points[k]);
    const std::array<double, 6> start = {aj[0], aj[1], aj[2], ak[0], ak[1], ak[2]};

    gsl_set_error_handler_off();
    PairSearch search{&obj, &d, j, k};
    search.budget = cfg.poa_max_evals;
    search.run(start);

    auto rng = make_rng(cfg.seed, mix(stream));
    std::normal_distribution<double> jitter(0.0, kSimplexStep);
    std::array<double, 6> restart = search.best_x;
    for (double& v : restart) v += jitter(rng);
    search.budget = cfg.poa_max_evals;
    search.run(restart);

    if (-search.best_f <= current + kMinGain) return false;
    d.points[j] = d.place(search.best_x.data());
    d.points[k] = d.place(search.best_x.data() + 3);
    current = score(obj, d);
    return true;
}

struct Swap {
    std::size_t a, b;
    double before, after;
};

std::vector<Swap> bsa_move(const Objective& obj, Design& d, const AwgnSpec& ch, double& current) {
    const auto full = d.build();
    const auto all_costs = maxlog_symbol_costs(normalize(full, kUnitEnergy), ch);
    std::vector<double> cost(d.points.size());
    const auto transmit = d.transmit();
    for (std::size_t i = 0; i < cost.size(); ++i) cost[i] = all_costs[transmit.empty() ? i : transmit[i]];

    std::vector<std::size_t> order(cost.size());
    std::iota(order.begin(), order.end(), 0);
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return cost[a] > cost[b]; });

    std::vector<Swap> accepted;
    for (std::size_t x = 0; x < order.size(); ++x) {
        for (std::size_t y = x + 1; y < order.size(); ++y) {
            const std::size_t a = order[x], b = order[y];
            std::swap(d.labels[a], d.labels[b]);
            const double s = score(obj, d);
            if (s > current + kMinGain) {
                accepted.push_back({a, b, current, s});
                current = s;
            } else {
                std::swap(d.labels[a], d.labels[b]);
            }
        }
    }
    return accepted;
}

}  // namespace

void OptimizerConfig::validate() const {
    if (!std::isfinite(snr_db)) fail(ErrorKind::validation, "snr_db must be finite");
    if (poa_iters < 1 || bsa_passes < 1 || outer_iters < 1 || poa_max_evals < 1)
        fail(ErrorKind::validation, "iteration counts must be at least 1");
    if (!(es > 0.0) || !std::isfinite(es)) fail(ErrorKind::validation, "es must be positive");
    if (surrogate_samples < 1 || final_samples < 1) fail(ErrorKind::validation, "sample counts must be at least 1");
    if (!(tolerance >= 0.0)) fail(ErrorKind::validation, "tolerance must be non-negative");
}

Objective::Objective(const OptimizerConfig& cfg) : ch_{cfg.snr_db}, scoring_(cfg.scoring) {
    cfg.validate();
    if (scoring_ == Scoring::monte_carlo) bank_.emplace(cfg.surrogate_samples, mix(cfg.seed));
}

double Objective::operator()(const LabeledConstellation& c, std::span<const std::size_t> transmit) const {
    const double es = c.mean_energy();
    const auto& unit = std::abs(es - kUnitEnergy) > 1e-12 * kUnitEnergy ? normalize(c, kUnitEnergy) : c;
    if (scoring_ == Scoring::maxlog) return gmi_maxlog(unit, ch_, transmit);
    return gmi_fixed_noise(unit, ch_, *bank_, transmit);
}

MoveResult poa_step(const LabeledConstellation& c, std::size_t j, std::size_t k, const OptimizerConfig& cfg,
                    std::uint64_t stream) {
    const Objective obj(cfg);
    Design d = design_from(c, cfg);
    if (j == k || j >= d.points.size() || k >= d.points.size())
        fail(ErrorKind::validation, "POA needs two distinct movable points");
    double current = score(obj, d);
    const double before = current;
    if (!poa_move(obj, d, j, k, cfg, stream, current)) return {c, 0, before, before};
    return {d.build(), 1, before, current};
}

MoveResult bsa_pass(const LabeledConstellation& c, const OptimizerConfig& cfg) {
    const Objective obj(cfg);
    Design d = design_from(c, cfg);
    double current = score(obj, d);
    const double before = current;
    const auto swaps = bsa_move(obj, d, AwgnSpec{cfg.snr_db}, current);
    if (swaps.empty()) return {c, 0, before, before};
    return {d.build(), static_cast<int>(swaps.size()), before, current};
}

OrthantGenerators orthant_seed(const LabeledConstellation& init, const OptimizerConfig& cfg) {
    const double radius = std::sqrt(cfg.es);
    std::vector<Point4> cand;
    for (const auto& p : init.points()) {
        const Point4 u = folded(scaled_to(p, 1.0), 1.0, kSeedFloor);
        const bool seen =
            std::ranges::any_of(cand, [&](const Point4& q) { return squared_distance(q, u) < 1e-18; });
        if (!seen) cand.push_back(u);
    }
    if (cand.size() < 4) fail(ErrorKind::validation, "start constellation folds onto fewer than 4 distinct points");
    std::ranges::sort(cand);

    auto rng = make_rng(cfg.seed, 0x5EED);
    std::shuffle(cand.begin(), cand.end(), rng);
    std::normal_distribution<double> jitter(0.0, kSeedJitter);
    OrthantGenerators out;
    for (std::size_t g = 0; g < 4; ++g) {
        Point4 p = scaled_to(cand[g], radius);
        for (double& v : p) v += jitter(rng);
        out.points.push_back(folded(p, radius, kFloor));
        out.labels.push_back(static_cast<Label>(g));
    }
    return out;
}

OptTrace joint_optimize(const LabeledConstellation& init, const OptimizerConfig& cfg) {
    cfg.validate();
    const Objective obj(cfg);
    const AwgnSpec ch{cfg.snr_db};

    Design d;
    d.mode = cfg.symmetry;
    d.radius = std::sqrt(cfg.es);
    if (cfg.symmetry == SymmetryMode::orthant) {
        OrthantGenerators g;
        try {
            g = orthant_generators(init, prs_orthant_bit_map());
            for (auto& p : g.points) p = scaled_to(p, d.radius);
        } catch (const Error&) {
            g = orthant_seed(init, cfg);
        }
        d.points = std::move(g.points);
        d.labels = std::move(g.labels);
    } else {
        for (const auto& p : init.points()) d.points.push_back(scaled_to(p, d.radius));
        d.labels.assign(init.labels().begin(), init.labels().end());
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < d.points.size(); ++a)
        for (std::size_t b = a + 1; b < d.points.size(); ++b) pairs.emplace_back(a, b);

    auto rng = make_rng(cfg.seed, 0xA11);
    OptTrace trace{{}, d.build(), 0.0, 0.0, {}, 0};
    double current = score(obj, d);
    trace.initial_objective = current;

    for (int round = 1; round <= cfg.outer_iters; ++round) {
        const double start = current;
        std::vector<std::pair<std::size_t, std::size_t>> queue;
        while (queue.size() < static_cast<std::size_t>(cfg.poa_iters)) {
            auto batch = pairs;
            std::shuffle(batch.begin(), batch.end(), rng);
            queue.insert(queue.end(), batch.begin(), batch.end());
        }
        queue.resize(static_cast<std::size_t>(cfg.poa_iters));

        for (const auto& [j, k] : queue) {
            const double before = current;
            if (poa_move(obj, d, j, k, cfg, rng(), current)) trace.moves.push_back({round, "poa", before, current, j, k});
        }
        for (int pass = 0; pass < cfg.bsa_passes; ++pass)
            for (const auto& s : bsa_move(obj, d, ch, current))
                trace.moves.push_back({round, "bsa", s.before, s.after, s.a, s.b});

        trace.rounds = round;
        if (current - start < cfg.tolerance) break;
    }

    trace.final_constellation = d.build();
    trace.final_objective = current;
    trace.final_gmi = gmi_mc(normalize(trace.final_constellation, kUnitEnergy), ch, cfg.final_samples, cfg.seed);
    return trace;
}

void write_trace_jsonl(std::ostream& os, const OptTrace& trace) {
    const auto old = os.precision(17);
    for (const auto& m : trace.moves)
        os << "{\"round\": " << m.round << ", \"kind\": \"" << m.kind << "\", \"objective_before\": " << m.before
           << ", \"objective_after\": " << m.after << ", \"j\": " << m.j << ", \"k\": " << m.k << "}\n";
    os.precision(old);
}

namespace {

struct PrsScorer {
    AwgnSpec ch;
    Scoring scoring;
    std::optional<NoiseBank> bank;

    double operator()(double r, double theta) const {
        try {
            const auto c = prs_from_params({r, theta, kUnitEnergy});
            static constexpr std::array<std::size_t, 4> transmit = {0, 16, 32, 48};
            if (scoring == Scoring::maxlog) return gmi_maxlog(c, ch, transmit);
            return gmi_fixed_noise(c, ch, *bank, transmit);
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    }
};

// Golden-section maximum of f on [lo, hi] started at `guess`; the guess is
// returned unchanged when it does not bracket a maximum.
double golden_max(const std::function<double(double)>& f, double lo, double guess, double hi) {
    gsl_function fn;
    fn.function = [](double x, void* p) { return -(*static_cast<const std::function<double(double)>*>(p))(x); };
    fn.params = const_cast<std::function<double(double)>*>(&f);
    gsl_set_error_handler_off();
    gsl_min_fminimizer* s = gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection);
    double out = guess;
    if (gsl_min_fminimizer_set(s, &fn, guess, lo, hi) == GSL_SUCCESS) {
        for (int it = 0; it < 100; ++it) {
            if (gsl_min_fminimizer_iterate(s) != GSL_SUCCESS) break;
            if (gsl_min_test_interval(gsl_min_fminimizer_x_lower(s), gsl_min_fminimizer_x_upper(s), 1e-5, 0.0) ==
                GSL_SUCCESS)
                break;
        }
        out = gsl_min_fminimizer_x_minimum(s);
    }
    gsl_min_fminimizer_free(s);
    return out;
}

}  // namespace

PrsSurface prs_param_sweep(double snr_db, std::span<const double> r_grid, std::span<const double> theta_grid,
                           const PrsSweepConfig& cfg) {
    if (r_grid.empty() || theta_grid.empty()) fail(ErrorKind::validation, "empty parameter grid");
    for (double r : r_grid)
        if (!(r > 0.0 && r <= 1.0)) fail(ErrorKind::validation, "r grid must lie in (0, 1]");
    for (double t : theta_grid)
        if (!(t > 0.0 && t < 45.0)) fail(ErrorKind::validation, "theta grid must lie in (0, 45)");
    if (cfg.samples < 1) fail(ErrorKind::validation, "sample count must be positive");

    PrsScorer f{AwgnSpec{snr_db}, cfg.scoring, std::nullopt};
    if (cfg.scoring == Scoring::monte_carlo) f.bank.emplace(cfg.samples, cfg.seed);

    PrsSurface s;
    s.snr_db = snr_db;
    s.r.assign(r_grid.begin(), r_grid.end());
    s.theta_deg.assign(theta_grid.begin(), theta_grid.end());
    s.gmi.resize(s.r.size() * s.theta_deg.size());
    std::size_t bi = 0, bt = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.r.size(); ++i)
        for (std::size_t t = 0; t < s.theta_deg.size(); ++t) {
            const double v = f(s.r[i], s.theta_deg[t]);
            s.gmi[i * s.theta_deg.size() + t] = v;
            if (v > best) {
                best = v;
                bi = i;
                bt = t;
            }
        }
    s.r_opt = s.r[bi];
    s.theta_opt = s.theta_deg[bt];
    s.gmi_opt = best;
    if (!cfg.refine) return s;

    if (bi > 0 && bi + 1 < s.r.size()) {
        auto along_r = [&](double r) { return f(r, s.theta_opt); };
        s.r_opt = golden_max(along_r, s.r[bi - 1], s.r_opt, s.r[bi + 1]);
    }
    if (bt > 0 && bt + 1 < s.theta_deg.size()) {
        auto along_t = [&](double t) { return f(s.r_opt, t); };
        s.theta_opt = golden_max(along_t, s.theta_deg[bt - 1], s.theta_opt, s.theta_deg[bt + 1]);
    }
    s.gmi_opt = f(s.r_opt, s.theta_opt);
    return s;
}

void write_surface_csv(std::ostream& os, const PrsSurface& s) {
    const auto old = os.precision(10);
    os << "r,theta_deg,gmi\n";
    for (std::size_t i = 0; i < s.r.size(); ++i)
        for (std::size_t t = 0; t < s.theta_deg.size(); ++t)
            os << s.r[i] << ',' << s.theta_deg[t] << ',' << s.gmi[i * s.theta_deg.size() + t] << '\n';
    os.precision(old);
}

}  // namespace gs4d
