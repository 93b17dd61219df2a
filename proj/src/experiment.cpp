#include "aggnash/experiment.hpp"

#include "aggnash/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace aggnash {

using nlohmann::json;

namespace {

constexpr double kDriftLimit = 1e-12;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw Error("cli", where + " must be an object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw Error("cli", "unknown key \"" + key + "\" in " + where);
        }
    }
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number()) {
        throw Error("cli", where + "." + key + " must be a number");
    }
    return obj[key].get<double>();
}

std::size_t count(const json& obj, const char* key, std::size_t fallback, const std::string& where) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number_unsigned()) {
        throw Error("cli", where + "." + key + " must be a nonnegative integer");
    }
    return obj[key].get<std::size_t>();
}

std::string text(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw Error("cli", where + "." + key + " must be a string");
    }
    return obj[key].get<std::string>();
}

// Bounds may be given as null or "inf"/"-inf" strings for unbounded sides.
std::vector<double> bound_array(const json& obj, const char* key, double missing,
                                const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_array()) {
        throw Error("cli", where + "." + key + " must be an array");
    }
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (v.is_number()) {
            out.push_back(v.get<double>());
        } else if (v.is_null()) {
            out.push_back(missing);
        } else if (v.is_string() && (v == "inf" || v == "+inf")) {
            out.push_back(std::numeric_limits<double>::infinity());
        } else if (v.is_string() && v == "-inf") {
            out.push_back(-std::numeric_limits<double>::infinity());
        } else {
            throw Error("cli", where + "." + key + " holds a non-numeric entry");
        }
    }
    return out;
}

std::vector<double> number_array(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_array()) {
        throw Error("cli", where + "." + key + " must be an array");
    }
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) {
            throw Error("cli", where + "." + key + " holds a non-numeric entry");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

std::string read_file(const std::filesystem::path& path, const char* module) {
    std::ifstream in(path);
    if (!in) {
        throw Error(module, "cannot read " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json parse_json(const std::string& s, const char* module, const std::string& what) {
    try {
        return json::parse(s);
    } catch (const json::exception& e) {
        throw Error(module, "malformed " + what + ": " + e.what());
    }
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

GameSpec parse_game_block(const json& g, const std::filesystem::path& base) {
    const std::string where = "game";
    if (g.is_object() && g.contains("file")) {
        reject_unknown(g, {"file"}, where);
        const auto path = resolve(text(g, "file", where), base);
        return parse_game_block(parse_json(read_file(path, "game"), "game", "game file"),
                                path.parent_path());
    }
    reject_unknown(g, {"kind", "players", "a", "b", "c", "lower", "upper"}, where);
    GameSpec spec;
    spec.kind = text(g, "kind", where);
    if (spec.kind == "builtin_paper_sec5") {
        spec.players = count(g, "players", 20, where);
        for (const char* k : {"a", "b", "c", "lower", "upper"}) {
            if (g.contains(k)) {
                throw Error("cli", std::string("game.") + k + " is not allowed for builtin_paper_sec5");
            }
        }
    } else if (spec.kind == "quadratic_cournot") {
        if (g.contains("players")) {
            throw Error("cli", "game.players is implied by the coefficient arrays");
        }
        spec.a = number_array(g, "a", where);
        spec.b = number_array(g, "b", where);
        spec.c = number_array(g, "c", where);
        spec.lower = bound_array(g, "lower", -std::numeric_limits<double>::infinity(), where);
        spec.upper = bound_array(g, "upper", std::numeric_limits<double>::infinity(), where);
        spec.players = spec.a.size();
    } else {
        throw Error("cli", "unknown game kind \"" + spec.kind + "\"");
    }
    return spec;
}

GraphSpec parse_graph_block(const json& g, const std::filesystem::path& base) {
    const std::string where = "graph";
    reject_unknown(g, {"kind", "nodes", "weight", "p", "seed", "path", "lambda2", "scale_to_lambda2"},
                   where);
    GraphSpec spec;
    spec.kind = text(g, "kind", where);
    if (g.contains("nodes")) {
        spec.nodes = count(g, "nodes", 0, where);
    }
    if (g.contains("scale_to_lambda2")) {
        spec.scale_to_lambda2 = number(g, "scale_to_lambda2", 0.0, where);
    }
    auto forbid = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys) {
            if (g.contains(k)) {
                throw Error("cli", std::string("graph.") + k + " is not used by kind " + spec.kind);
            }
        }
    };
    if (spec.kind == "directed_cycle" || spec.kind == "complete") {
        forbid({"p", "seed", "path", "lambda2"});
        spec.weight = number(g, "weight", 1.0, where);
    } else if (spec.kind == "er_undirected") {
        forbid({"weight", "path", "lambda2"});
        spec.p = number(g, "p", 0.2, where);
        if (g.contains("seed")) {
            if (!g["seed"].is_number_unsigned()) {
                throw Error("cli", "graph.seed must be a nonnegative integer");
            }
            spec.seed = g["seed"].get<std::uint64_t>();
        }
    } else if (spec.kind == "file") {
        forbid({"weight", "p", "seed", "lambda2", "nodes"});
        spec.path = resolve(text(g, "path", where), base).string();
    } else if (spec.kind == "lambda2_override") {
        forbid({"weight", "p", "seed", "path", "nodes", "scale_to_lambda2"});
        spec.lambda2 = number(g, "lambda2", 0.0, where);
        if (!(spec.lambda2 > 0.0)) {
            throw Error("cli", "graph.lambda2 must be positive");
        }
    } else {
        throw Error("cli", "unknown graph kind \"" + spec.kind + "\"");
    }
    return spec;
}

Digraph build_graph(const GraphSpec& spec, std::size_t players, std::uint64_t seed) {
    const std::size_t n = spec.nodes.value_or(players);
    Digraph g = [&] {
        if (spec.kind == "directed_cycle") {
            return build_directed_cycle(n, spec.weight);
        }
        if (spec.kind == "complete") {
            return build_complete(n, spec.weight);
        }
        if (spec.kind == "er_undirected") {
            return build_er_undirected(n, spec.p, spec.seed.value_or(seed));
        }
        if (spec.kind == "file") {
            return load_graph(spec.path);
        }
        throw Error("cli", "graph kind " + spec.kind + " has no topology");
    }();
    if (spec.scale_to_lambda2) {
        g = scale_to_lambda2(g, *spec.scale_to_lambda2);
    }
    return g;
}

GameConstants resolve_constants(const ExperimentConfig& cfg, const AggregativeGame& game) {
    switch (cfg.constants.source) {
        case ConstantsSource::Declared:
            return cfg.constants.declared;
        case ConstantsSource::Sampled:
            return sample_constants(game, cfg.constants.samples, cfg.seed);
        case ConstantsSource::Analytic:
            if (auto k = game.analytic_constants()) {
                return *k;
            }
            throw Error("game", "no analytic constants for this game and sampling is disabled; "
                                "set constants.source to \"sampled\" or \"declared\"");
    }
    throw Error("cli", "unreachable constants source");
}

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cli", "cannot write " + path.string());
    }
    out << body;
}

json monitors_json(const SimResult& r) {
    const SimMonitors& m = r.monitors;
    return {{"status", to_string(r.status)},
            {"message", r.message},
            {"steps", r.steps},
            {"x0_projected", r.x0_projected},
            {"max_feasibility_violation", m.max_feasibility_violation},
            {"max_rounding_correction", m.max_rounding_correction},
            {"max_averaging_drift", m.max_averaging_drift},
            {"max_theta_mean", m.max_theta_mean},
            {"max_tracking_mean", m.max_tracking_mean},
            {"rk4_feasibility_flag", m.rk4_feasibility_flag}};
}

const std::map<std::string, std::pair<std::string, std::string>>& presets() {
    // name -> (description, config)
    static const std::map<std::string, std::pair<std::string, std::string>> table = {
        {"paper-sec5-cycle",
         {"20-player Cournot game on the unit directed 20-cycle, alpha=3, beta=1, Euler h=0.01, "
          "T=400 (small gain fails; forced run)",
          R"({"game": {"kind": "builtin_paper_sec5"},
              "graph": {"kind": "directed_cycle", "weight": 1.0},
              "alpha": 3, "beta": 1,
              "integrator": {"scheme": "euler", "h": 0.01, "T": 400, "sample_every": 10},
              "x0": {"policy": "midpoint"},
              "force": true})"}},
        {"paper-sec5-er",
         {"20-player Cournot game on an undirected ER graph (p=0.2, seed 1), alpha=3, beta=1",
          R"({"game": {"kind": "builtin_paper_sec5"},
              "graph": {"kind": "er_undirected", "p": 0.2, "seed": 1},
              "alpha": 3, "beta": 1,
              "integrator": {"scheme": "euler", "h": 0.01, "T": 400, "sample_every": 10},
              "x0": {"policy": "midpoint"},
              "force": true})"}},
        {"paper-sec5-original-surrogate",
         {"20-player Cournot game on the directed 20-cycle scaled to lambda2=0.2872 (certified "
          "regime), every step sampled for eISS checks",
          R"({"game": {"kind": "builtin_paper_sec5"},
              "graph": {"kind": "directed_cycle", "scale_to_lambda2": 0.2872},
              "alpha": 3, "beta": 1,
              "integrator": {"scheme": "euler", "h": 0.01, "T": 100, "sample_every": 1},
              "x0": {"policy": "midpoint"}})"}},
        {"paper-sec5-certificate-original",
         {"certificate only, lambda2=0.2872 supplied directly",
          R"({"game": {"kind": "builtin_paper_sec5"},
              "graph": {"kind": "lambda2_override", "lambda2": 0.2872},
              "alpha": 3, "beta": 1})"}},
        {"paper-sec5-certificate-cycle",
         {"certificate only, lambda2=0.0489 supplied directly",
          R"({"game": {"kind": "builtin_paper_sec5"},
              "graph": {"kind": "lambda2_override", "lambda2": 0.0489},
              "alpha": 3, "beta": 1})"}},
        {"paper-sec5-certificate-er",
         {"certificate only, lambda2=0.0955 supplied directly",
          R"({"game": {"kind": "builtin_paper_sec5"},
              "graph": {"kind": "lambda2_override", "lambda2": 0.0955},
              "alpha": 3, "beta": 1})"}},
        {"paper-sec5-beta-min-sweep",
         {"beta_min(alpha) curve over (0, alpha_max) for lambda2=0.2872",
          R"({"game": {"kind": "builtin_paper_sec5"},
              "graph": {"kind": "lambda2_override", "lambda2": 0.2872},
              "alpha": 3, "beta": 1,
              "sweep": {"points": 100}})"}},
        {"two-player-box",
         {"2-player quadratic game with active box constraints on the undirected 2-node graph",
          R"({"game": {"kind": "quadratic_cournot",
                       "a": [0.5, 0.4], "b": [-1.0, 0.3], "c": [0.4, -0.2],
                       "lower": [-2.0, -2.0], "upper": [0.8, 2.0]},
              "graph": {"kind": "complete"},
              "alpha": 0.2, "beta": 15,
              "integrator": {"scheme": "euler", "h": 0.01, "T": 100, "sample_every": 10},
              "x0": {"policy": "midpoint"}})"}},
    };
    return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    const json doc = parse_json(json_text, "cli", "config");
    reject_unknown(doc, {"game", "constants", "graph", "alpha", "beta", "integrator", "x0", "fit",
                         "oracle", "force", "seed", "sweep"},
                   "config");
    ExperimentConfig cfg;
    if (!doc.contains("game") || !doc.contains("graph")) {
        throw Error("cli", "config needs \"game\" and \"graph\"");
    }
    cfg.game = parse_game_block(doc["game"], base_dir);
    cfg.graph = parse_graph_block(doc["graph"], base_dir);
    cfg.alpha = number(doc, "alpha", cfg.alpha, "config");
    cfg.beta = number(doc, "beta", cfg.beta, "config");
    if (!(cfg.alpha > 0.0) || !(cfg.beta > 0.0)) {
        throw Error("cli", "alpha and beta must be positive");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) {
            throw Error("cli", "seed must be a nonnegative integer");
        }
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("force")) {
        if (!doc["force"].is_boolean()) {
            throw Error("cli", "force must be a boolean");
        }
        cfg.force = doc["force"].get<bool>();
    }
    if (doc.contains("constants")) {
        const json& c = doc["constants"];
        reject_unknown(c, {"source", "samples", "mu", "kappa1", "kappa2", "kappa3"}, "constants");
        const std::string source = c.contains("source") ? text(c, "source", "constants") : "analytic";
        if (source == "analytic") {
            cfg.constants.source = ConstantsSource::Analytic;
        } else if (source == "sampled") {
            cfg.constants.source = ConstantsSource::Sampled;
        } else if (source == "declared") {
            cfg.constants.source = ConstantsSource::Declared;
            for (const char* k : {"mu", "kappa1", "kappa2", "kappa3"}) {
                if (!c.contains(k)) {
                    throw Error("cli", std::string("declared constants need ") + k);
                }
            }
        } else {
            throw Error("cli", "unknown constants.source \"" + source + "\"");
        }
        cfg.constants.samples = count(c, "samples", cfg.constants.samples, "constants");
        cfg.constants.declared.mu = number(c, "mu", 0.0, "constants");
        cfg.constants.declared.kappa1 = number(c, "kappa1", 0.0, "constants");
        cfg.constants.declared.kappa2 = number(c, "kappa2", 0.0, "constants");
        cfg.constants.declared.kappa3 = number(c, "kappa3", 0.0, "constants");
    }
    if (doc.contains("integrator")) {
        const json& it = doc["integrator"];
        reject_unknown(it, {"scheme", "h", "T", "sample_every"}, "integrator");
        if (it.contains("scheme")) {
            cfg.scheme = scheme_from_string(text(it, "scheme", "integrator"));
        }
        cfg.step = number(it, "h", cfg.step, "integrator");
        cfg.horizon = number(it, "T", cfg.horizon, "integrator");
        cfg.sample_every = count(it, "sample_every", cfg.sample_every, "integrator");
        if (!(cfg.step > 0.0) || !(cfg.horizon > 0.0) || cfg.sample_every == 0) {
            throw Error("cli", "integrator needs h > 0, T > 0, sample_every >= 1");
        }
        if (cfg.scheme == Scheme::Euler && cfg.step > 1.0) {
            throw Error("cli", "Euler step must not exceed 1");
        }
    }
    if (doc.contains("x0")) {
        const json& x0 = doc["x0"];
        reject_unknown(x0, {"policy", "values"}, "x0");
        const std::string policy = text(x0, "policy", "x0");
        if (policy == "midpoint") {
            cfg.x0 = X0Policy::Midpoint;
        } else if (policy == "random") {
            cfg.x0 = X0Policy::Random;
        } else if (policy == "explicit") {
            cfg.x0 = X0Policy::Explicit;
            cfg.x0_values = number_array(x0, "values", "x0");
        } else {
            throw Error("cli", "unknown x0.policy \"" + policy + "\"");
        }
        if (cfg.x0 != X0Policy::Explicit && x0.contains("values")) {
            throw Error("cli", "x0.values only applies to the explicit policy");
        }
    }
    if (doc.contains("fit")) {
        const json& f = doc["fit"];
        reject_unknown(f, {"floor", "ceiling", "min_samples"}, "fit");
        cfg.fit.floor = number(f, "floor", cfg.fit.floor, "fit");
        cfg.fit.ceiling = number(f, "ceiling", cfg.fit.ceiling, "fit");
        cfg.fit.min_samples = count(f, "min_samples", cfg.fit.min_samples, "fit");
        if (!(cfg.fit.floor > 0.0 && cfg.fit.floor < cfg.fit.ceiling)) {
            throw Error("cli", "fit needs 0 < floor < ceiling");
        }
    }
    if (doc.contains("oracle")) {
        const json& o = doc["oracle"];
        reject_unknown(o, {"tol", "max_iter", "starts"}, "oracle");
        cfg.oracle_tol = number(o, "tol", cfg.oracle_tol, "oracle");
        cfg.oracle_max_iter = count(o, "max_iter", cfg.oracle_max_iter, "oracle");
        cfg.oracle_starts = count(o, "starts", cfg.oracle_starts, "oracle");
        if (!(cfg.oracle_tol > 0.0) || cfg.oracle_starts == 0) {
            throw Error("cli", "oracle needs tol > 0 and starts >= 1");
        }
    }
    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        reject_unknown(s, {"alpha_min", "alpha_max", "points"}, "sweep");
        if (s.contains("alpha_min")) {
            cfg.sweep.alpha_min = number(s, "alpha_min", 0.0, "sweep");
        }
        if (s.contains("alpha_max")) {
            cfg.sweep.alpha_max = number(s, "alpha_max", 0.0, "sweep");
        }
        cfg.sweep.points = count(s, "points", cfg.sweep.points, "sweep");
        if (cfg.sweep.points < 2) {
            throw Error("cli", "sweep.points must be at least 2");
        }
    }
    if (cfg.game.kind == "quadratic_cournot" && cfg.graph.nodes &&
        *cfg.graph.nodes != cfg.game.players) {
        throw Error("cli", "graph.nodes does not match the number of players");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_file(path, "cli"), path.parent_path());
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : presets()) {
        names.push_back(name);
    }
    return names;
}

std::string preset_description(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        throw Error("cli", "unknown preset \"" + name + "\"");
    }
    return it->second.first;
}

std::string preset_json(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        throw Error("cli", "unknown preset \"" + name + "\"");
    }
    return json::parse(it->second.second).dump(2) + "\n";
}

ExperimentConfig preset_config(const std::string& name) { return parse_config(preset_json(name)); }

GamePtr build_game(const GameSpec& spec) {
    if (spec.kind == "builtin_paper_sec5") {
        if (spec.players == 0) {
            throw Error("game", "builtin game needs at least one player");
        }
        return std::make_shared<QuadraticCournotGame>(QuadraticCournotGame::builtin_sec5(spec.players));
    }
    if (spec.kind == "quadratic_cournot") {
        auto vec = [](const std::vector<double>& v) {
            return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
        };
        return std::make_shared<QuadraticCournotGame>(vec(spec.a), vec(spec.b), vec(spec.c),
                                                      vec(spec.lower), vec(spec.upper));
    }
    throw Error("game", "unknown game kind \"" + spec.kind + "\"");
}

GamePtr load_game(const std::filesystem::path& path) {
    return build_game(parse_game_block(parse_json(read_file(path, "game"), "game", "game file"),
                                       path.parent_path()));
}

ExperimentReport certify_only(const ExperimentConfig& cfg,
                              const std::optional<std::filesystem::path>& out) {
    const GamePtr game = build_game(cfg.game);
    const GameConstants k = resolve_constants(cfg, *game);
    std::optional<double> graph_l2;
    double l2 = cfg.graph.lambda2;
    if (cfg.graph.kind != "lambda2_override") {
        graph_l2 = lambda2(build_graph(cfg.graph, game->players(), cfg.seed));
        l2 = *graph_l2;
    }
    ExperimentReport report{.game_constants = k,
                            .graph_lambda2 = graph_l2,
                            .certificate = gains(Constants::from_game(k, l2), cfg.alpha, cfg.beta),
                            .ne = std::nullopt,
                            .sim = std::nullopt,
                            .fit = std::nullopt,
                            .comparison = std::nullopt,
                            .fit_error = {},
                            .simulated = false,
                            .skipped_inadmissible = false,
                            .monitors_ok = true,
                            .notes = {}};
    if (k.estimated) {
        report.notes.emplace_back("constants are sampled estimates");
    }
    if (out) {
        std::filesystem::create_directories(*out);
        write_text(*out / "certificate.txt", certificate_to_text(report.certificate));
        write_text(*out / "certificate.json", certificate_to_json(report.certificate));
    }
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                const std::optional<std::filesystem::path>& out) {
    ExperimentReport report = certify_only(cfg, out);
    const GamePtr game = build_game(cfg.game);
    const GameConstants& k = report.game_constants;

    OracleOptions oopt;
    oopt.tol = cfg.oracle_tol;
    oopt.max_iter = cfg.oracle_max_iter;
    oopt.step = default_oracle_step(k);
    report.ne = solve_ne_multistart(*game, oopt, cfg.oracle_starts, cfg.seed);
    const NEResult& ne = report.ne->best;
    if (!ne.converged) {
        report.notes.emplace_back("oracle did not reach its tolerance");
    }
    if (!report.ne->unique) {
        report.notes.emplace_back("multistart solutions disagree");
    }

    const Certificate& cert = report.certificate;
    const bool admissible = cert.alpha_admissible && cert.beta_admissible;
    if (cfg.graph.kind == "lambda2_override") {
        report.notes.emplace_back("lambda2 override: certificate only, no simulation");
    } else if (!admissible && !cfg.force) {
        report.skipped_inadmissible = true;
        report.notes.emplace_back("parameters outside the admissible region; set force to simulate");
    } else {
        const Digraph graph = build_graph(cfg.graph, game->players(), cfg.seed);
        const Dynamics dyn(*game, graph, cfg.alpha, cfg.beta);
        Vector x0(game->profile_dim());
        switch (cfg.x0) {
            case X0Policy::Midpoint:
                for (std::size_t i = 0; i < game->players(); ++i) {
                    game->block(x0, i) = game->strategy_set(i).reference_point();
                }
                break;
            case X0Policy::Random: {
                std::mt19937_64 rng(cfg.seed);
                x0 = sample_profile(*game, rng);
                break;
            }
            case X0Policy::Explicit:
                if (static_cast<Eigen::Index>(cfg.x0_values.size()) != game->profile_dim()) {
                    throw Error("cli", "x0.values has the wrong length");
                }
                x0 = Eigen::Map<const Vector>(cfg.x0_values.data(), game->profile_dim());
                break;
        }
        SimOptions sopt;
        sopt.horizon = cfg.horizon;
        sopt.step = cfg.step;
        sopt.scheme = cfg.scheme;
        sopt.sample_every = cfg.sample_every;
        sopt.reference = ne.x;
        report.sim = simulate(dyn, x0, sopt);
        report.simulated = true;
        const SimResult& sim = *report.sim;
        if (sim.x0_projected) {
            report.notes.emplace_back("x0 was infeasible and has been projected");
        }

        const SimMonitors& m = sim.monitors;
        report.monitors_ok = sim.status == SimStatus::Completed &&
                             m.max_averaging_drift <= kDriftLimit &&
                             m.max_theta_mean <= kDriftLimit &&
                             (cfg.scheme == Scheme::Euler ? m.max_feasibility_violation == 0.0
                                                          : !m.rk4_feasibility_flag);

        const ErrorSeries series = error_series(sim.trajectory, ne.x);
        try {
            report.fit = fit_rate(series, cfg.fit);
            report.comparison = compare_to_certificate(*report.fit, cert);
        } catch (const Error& e) {
            report.fit_error = e.what();
        }
        if (out) {
            std::ofstream csv(*out / "trajectory.csv", std::ios::binary);
            write_trajectory_csv(sim.trajectory, csv);
            std::optional<Envelope> env;
            if (cert.small_gain && sim.trajectory.size() > 0) {
                env.emplace(cert, series.values.front(), sim.trajectory.tracking_error(0).norm());
            }
            std::ofstream rates(*out / "rates.csv", std::ios::binary);
            write_rate_csv(series, env ? &*env : nullptr, rates);
            if (report.fit) {
                write_text(*out / "rates.json", rate_report_to_json(*report.fit, *report.comparison));
            } else {
                write_text(*out / "rates.json",
                           json{{"error", report.fit_error}}.dump(2) + "\n");
            }
        }
    }

    if (out) {
        write_text(*out / "ne.json", ne_to_json(ne, &*report.ne));
        json summary = {
            {"constants",
             {{"mu", k.mu},
              {"kappa1", k.kappa1},
              {"kappa2", k.kappa2},
              {"kappa3", k.kappa3},
              {"mu_exact", k.mu_exact ? json(*k.mu_exact) : json(nullptr)},
              {"estimated", k.estimated}}},
            {"graph_lambda2", report.graph_lambda2 ? json(*report.graph_lambda2) : json(nullptr)},
            {"small_gain", cert.small_gain},
            {"gain_product", cert.gain_product},
            {"simulated", report.simulated},
            {"monitors_ok", report.monitors_ok},
            {"notes", report.notes},
        };
        if (report.sim) {
            summary["monitors"] = monitors_json(*report.sim);
            const SimResult& sim = *report.sim;
            summary["final_error"] = (sim.final_state.x - ne.x).norm();
        }
        if (report.fit) {
            summary["omega_hat"] = report.fit->omega_hat;
            summary["rate_verdict"] = to_string(report.comparison->verdict);
        }
        write_text(*out / "report.json", summary.dump(2) + "\n");
    }
    return report;
}

std::vector<SweepRow> sweep_beta_min(const ExperimentConfig& cfg,
                                     const std::optional<std::filesystem::path>& out) {
    const ExperimentReport base = certify_only(cfg, std::nullopt);
    const Constants& c = base.certificate.constants;
    const ParameterBounds bounds = parameter_bounds(c);
    const double lo = cfg.sweep.alpha_min.value_or(bounds.alpha_max * 0.01);
    const double hi = cfg.sweep.alpha_max.value_or(bounds.alpha_max * 0.99);
    if (!(lo > 0.0 && lo < hi && hi < bounds.alpha_max)) {
        throw Error("certify", "sweep range must satisfy 0 < alpha_min < alpha_max < " +
                                   std::to_string(bounds.alpha_max));
    }
    std::vector<SweepRow> rows;
    const std::size_t n = cfg.sweep.points;
    for (std::size_t k = 0; k < n; ++k) {
        const double alpha = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
        rows.push_back({alpha, bounds.beta_min(alpha), gains(c, alpha, cfg.beta)});
    }
    if (out) {
        std::filesystem::create_directories(*out);
        std::ostringstream os;
        os << "alpha,beta_min,omega1,gamma1,omega2,gamma2,gain_product\n";
        char buf[256];
        for (const SweepRow& r : rows) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.alpha,
                          r.beta_min, r.certificate.omega1, r.certificate.gamma1,
                          r.certificate.omega2, r.certificate.gamma2, r.certificate.gain_product);
            os << buf;
        }
        write_text(*out / "beta_min_curve.csv", os.str());
        write_text(*out / "certificate.txt", certificate_to_text(base.certificate));
        write_text(*out / "certificate.json", certificate_to_json(base.certificate));
    }
    return rows;
}

}  // namespace aggnash
