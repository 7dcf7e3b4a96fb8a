#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "torobs/io.hpp"
#include "torobs/verification.hpp"

namespace torobs {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailedVerification = 1;
inline constexpr int kExitInvalidConfig = 2;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    std::string command;  // clusters | orbits | gram | solve | scan | verify
    std::size_t dimension = 1;
    std::uint64_t seed = 1;
    std::string out_dir = ".";

    // geometry
    AffineSublattice gamma;   // defaults to Z^d
    Sublattice lambda;        // defaults to gamma direction

    // numeric parameters
    Int scale = 1;            // R
    Int freq_bound = 8;       // F
    double b = 0.6;
    double eps = 0.1;
    double tol = 1e-10;
    Int window = 160;         // solver box |n+|k|^2| bound
    Int time_bound = 0;       // 0 -> derived default max(10R + F^2, user)
    int samples = 50;
    double p = 4.0;
    std::vector<Int> f_list;
    std::vector<double> delta_grid{0.125, 0.25, 0.5, 1.0};
    bool approximate = false;

    CutoffSpec cutoff;

    std::optional<PotentialSpec> potential;
    std::optional<ChiSquared> chi;
    std::optional<SpectrumField> u0;

    std::string scan_kind;  // strichartz | ui | ynorm | obs
    std::string suite;      // lattice | clusters | spectral | duhamel | observability | all

    json resolved;  // the full effective configuration, embedded in reports
};

namespace cli_detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(path + ": unknown key '" + it.key() + "'");
}

inline std::vector<IntVector> parse_basis(const json& j, std::size_t d, const std::string& path) {
    std::vector<IntVector> out;
    if (!j.is_array()) throw ConfigError(path + ": expected an array of integer vectors");
    for (auto& row : j) {
        if (!row.is_array() || row.size() != d)
            throw ConfigError(path + ": vector length must equal dimension");
        out.push_back(IntVector(row.get<std::vector<Int>>()));
    }
    return out;
}

inline SpectrumField parse_modes(const json& j, std::size_t d, const std::string& path,
                                 bool spatial_only) {
    SpectrumField f(d);
    if (!j.is_array()) throw ConfigError(path + ": expected an array of mode records");
    for (auto& rec : j) {
        reject_unknown(rec, {"n", "k", "re", "im"}, path);
        Int n = rec.value("n", Int(0));
        if (spatial_only && n != 0) throw ConfigError(path + ": modes must be spatial (n = 0)");
        if (!rec.contains("k") || rec["k"].size() != d)
            throw ConfigError(path + ": mode k must have length d");
        IntVector k(rec["k"].get<std::vector<Int>>());
        f.add(FreqPoint(n, k), cplx(rec.value("re", 0.0), rec.value("im", 0.0)));
    }
    f.prune();
    return f;
}

inline ChiSquared parse_chi(const json& j, std::size_t d) {
    reject_unknown(j, {"kind", "time", "space", "modes", "chi_modes"}, "chi");
    std::string kind = j.value("kind", "one");
    if (kind == "one") {
        SpectrumField one(d);
        one.set(FreqPoint(0, IntVector(d)), cplx(1, 0));
        return ChiSquared::from_field(one);
    }
    if (kind == "box") {
        BoxWindow w;
        w.intervals.resize(1 + d);
        if (j.contains("time")) {
            auto t = j["time"].get<std::vector<double>>();
            if (t.size() != 2) throw ConfigError("chi.time: expected [lo, hi]");
            w.intervals[0] = {t[0], t[1]};
        }
        if (j.contains("space")) {
            if (j["space"].size() != d) throw ConfigError("chi.space: need one entry per axis");
            for (std::size_t a = 0; a < d; ++a) {
                if (j["space"][a].is_null()) continue;
                auto iv = j["space"][a].get<std::vector<double>>();
                if (iv.size() != 2) throw ConfigError("chi.space: expected [lo, hi] or null");
                w.intervals[1 + a] = {iv[0], iv[1]};
            }
        }
        return ChiSquared::box(d, w);
    }
    if (kind == "modes")  // |χ|² given directly as a trig polynomial
        return ChiSquared::from_field(parse_modes(j.at("modes"), d, "chi.modes", false));
    if (kind == "multiplier")  // χ given as a trig polynomial, squared here
        return ChiSquared::from_multiplier(parse_modes(j.at("chi_modes"), d, "chi.chi_modes", false));
    throw ConfigError("chi.kind: unknown kind '" + kind + "'");
}

}  // namespace cli_detail

// Parses and validates a JSON configuration; throws ConfigError naming the
// offending field.
inline RunConfig parse_config(const json& root) {
    using cli_detail::reject_unknown;
    reject_unknown(root,
                   {"command", "dimension", "seed", "out", "geometry", "params", "potential",
                    "chi", "u0", "scan", "suite", "cutoff"},
                   "config");
    RunConfig cfg;
    if (!root.contains("command")) throw ConfigError("config.command: required");
    cfg.command = root["command"].get<std::string>();
    static const std::set<std::string> commands{"clusters", "orbits", "gram",
                                                "solve",    "scan",   "verify"};
    if (!commands.count(cfg.command))
        throw ConfigError("config.command: unknown command '" + cfg.command + "'");

    cfg.dimension = root.value("dimension", 1);
    if (cfg.dimension < 1 || cfg.dimension > 4)
        throw ConfigError("config.dimension: must lie in [1, 4]");
    cfg.seed = root.value("seed", 1);
    cfg.out_dir = root.value("out", ".");
    const std::size_t d = cfg.dimension;

    cfg.gamma = AffineSublattice::full(d);
    cfg.lambda = Sublattice::full(d);
    if (root.contains("geometry")) {
        const json& g = root["geometry"];
        reject_unknown(g, {"gamma_offset", "gamma_basis", "lambda_basis"}, "geometry");
        Sublattice dir = Sublattice::full(d);
        if (g.contains("gamma_basis"))
            dir = Sublattice::from_generators(
                d, cli_detail::parse_basis(g["gamma_basis"], d, "geometry.gamma_basis"));
        IntVector off(d);
        if (g.contains("gamma_offset")) {
            auto v = g["gamma_offset"].get<std::vector<Int>>();
            if (v.size() != d) throw ConfigError("geometry.gamma_offset: length must equal dimension");
            off = IntVector(v);
        }
        cfg.gamma = AffineSublattice(off, dir);
        cfg.lambda = g.contains("lambda_basis")
                         ? Sublattice::from_generators(d, cli_detail::parse_basis(
                                                              g["lambda_basis"], d,
                                                              "geometry.lambda_basis"))
                         : dir;
    }

    if (root.contains("params")) {
        const json& p = root["params"];
        reject_unknown(p,
                       {"R", "F", "b", "eps", "tol", "window", "time_bound", "samples", "p",
                        "f_list", "delta_grid", "approximate"},
                       "params");
        cfg.scale = p.value("R", cfg.scale);
        if (cfg.scale < 1) throw ConfigError("params.R: must be >= 1");
        cfg.freq_bound = p.value("F", cfg.freq_bound);
        if (cfg.freq_bound < 0) throw ConfigError("params.F: must be >= 0");
        cfg.b = p.value("b", cfg.b);
        if (!(cfg.b > 0.5 && cfg.b < 1.0)) throw ConfigError("params.b: must lie in (1/2, 1)");
        cfg.eps = p.value("eps", cfg.eps);
        if (!(cfg.eps > 0.0 && cfg.eps <= cfg.b)) throw ConfigError("params.eps: must lie in (0, b]");
        cfg.tol = p.value("tol", cfg.tol);
        if (!(cfg.tol > 0)) throw ConfigError("params.tol: must be positive");
        cfg.window = p.value("window", cfg.window);
        if (cfg.window < 1) throw ConfigError("params.window: must be >= 1");
        cfg.time_bound = p.value("time_bound", cfg.time_bound);
        if (cfg.time_bound < 0) throw ConfigError("params.time_bound: must be >= 0");
        cfg.samples = p.value("samples", cfg.samples);
        if (cfg.samples < 1) throw ConfigError("params.samples: must be >= 1");
        cfg.p = p.value("p", cfg.p);
        if (cfg.p < 2.0) throw ConfigError("params.p: must be >= 2");
        if (p.contains("f_list")) {
            cfg.f_list = p["f_list"].get<std::vector<Int>>();
            for (std::size_t i = 0; i < cfg.f_list.size(); ++i) {
                if (cfg.f_list[i] < 0) throw ConfigError("params.f_list: entries must be >= 0");
                if (i > 0 && cfg.f_list[i] <= cfg.f_list[i - 1])
                    throw ConfigError("params.f_list: must be strictly increasing");
            }
        }
        if (p.contains("delta_grid")) {
            cfg.delta_grid = p["delta_grid"].get<std::vector<double>>();
            for (double v : cfg.delta_grid)
                if (!(v > 0.0 && v <= 1.0)) throw ConfigError("params.delta_grid: entries in (0, 1]");
        }
        cfg.approximate = p.value("approximate", false);
    }

    if (root.contains("cutoff")) {
        const json& c = root["cutoff"];
        reject_unknown(c, {"half_width", "plateau", "fourier_truncation"}, "cutoff");
        cfg.cutoff.half_width = c.value("half_width", cfg.cutoff.half_width);
        cfg.cutoff.plateau = c.value("plateau", cfg.cutoff.plateau);
        cfg.cutoff.fourier_truncation = c.value("fourier_truncation", cfg.cutoff.fourier_truncation);
        try {
            cfg.cutoff.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("cutoff: ") + e.what());
        }
    }

    if (root.contains("potential")) {
        const json& v = root["potential"];
        reject_unknown(v, {"modes"}, "potential");
        SpectrumField f = cli_detail::parse_modes(v.at("modes"), d, "potential.modes", true);
        std::vector<std::pair<IntVector, cplx>> modes;
        for (auto& [pt, a] : f.items_sorted()) modes.emplace_back(pt.k, a);
        try {
            cfg.potential = PotentialSpec::from_modes(d, modes);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("potential.modes: ") + e.what());
        }
    }

    if (root.contains("chi")) cfg.chi = cli_detail::parse_chi(root["chi"], d);
    if (root.contains("u0"))
        cfg.u0 = cli_detail::parse_modes(root["u0"].at("modes"), d, "u0.modes", true);

    if (root.contains("scan")) {
        const json& s = root["scan"];
        reject_unknown(s, {"kind"}, "scan");
        cfg.scan_kind = s.value("kind", "");
        static const std::set<std::string> kinds{"strichartz", "ui", "ynorm", "obs"};
        if (!kinds.count(cfg.scan_kind))
            throw ConfigError("scan.kind: unknown kind '" + cfg.scan_kind + "'");
    }
    if (root.contains("suite")) {
        cfg.suite = root["suite"].get<std::string>();
        static const std::set<std::string> suites{"lattice",  "clusters",      "spectral",
                                                  "duhamel",  "observability", "all"};
        if (!suites.count(cfg.suite))
            throw ConfigError("suite: unknown suite '" + cfg.suite + "'");
    }

    // resolved config with every default made explicit, for report embedding
    json r = root;
    r["command"] = cfg.command;
    r["dimension"] = cfg.dimension;
    r["seed"] = cfg.seed;
    r["out"] = cfg.out_dir;
    r["params"]["R"] = cfg.scale;
    r["params"]["F"] = cfg.freq_bound;
    r["params"]["b"] = cfg.b;
    r["params"]["eps"] = cfg.eps;
    r["params"]["tol"] = cfg.tol;
    r["params"]["window"] = cfg.window;
    r["params"]["time_bound"] = cfg.time_bound;
    r["params"]["samples"] = cfg.samples;
    r["params"]["p"] = cfg.p;
    r["params"]["f_list"] = cfg.f_list;
    r["params"]["delta_grid"] = cfg.delta_grid;
    r["params"]["approximate"] = cfg.approximate;
    r["cutoff"]["half_width"] = cfg.cutoff.half_width;
    r["cutoff"]["plateau"] = cfg.cutoff.plateau;
    r["cutoff"]["fourier_truncation"] = cfg.cutoff.fourier_truncation;
    cfg.resolved = r;
    return cfg;
}

namespace cli_detail {

inline json report_envelope(const RunConfig& cfg) {
    json j;
    j["version"] = kVersionString;
    j["config"] = cfg.resolved;
    return j;
}

inline void write_report(const RunConfig& cfg, const std::string& name, const json& body) {
    std::filesystem::create_directories(cfg.out_dir);
    json j = report_envelope(cfg);
    j["report"] = body;
    write_file((std::filesystem::path(cfg.out_dir) / name).string(), j.dump(2) + "\n");
}

inline void write_csv(const RunConfig& cfg, const std::string& name, const std::string& body) {
    std::filesystem::create_directories(cfg.out_dir);
    write_file((std::filesystem::path(cfg.out_dir) / name).string(), body);
}

inline int run_clusters(const RunConfig& cfg) {
    ClusterDecomposition dec = decompose(cfg.gamma, cfg.scale, cfg.freq_bound);
    ClusterStats st = cluster_stats(dec);
    write_csv(cfg, "clusters.csv", csv_clusters(st));
    json body;
    body["cluster_count"] = dec.clusters.size();
    body["flat"] = st.flat_count;
    body["sharp"] = st.sharp_count;
    body["min_separation_sq"] = st.min_separation_sq;
    std::size_t points = 0;
    for (auto& c : dec.clusters) points += c.points.size();
    body["point_count"] = points;
    write_report(cfg, "clusters.json", body);
    return kExitOk;
}

inline int run_orbits(const RunConfig& cfg) {
    OrbitCensus census = orbit_census(cfg.lambda);
    json body;
    body["class_count"] = census.class_count;
    json reps = json::array();
    std::ostringstream csv;
    csv << "class,offset\n";
    for (std::size_t i = 0; i < census.class_reps.size(); ++i) {
        reps.push_back(census.class_reps[i].offset().coords);
        csv << i << ',';
        const auto& off = census.class_reps[i].offset().coords;
        for (std::size_t j = 0; j < off.size(); ++j) csv << off[j] << (j + 1 < off.size() ? ' ' : '\n');
    }
    body["class_reps"] = reps;
    body["gram_det"] = cfg.lambda.gram_det();
    write_report(cfg, "orbits.json", body);
    write_csv(cfg, "orbits.csv", csv.str());
    return kExitOk;
}

inline int run_gram(const RunConfig& cfg) {
    if (!cfg.chi) throw ConfigError("chi: required for the gram command");
    std::optional<PotentialSpec> pot;
    if (cfg.potential) pot = project_potential(*cfg.potential, cfg.gamma.direction());
    ObservationSetup setup = ObservationSetup::over_box(*cfg.chi, cfg.gamma, cfg.freq_bound, pot);
    ObservabilityReport rep = pot ? gram_potential(setup) : gram_free(setup);
    write_report(cfg, "gram.json", observability_report_to_json(rep));
    std::vector<ScanPoint> single{{cfg.freq_bound, rep.lambda_min, rep.lambda_max, rep.obs_constant}};
    write_csv(cfg, "gram.csv", csv_scan(single, cfg.seed));
    return kExitOk;
}

inline int run_solve(const RunConfig& cfg) {
    if (!cfg.u0) throw ConfigError("u0: required for the solve command");
    PotentialSpec v = cfg.potential ? *cfg.potential : PotentialSpec::from_modes(cfg.dimension, {});
    SpectrumField g(cfg.dimension);
    TruncationBox box{cfg.freq_bound, cfg.window};
    SolveOptions opts;
    opts.b = cfg.b;
    opts.tol = cfg.tol;
    SolveReport rep;
    if (cfg.approximate) {
        TemporalCoefficients eta = cutoff_fourier(cfg.cutoff, CutoffWeight::eta);
        TemporalCoefficients t_eta = cutoff_fourier(cfg.cutoff, CutoffWeight::t_eta);
        rep = solve_approximate(*cfg.u0, v, eta.as_field(cfg.dimension),
                                t_eta.as_field(cfg.dimension), cfg.gamma.direction(), g, box, opts);
        rep.cutoff_used = cfg.cutoff;
    } else {
        rep = solve_periodized(*cfg.u0, v, cfg.gamma.direction(), g, cfg.cutoff, box, opts);
    }
    write_report(cfg, "solve.json", solve_report_to_json(rep));
    return rep.converged ? kExitOk : kExitFailedVerification;
}

inline int run_scan(const RunConfig& cfg) {
    if (cfg.scan_kind.empty()) throw ConfigError("scan.kind: required for the scan command");
    std::vector<Int> f_list = cfg.f_list;
    if (f_list.empty()) f_list = {cfg.freq_bound};
    if (cfg.scan_kind == "strichartz") {
        int p_int = static_cast<int>(cfg.p);
        if (p_int % 2 != 0 || static_cast<double>(p_int) != cfg.p)
            throw ConfigError("params.p: strichartz scan needs an even integer p");
        auto rows = strichartz_scan(cfg.dimension, p_int, f_list, cfg.samples, cfg.seed);
        write_csv(cfg, "strichartz.csv", csv_strichartz(rows));
        return kExitOk;
    }
    if (cfg.scan_kind == "ui") {
        UIProfile prof =
            ui_profile(cfg.dimension, cfg.freq_bound, cfg.samples, cfg.delta_grid, cfg.p, cfg.seed);
        write_csv(cfg, "ui.csv", csv_ui_profile(prof));
        return kExitOk;
    }
    if (cfg.scan_kind == "ynorm") {
        if (!cfg.chi) throw ConfigError("chi: required for ynorm scans");
        std::ostringstream os;
        os << "F,y_norm_power,y_norm_dense\n";
        for (Int f : f_list) {
            YNormEstimate est = y_norm_estimate(*cfg.chi, cfg.dimension, f);
            os << f << ',' << format_double(est.power_iteration) << ','
               << format_double(est.dense) << '\n';
        }
        write_csv(cfg, "ynorm.csv", os.str());
        return kExitOk;
    }
    // obs
    if (!cfg.chi) throw ConfigError("chi: required for obs scans");
    std::optional<PotentialSpec> pot;
    if (cfg.potential) pot = project_potential(*cfg.potential, cfg.gamma.direction());
    auto scan = obs_constant_scan(*cfg.chi, cfg.gamma, f_list, pot);
    write_csv(cfg, "obs_scan.csv", csv_scan(scan, cfg.seed));
    return kExitOk;
}

inline int run_verify(const RunConfig& cfg, std::ostream& os) {
    std::string suite = cfg.suite.empty() ? "all" : cfg.suite;
    std::vector<CheckResult> results = run_suite(suite);
    bool all_pass = true;
    json body = json::array();
    for (const CheckResult& r : results) {
        os << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " — " << r.detail
           << '\n';
        all_pass = all_pass && r.pass;
        body.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    write_report(cfg, "verify.json", body);
    return all_pass ? kExitOk : kExitFailedVerification;
}

}  // namespace cli_detail

// Runs the configured experiment; returns the process exit code.
inline int dispatch(const RunConfig& cfg, std::ostream& os = std::cout) {
    try {
        if (cfg.command == "clusters") return cli_detail::run_clusters(cfg);
        if (cfg.command == "orbits") return cli_detail::run_orbits(cfg);
        if (cfg.command == "gram") return cli_detail::run_gram(cfg);
        if (cfg.command == "solve") return cli_detail::run_solve(cfg);
        if (cfg.command == "scan") return cli_detail::run_scan(cfg);
        if (cfg.command == "verify") return cli_detail::run_verify(cfg, os);
    } catch (const ConfigError& e) {
        os << "config error: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        os << "run failed: " << e.what() << '\n';
        return kExitFailedVerification;
    }
    os << "config error: unknown command\n";
    return kExitInvalidConfig;
}

}  // namespace torobs
