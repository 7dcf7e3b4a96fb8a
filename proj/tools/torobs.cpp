// torobs: observability experiments on frequency-truncated toral Schrödinger
// propagators. Subcommands: clusters, orbits, gram, solve, scan, verify.
#include <clocale>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "torobs/cli.hpp"

namespace {

// line/column of a byte offset, for parse diagnostics
std::pair<int, int> locate(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

struct Overrides {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int dimension = 0;
    long long scale = 0;
    long long freq_bound = 0;
    double b = 0.0;
    double eps = 0.0;
    double tau = 0.0;
    std::string scan_kind;
    std::string suite;

    void apply(torobs::json& root, const std::string& command) const {
        root["command"] = command;
        if (!out_dir.empty()) root["out"] = out_dir;
        if (seed_set) root["seed"] = seed;
        if (dimension > 0) root["dimension"] = dimension;
        if (scale > 0) root["params"]["R"] = scale;
        if (freq_bound > 0) root["params"]["F"] = freq_bound;
        if (b > 0.0) root["params"]["b"] = b;
        if (eps > 0.0) root["params"]["eps"] = eps;
        if (tau > 0.0) root["cutoff"]["half_width"] = tau;
        if (!scan_kind.empty()) root["scan"]["kind"] = scan_kind;
        if (!suite.empty()) root["suite"] = suite;
    }
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--config", ov.config_path, "JSON configuration file");
    cmd->add_option("--out", ov.out_dir, "output directory");
    cmd->add_option("--seed", ov.seed, "random seed")->each([&ov](const std::string&) {
        ov.seed_set = true;
    });
    cmd->add_option("--d", ov.dimension, "spatial dimension");
    cmd->add_option("--r", ov.scale, "cluster scale R");
    cmd->add_option("--f", ov.freq_bound, "frequency bound F");
    cmd->add_option("--b", ov.b, "Bourgain exponent b");
    cmd->add_option("--eps", ov.eps, "far-bound exponent epsilon");
    cmd->add_option("--tau", ov.tau, "cutoff half width");
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C");
    CLI::App app{"observability experiments for periodized Schrödinger propagators"};
    app.require_subcommand(1);

    Overrides ov;
    const char* names[] = {"clusters", "orbits", "gram", "solve", "scan", "verify"};
    const char* descs[] = {"paraboloid cluster decomposition",
                           "orbit census of affine sublattices under the Λ⊥ action",
                           "observability Gram matrix and constant",
                           "periodized fixed-point solver",
                           "scans: strichartz | ui | ynorm | obs",
                           "verification suites"};
    for (int i = 0; i < 6; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descs[i]);
        add_common_flags(sub, ov);
        if (std::string(names[i]) == "scan")
            sub->add_option("--kind", ov.scan_kind, "scan kind: strichartz | ui | ynorm | obs");
        if (std::string(names[i]) == "verify")
            sub->add_option("--suite", ov.suite,
                            "suite: lattice | clusters | spectral | duhamel | observability | all");
    }

    CLI11_PARSE(app, argc, argv);
    std::string command = app.get_subcommands().front()->get_name();

    torobs::json root = torobs::json::object();
    if (!ov.config_path.empty()) {
        std::stringstream buffer;
        if (ov.config_path == "-") {
            buffer << std::cin.rdbuf();
        } else {
            std::ifstream in(ov.config_path, std::ios::binary);
            if (!in) {
                std::cerr << "config error: cannot open " << ov.config_path << '\n';
                return torobs::kExitInvalidConfig;
            }
            buffer << in.rdbuf();
        }
        std::string text = buffer.str();
        try {
            root = torobs::json::parse(text);
        } catch (const torobs::json::parse_error& e) {
            auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
            std::cerr << "config error: " << ov.config_path << ':' << line << ':' << col << ": "
                      << e.what() << '\n';
            return torobs::kExitInvalidConfig;
        }
    }
    ov.apply(root, command);

    torobs::RunConfig cfg;
    try {
        cfg = torobs::parse_config(root);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return torobs::kExitInvalidConfig;
    }
    return torobs::dispatch(cfg);
}
