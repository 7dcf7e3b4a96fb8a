#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "torobs/common.hpp"
#include "torobs/duhamel.hpp"
#include "torobs/observability.hpp"
#include "torobs/paraboloid.hpp"
#include "torobs/probes.hpp"
#include "torobs/spectrum.hpp"

namespace torobs {

inline constexpr const char* kVersionString = "torobs 0.1.0";

using json = nlohmann::json;

// JSON numbers lose the shortest-roundtrip guarantee in some printers; fields
// are serialized with explicit re/im doubles which nlohmann emits faithfully.
inline json field_to_json(const SpectrumField& f) {
    json out = json::array();
    for (auto& [p, a] : f.items_sorted()) {
        json rec;
        rec["n"] = p.n;
        rec["k"] = p.k.coords;
        rec["re"] = a.real();
        rec["im"] = a.imag();
        out.push_back(rec);
    }
    return out;
}

inline SpectrumField field_from_json(const json& j, std::size_t dim) {
    SpectrumField f(dim);
    for (auto& rec : j) {
        IntVector k(rec.at("k").get<std::vector<Int>>());
        f.add(FreqPoint(rec.at("n").get<Int>(), k),
              cplx(rec.at("re").get<double>(), rec.at("im").get<double>()));
    }
    f.prune();
    return f;
}

inline json solve_report_to_json(const SolveReport& rep) {
    json j;
    j["iterations"] = rep.iterations;
    j["residual_xb"] = rep.residual_xb;
    j["contraction_estimate"] = rep.contraction_estimate;
    j["converged"] = rep.converged;
    j["b"] = rep.b;
    j["cutoff"] = {{"half_width", rep.cutoff_used.half_width},
                   {"plateau", rep.cutoff_used.plateau},
                   {"fourier_truncation", rep.cutoff_used.fourier_truncation}};
    j["solution"] = field_to_json(rep.solution);
    return j;
}

inline json observability_report_to_json(const ObservabilityReport& rep) {
    json j;
    j["method"] = rep.method;
    j["mode_count"] = rep.modes.size();
    j["lambda_min"] = rep.lambda_min;
    j["lambda_max"] = rep.lambda_max;
    j["obs_constant"] = rep.obs_constant;
    j["hermitian_defect"] = rep.hermitian_defect;
    j["eigenvalues"] = rep.eigenvalues;
    json modes = json::array();
    for (auto& k : rep.modes) modes.push_back(k.coords);
    j["modes"] = modes;
    return j;
}

// ---------------------------------------------------------------------------
// CSV emission: 17 significant digits, '.' decimal point, no locale
// ---------------------------------------------------------------------------

inline std::string csv_clusters(const ClusterStats& stats) {
    std::ostringstream os;
    os << "id,size,diameter_sq,kind,truncated,hull_rank,max_shadow_proj\n";
    for (auto& row : stats.rows) {
        os << row.id << ',' << row.size << ',' << row.diameter_sq << ','
           << (row.kind == ClusterKind::flat ? "flat" : "sharp") << ','
           << (row.truncated ? 1 : 0) << ',' << row.hull_rank << ','
           << format_double(row.max_shadow_proj) << '\n';
    }
    return os.str();
}

inline std::string csv_scan(const std::vector<ScanPoint>& scan, std::uint64_t seed) {
    std::ostringstream os;
    os << "F,lambda_min,lambda_max,obs_constant,seed\n";
    for (auto& pt : scan)
        os << pt.freq_bound << ',' << format_double(pt.lambda_min) << ','
           << format_double(pt.lambda_max) << ',' << format_double(pt.obs_constant) << ',' << seed
           << '\n';
    return os.str();
}

inline std::string csv_strichartz(const std::vector<StrichartzRow>& rows) {
    std::ostringstream os;
    os << "F,sup_random,ratio_uniform,ratio_single,seed\n";
    for (auto& r : rows)
        os << r.freq_bound << ',' << format_double(r.sup_random) << ','
           << format_double(r.ratio_uniform) << ',' << format_double(r.ratio_single) << ','
           << r.seed << '\n';
    return os.str();
}

inline std::string csv_ui_profile(const UIProfile& prof) {
    std::ostringstream os;
    os << "delta,worst_mass,p,moment_bound,F,samples,seed\n";
    for (std::size_t i = 0; i < prof.delta_grid.size(); ++i)
        os << format_double(prof.delta_grid[i]) << ',' << format_double(prof.worst_mass[i]) << ','
           << format_double(prof.p) << ',' << format_double(prof.moment_bound) << ','
           << prof.freq_bound << ',' << prof.sample_count << ',' << prof.seed << '\n';
    return os.str();
}

inline std::string csv_grid(const Grid& g) {
    std::ostringstream os;
    os << "indices,re,im\n";
    std::vector<std::size_t> idx(g.shape.size(), 0);
    for (std::size_t flat = 0; flat < g.data.size(); ++flat) {
        for (std::size_t a = 0; a < idx.size(); ++a) os << idx[a] << (a + 1 < idx.size() ? ' ' : ',');
        os << format_double(g.data[flat].real()) << ',' << format_double(g.data[flat].imag())
           << '\n';
        for (std::size_t axis = g.shape.size(); axis-- > 0;) {
            if (++idx[axis] < g.shape[axis]) break;
            idx[axis] = 0;
        }
    }
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << content;
}

}  // namespace torobs
