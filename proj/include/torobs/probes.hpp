#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "torobs/common.hpp"
#include "torobs/fft.hpp"
#include "torobs/observability.hpp"
#include "torobs/spectrum.hpp"

namespace torobs {

// ---------------------------------------------------------------------------
// Random data
// ---------------------------------------------------------------------------

// L²-normalized initial datum with complex Gaussian amplitudes on |k| <= F.
inline SpectrumField random_unit_datum(Rng& rng, std::size_t d, Int freq_bound) {
    std::vector<IntVector> modes = boxed_points(AffineSublattice::full(d), freq_bound);
    SpectrumField u0(d);
    double mass = 0.0;
    for (auto& k : modes) {
        cplx a = rng.complex_gaussian();
        u0.set(FreqPoint(0, k), a);
        mass += std::norm(a);
    }
    return (1.0 / std::sqrt(mass)) * u0;
}

// ---------------------------------------------------------------------------
// Uniform-integrability profile of |e^{itΔ}u0|²
// ---------------------------------------------------------------------------

struct UIProfile {
    std::vector<double> delta_grid;
    std::vector<double> worst_mass;   // per δ, max over samples
    double moment_bound = 0.0;        // sup of Φ-moments, Φ(s) = |s|^{p/2}
    double p = 2.0;
    Int freq_bound = 0;
    int sample_count = 0;
    std::uint64_t seed = 0;
};

// Greedy largest-cells mass: the measurable-set supremum at grid resolution
// is attained by unions of the largest cells.
inline UIProfile ui_profile(std::size_t d, Int freq_bound, int sample_count,
                            std::vector<double> delta_grid, double p, std::uint64_t seed) {
    if (p < 2.0) throw std::invalid_argument("ui_profile requires p >= 2");
    std::sort(delta_grid.begin(), delta_grid.end());
    UIProfile prof;
    prof.delta_grid = delta_grid;
    prof.worst_mass.assign(delta_grid.size(), 0.0);
    prof.p = p;
    prof.freq_bound = freq_bound;
    prof.sample_count = sample_count;
    prof.seed = seed;

    const std::size_t nt = next_pow2(2 * static_cast<std::size_t>(freq_bound * freq_bound) + 2);
    const std::size_t nx = next_pow2(2 * static_cast<std::size_t>(freq_bound) + 2);
    Rng base(seed);
    for (int s = 0; s < sample_count; ++s) {
        Rng sub = base.substream(static_cast<std::uint64_t>(s));
        SpectrumField u0 = random_unit_datum(sub, d, freq_bound);
        Grid g = evaluate_grid(free_evolve(u0), nt, nx);
        std::vector<double> density(g.data.size());
        for (std::size_t i = 0; i < density.size(); ++i) density[i] = std::norm(g.data[i]);
        std::sort(density.begin(), density.end(), std::greater<double>());
        const double inv_n = 1.0 / static_cast<double>(density.size());
        std::vector<double> prefix(density.size() + 1, 0.0);
        for (std::size_t i = 0; i < density.size(); ++i) prefix[i + 1] = prefix[i] + density[i];
        for (std::size_t di = 0; di < delta_grid.size(); ++di) {
            std::size_t cells = static_cast<std::size_t>(
                std::llround(delta_grid[di] * static_cast<double>(density.size())));
            cells = std::min(cells, density.size());
            prof.worst_mass[di] = std::max(prof.worst_mass[di], prefix[cells] * inv_n);
        }
        double moment = 0.0;
        for (std::size_t i = 0; i < density.size(); ++i) moment += std::pow(density[i], p / 2.0);
        prof.moment_bound = std::max(prof.moment_bound, moment * inv_n);
    }
    return prof;
}

// ---------------------------------------------------------------------------
// Empirical Strichartz-quotient scans (reported, never asserted)
// ---------------------------------------------------------------------------

struct StrichartzRow {
    Int freq_bound = 0;
    double sup_random = 0.0;    // max ||u||_p / ||u0||_2 over random data
    double ratio_uniform = 0.0; // flat-amplitude datum
    double ratio_single = 0.0;  // single mode (exactly 1)
    std::uint64_t seed = 0;
};

// ||e^{itΔ}u0||_{L^p} for even p via exact convolution powers:
// ||u||_p^p = ||u^{p/2}||_2².
inline double lp_norm_free_wave(const SpectrumField& u0, int p) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("p must be even and >= 2");
    SpectrumField u = free_evolve(u0);
    SpectrumField pw = u;
    for (int i = 1; i < p / 2; ++i) pw = multiply(pw, u);
    return std::pow(l2_norm_sq(pw), 1.0 / static_cast<double>(p));
}

inline std::vector<StrichartzRow> strichartz_scan(std::size_t d, int p,
                                                  const std::vector<Int>& freq_bounds,
                                                  int sample_count, std::uint64_t seed) {
    std::vector<StrichartzRow> rows;
    Rng base(seed);
    for (Int f : freq_bounds) {
        StrichartzRow row;
        row.freq_bound = f;
        row.seed = seed;
        for (int s = 0; s < sample_count; ++s) {
            Rng sub = base.substream(static_cast<std::uint64_t>(f) * 1000003ULL +
                                     static_cast<std::uint64_t>(s));
            SpectrumField u0 = random_unit_datum(sub, d, f);
            row.sup_random = std::max(row.sup_random, lp_norm_free_wave(u0, p));
        }
        // designed candidates: flat amplitudes (Dirichlet-type) and one mode
        std::vector<IntVector> modes = boxed_points(AffineSublattice::full(d), f);
        SpectrumField flat(d);
        double amp = 1.0 / std::sqrt(static_cast<double>(modes.size()));
        for (auto& k : modes) flat.set(FreqPoint(0, k), cplx(amp, 0));
        row.ratio_uniform = lp_norm_free_wave(flat, p);
        SpectrumField single(d);
        single.set(FreqPoint(0, IntVector(d)), cplx(1, 0));
        row.ratio_single = lp_norm_free_wave(single, p);
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Riemann-integrable multiplier approximation
// ---------------------------------------------------------------------------

struct RiemannReport {
    SpectrumField approximant;
    double oscillation_measure = 0.0;   // normalized measure of the flagged set
    double sup_error_off_set = 0.0;     // sup |A - χ| over unflagged cells
    Int degree = 0;                     // per-axis degree of the approximant
    int level = 0;
};

namespace detail {

// coefficients of the Jackson kernel of order n (degree 2n-2), nonnegative
// with mean one
inline std::vector<double> jackson_coefficients(int order, std::size_t grid) {
    std::vector<cplx> samples(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        double t = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(grid);
        double s = std::sin(0.5 * t);
        double v;
        if (std::abs(s) < 1e-12) {
            v = std::pow(static_cast<double>(order), 4);
        } else {
            double q = std::sin(0.5 * order * t) / s;
            v = q * q * q * q;
        }
        samples[j] = cplx(v, 0);
    }
    dft_inplace(samples, -1);
    std::vector<double> coeff(static_cast<std::size_t>(2 * order - 1), 0.0);
    double c0 = samples[0].real();
    for (int m = 0; m <= 2 * (order - 1); ++m)
        coeff[static_cast<std::size_t>(m)] = samples[static_cast<std::size_t>(m)].real() / c0;
    return coeff;  // index |m| (symmetric), normalized so coeff[0] = 1
}

// sliding max/min over index windows [i-w, i+w], periodic
inline void sliding_extrema(std::vector<double>& vals, std::size_t n_axis, std::size_t stride,
                            std::size_t lines, std::size_t w, bool take_max) {
    std::vector<double> line(n_axis), out(n_axis);
    for (std::size_t l = 0; l < lines; ++l) {
        std::size_t base = (l / stride) * stride * n_axis + (l % stride);
        for (std::size_t i = 0; i < n_axis; ++i) line[i] = vals[base + i * stride];
        for (std::size_t i = 0; i < n_axis; ++i) {
            double best = line[i];
            for (std::size_t o = 1; o <= w; ++o) {
                best = take_max ? std::max({best, line[(i + o) % n_axis],
                                            line[(i + n_axis - o % n_axis) % n_axis]})
                                : std::min({best, line[(i + o) % n_axis],
                                            line[(i + n_axis - o % n_axis) % n_axis]});
            }
            out[i] = best;
        }
        for (std::size_t i = 0; i < n_axis; ++i) vals[base + i * stride] = out[i];
    }
}

}  // namespace detail

// Mollifies a bounded grid function with a tensor Jackson kernel. Grid values
// of the approximant are convex combinations of χ values, so the (grid) sup
// norm never grows. The oscillation set collects the cells whose δ-window
// oscillation reaches 1/level, with δ = π/level^{3/2}: small enough that an
// interval indicator flags measure at most 2/level and that the kernel mass
// outside δ/2 still decays in the level, yet vanishing slower than 1/level so
// any continuous χ is eventually unflagged everywhere.
inline RiemannReport riemann_approximate(const Grid& chi_grid, int level,
                                         std::size_t spatial_dim) {
    if (level < 1) throw std::invalid_argument("level must be >= 1");
    const std::vector<std::size_t>& shape = chi_grid.shape;
    if (shape.size() != 1 + spatial_dim) throw std::invalid_argument("grid rank mismatch");

    const int order = level * level + 2;
    RiemannReport rep;
    rep.level = level;
    rep.degree = 2 * (order - 1);
    for (std::size_t s : shape)
        if (s > 1 && s <= 2 * static_cast<std::size_t>(rep.degree))
            throw std::invalid_argument("grid too coarse for the requested level");

    // approximant coefficients: grid DFT × product of kernel coefficients
    std::vector<cplx> data = chi_grid.data;
    for (std::size_t axis = 0; axis < shape.size(); ++axis)
        if (shape[axis] > 1) dft_axis(data, shape, axis, -1);
    std::vector<std::vector<double>> kernels(shape.size());
    for (std::size_t axis = 0; axis < shape.size(); ++axis)
        if (shape[axis] > 1)
            kernels[axis] = detail::jackson_coefficients(order, next_pow2(8 * order + 8));
    const double scale = 1.0 / static_cast<double>(chi_grid.total());
    SpectrumField approx(spatial_dim);
    {
        std::vector<std::size_t> idx(shape.size(), 0);
        for (std::size_t flat = 0; flat < data.size(); ++flat) {
            cplx a = data[flat] * scale;
            bool keep = std::abs(a) >= 1e-16;
            FreqPoint p;
            p.k = IntVector(spatial_dim);
            for (std::size_t axis = 0; axis < shape.size() && keep; ++axis) {
                Int v = static_cast<Int>(idx[axis]);
                Int nax = static_cast<Int>(shape[axis]);
                Int centered = v * 2 >= nax ? v - nax : v;
                if (shape[axis] > 1) {
                    Int m = std::abs(centered);
                    if (m > rep.degree) {
                        keep = false;
                        break;
                    }
                    a *= kernels[axis][static_cast<std::size_t>(m)];
                }
                if (axis == 0)
                    p.n = centered;
                else
                    p.k[axis - 1] = centered;
            }
            if (keep && std::abs(a) >= 1e-16) approx.set(p, a);
            for (std::size_t axis = shape.size(); axis-- > 0;) {
                if (++idx[axis] < shape[axis]) break;
                idx[axis] = 0;
            }
        }
    }
    rep.approximant = approx;

    // oscillation set from separable sliding window extrema
    std::vector<double> maxs(chi_grid.data.size()), mins(chi_grid.data.size());
    for (std::size_t i = 0; i < chi_grid.data.size(); ++i)
        maxs[i] = mins[i] = chi_grid.data[i].real();
    for (std::size_t axis = 0; axis < shape.size(); ++axis) {
        if (shape[axis] <= 1) continue;
        double cell = 2.0 * M_PI / static_cast<double>(shape[axis]);
        double delta = std::max(cell, M_PI / std::pow(level, 1.5) - 2.0 * cell);
        std::size_t w = static_cast<std::size_t>(std::floor(delta / cell));
        std::size_t stride = 1;
        for (std::size_t a2 = axis + 1; a2 < shape.size(); ++a2) stride *= shape[a2];
        std::size_t lines = chi_grid.data.size() / shape[axis];
        detail::sliding_extrema(maxs, shape[axis], stride, lines, w, true);
        detail::sliding_extrema(mins, shape[axis], stride, lines, w, false);
    }
    const double eps_level = 1.0 / level;
    std::size_t flagged = 0;
    double worst = 0.0;
    // evaluate the approximant on the same grid for the off-set error
    Grid eval;
    eval.shape = shape;
    eval.data.assign(chi_grid.data.size(), cplx(0, 0));
    {
        std::vector<cplx> spec(chi_grid.data.size(), cplx(0, 0));
        for (auto& [p, a] : approx.items_sorted()) {
            std::size_t idx = static_cast<std::size_t>(floor_mod(p.n, static_cast<Int>(shape[0])));
            for (std::size_t j = 0; j < spatial_dim; ++j)
                idx = idx * shape[1 + j] +
                      static_cast<std::size_t>(floor_mod(p.k[j], static_cast<Int>(shape[1 + j])));
            spec[idx] += a;
        }
        for (std::size_t axis = 0; axis < shape.size(); ++axis)
            if (shape[axis] > 1) dft_axis(spec, shape, axis, +1);
        eval.data = std::move(spec);
    }
    for (std::size_t i = 0; i < chi_grid.data.size(); ++i) {
        if (maxs[i] - mins[i] >= eps_level) {
            ++flagged;
        } else {
            worst = std::max(worst, std::abs(eval.data[i] - chi_grid.data[i]));
        }
    }
    rep.oscillation_measure = static_cast<double>(flagged) / static_cast<double>(chi_grid.total());
    rep.sup_error_off_set = worst;
    return rep;
}

}  // namespace torobs
