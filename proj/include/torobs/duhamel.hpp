#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "torobs/common.hpp"
#include "torobs/cutoff.hpp"
#include "torobs/fft.hpp"
#include "torobs/lattice.hpp"
#include "torobs/linalg.hpp"
#include "torobs/spectrum.hpp"

namespace torobs {

// ---------------------------------------------------------------------------
// The operators Θ, T, P of the Duhamel identity
// ---------------------------------------------------------------------------

// Multiplier θ(n,k) = 1/(n+|k|^2) off the paraboloid, 0 on it.
inline SpectrumField theta_apply(const SpectrumField& f) {
    SpectrumField out(f.dim());
    for (auto& [p, a] : f.raw()) {
        Int w = paraboloid_offset(p);
        if (w != 0) out.set(p, a / static_cast<double>(w));
    }
    return out;
}

// T̂f(k) = Σ_n f̂(n,k), collapsing temporal frequencies.
inline SpectrumField op_T(const SpectrumField& f) {
    SpectrumField out(f.dim());
    for (auto& [p, a] : f.items_sorted()) out.add(FreqPoint(0, p.k), a);
    out.prune();
    return out;
}

// P̂f(k) = f̂(-|k|^2, k), the trace on the paraboloid.
inline SpectrumField op_P(const SpectrumField& f) {
    SpectrumField out(f.dim());
    for (auto& [p, a] : f.raw())
        if (paraboloid_offset(p) == 0) out.set(FreqPoint(0, p.k), a);
    return out;
}

// ---------------------------------------------------------------------------
// Truncation boxes: |k| <= F and |n + |k|^2| <= W
// ---------------------------------------------------------------------------

struct TruncationBox {
    Int freq_bound = 0;  // F
    Int window = 0;      // W, distance to the paraboloid

    bool contains(const FreqPoint& p) const {
        if (norm_sq(p.k) > checked_mul(freq_bound, freq_bound)) return false;
        return std::abs(paraboloid_offset(p)) <= window;
    }
};

inline SpectrumField project_box(const SpectrumField& f, const TruncationBox& box) {
    SpectrumField out(f.dim());
    for (auto& [p, a] : f.raw())
        if (box.contains(p)) out.set(p, a);
    return out;
}

namespace detail {

// input modes grouped by spatial frequency, deterministic order
inline std::map<std::vector<Int>, std::vector<std::pair<Int, cplx>>> columns_of(
    const SpectrumField& f) {
    std::map<std::vector<Int>, std::vector<std::pair<Int, cplx>>> cols;
    for (auto& [p, a] : f.items_sorted()) cols[p.k.coords].emplace_back(p.n, a);
    return cols;
}

}  // namespace detail

// Eη·Df assembled on the Fourier side. Direct computation from the Duhamel
// integral D f(t) = -i ∫_0^t e^{i(t-s)Δ} f(s) ds gives, per mode column k with
// ω = n + |k|^2:
//
//   (Eη·Df)^(n,k) = Σ_m [η̂(ω) - η̂(n-m)]·θ(m,k)·f̂(m,k) - i·(tη)^(ω)·f̂(-|k|^2,k),
//
// i.e. the operator identity Eη·D = -Eη·Θ + Eη·U₀TΘ - i·E(tη)·U₀P.
inline SpectrumField duhamel_fourier(const SpectrumField& f, const TemporalCoefficients& eta,
                                     const TemporalCoefficients& t_eta, const TruncationBox& box) {
    SpectrumField out(f.dim());
    const Int m_max = eta.truncation;
    for (auto& [kc, modes] : detail::columns_of(f)) {
        IntVector k(kc);
        const Int ksq = norm_sq(k);
        if (ksq > checked_mul(box.freq_bound, box.freq_bound)) continue;
        cplx theta_sum(0, 0);
        cplx resonant(0, 0);
        for (auto& [m, amp] : modes) {
            Int w = checked_add(m, ksq);
            if (w == 0)
                resonant = amp;
            else
                theta_sum += amp / static_cast<double>(w);
        }
        for (Int off = -box.window; off <= box.window; ++off) {
            Int n = checked_sub(off, ksq);
            cplx v = eta.at(off) * theta_sum - cplx(0, 1) * t_eta.at(off) * resonant;
            if (std::abs(v) > 0.0) out.add(FreqPoint(n, k), v);
        }
        for (auto& [m, amp] : modes) {
            Int w = checked_add(m, ksq);
            if (w == 0) continue;
            cplx th = amp / static_cast<double>(w);
            for (Int dn = -m_max; dn <= m_max; ++dn) {
                Int n = checked_add(m, dn);
                if (std::abs(checked_add(n, ksq)) > box.window) continue;
                out.add(FreqPoint(n, k), -eta.at(dn) * th);
            }
        }
    }
    out.prune();
    return out;
}

// Same operator assembled from the composition route; agrees with
// duhamel_fourier to rounding for matching coefficient sets.
inline SpectrumField duhamel_via_identity(const SpectrumField& f, const TemporalCoefficients& eta,
                                          const TemporalCoefficients& t_eta,
                                          const TruncationBox& box) {
    SpectrumField eta_field = eta.as_field(f.dim());
    SpectrumField t_eta_field = t_eta.as_field(f.dim());
    SpectrumField theta_f = theta_apply(f);
    SpectrumField sum = cplx(-1, 0) * multiply(eta_field, theta_f);
    sum = sum + multiply(eta_field, free_evolve(op_T(theta_f)));
    sum = sum - cplx(0, 1) * multiply(t_eta_field, free_evolve(op_P(f)));
    return project_box(sum, box);
}

// Oracle: time-domain quadrature of the Duhamel integral, multiplied by the
// bump and periodized, transformed back per spatial column.
inline SpectrumField duhamel_quadrature(const SpectrumField& f, const CutoffSpec& spec,
                                        const TruncationBox& box,
                                        std::size_t quad_points = std::size_t{1} << 14) {
    spec.validate();
    const std::size_t n = quad_points;
    const double step = 2.0 * M_PI / static_cast<double>(n);
    std::vector<double> tau(n), eta_samples(n);
    for (std::size_t j = 0; j < n; ++j) {
        double t = step * static_cast<double>(j);
        if (t > M_PI) t -= 2.0 * M_PI;
        tau[j] = t;
        eta_samples[j] = spec.value(t);
    }
    SpectrumField out(f.dim());
    std::vector<cplx> line(n), h(n), integral(n);
    for (auto& [kc, modes] : detail::columns_of(f)) {
        IntVector k(kc);
        const Int ksq = norm_sq(k);
        if (ksq > checked_mul(box.freq_bound, box.freq_bound)) continue;
        std::fill(line.begin(), line.end(), cplx(0, 0));
        for (auto& [m, amp] : modes)
            line[static_cast<std::size_t>(floor_mod(m, static_cast<Int>(n)))] += amp;
        dft_inplace(line, +1);  // f_k on the time grid
        for (std::size_t j = 0; j < n; ++j) {
            double ph = static_cast<double>(ksq) * tau[j];
            h[j] = cplx(std::cos(ph), std::sin(ph)) * line[j];
        }
        // cumulative trapezoid from t = 0 in both directions
        integral[0] = cplx(0, 0);
        for (std::size_t j = 1; j <= n / 2; ++j)
            integral[j] = integral[j - 1] + 0.5 * step * (h[j - 1] + h[j]);
        for (std::size_t j = n - 1; j > n / 2; --j) {
            cplx next = (j == n - 1) ? integral[0] : integral[j + 1];
            const cplx& hn = (j == n - 1) ? h[0] : h[j + 1];
            integral[j] = next - 0.5 * step * (h[j] + hn);
        }
        for (std::size_t j = 0; j < n; ++j) {
            double ph = -static_cast<double>(ksq) * tau[j];
            line[j] = cplx(0, -1) * cplx(std::cos(ph), std::sin(ph)) * integral[j] * eta_samples[j];
        }
        dft_inplace(line, -1);
        for (Int off = -box.window; off <= box.window; ++off) {
            Int m = checked_sub(off, ksq);
            cplx a = line[static_cast<std::size_t>(floor_mod(m, static_cast<Int>(n)))] /
                     static_cast<double>(n);
            if (std::abs(a) >= kPruneThreshold) out.add(FreqPoint(m, k), a);
        }
    }
    out.prune();
    return out;
}

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

// Real spatial potential given by its Fourier modes.
class PotentialSpec {
  public:
    PotentialSpec() = default;

    static PotentialSpec from_modes(std::size_t dim,
                                    const std::vector<std::pair<IntVector, cplx>>& modes,
                                    double hermitian_tol = 1e-12) {
        SpectrumField f(dim);
        for (auto& [k, a] : modes) f.add(FreqPoint(0, k), a);
        f.prune();
        for (auto& [p, a] : f.raw()) {
            cplx mirror = f.coeff(FreqPoint(0, -p.k));
            if (std::abs(mirror - std::conj(a)) > hermitian_tol)
                throw std::invalid_argument("potential modes are not Hermitian-symmetric");
        }
        PotentialSpec v;
        v.field_ = std::move(f);
        return v;
    }

    // Spatial samples on a d-axis grid; a trivial time axis is prepended so
    // the resulting field is purely spatial.
    static PotentialSpec from_grid(const Grid& grid, std::size_t dim, double real_tol = 1e-12) {
        if (grid.shape.size() != dim) throw std::invalid_argument("spatial grid rank mismatch");
        for (const cplx& s : grid.data)
            if (std::abs(s.imag()) > real_tol)
                throw std::invalid_argument("potential grid samples are not real");
        Grid g;
        g.shape.assign(1, 1);
        g.shape.insert(g.shape.end(), grid.shape.begin(), grid.shape.end());
        g.data = grid.data;
        PotentialSpec v;
        v.field_ = grid_to_field(g, dim);
        return v;
    }

    const SpectrumField& field() const { return field_; }
    std::size_t dim() const { return field_.dim(); }
    Int degree_sq() const { return max_spatial_degree_sq(field_); }

  private:
    SpectrumField field_;
};

// V_Λ: retain the Fourier modes with k ∈ Λ (the fiber average over T_{Λ⊥}).
inline PotentialSpec project_potential(const PotentialSpec& v, const Sublattice& lat) {
    std::vector<std::pair<IntVector, cplx>> kept;
    for (auto& [p, a] : v.field().items_sorted())
        if (lat.contains(p.k)) kept.emplace_back(p.k, a);
    return PotentialSpec::from_modes(v.dim(), kept);
}

// ---------------------------------------------------------------------------
// The approximate-equation operator K = -φΘ + φU₀TΘ - iψU₀P
// ---------------------------------------------------------------------------

inline SpectrumField k_apply(const SpectrumField& f, const SpectrumField& phi,
                             const SpectrumField& psi) {
    SpectrumField theta_f = theta_apply(f);
    SpectrumField sum = cplx(-1, 0) * multiply(phi, theta_f);
    sum = sum + multiply(phi, free_evolve(op_T(theta_f)));
    sum = sum - cplx(0, 1) * multiply(psi, free_evolve(op_P(f)));
    return sum;
}

// ---------------------------------------------------------------------------
// Fixed-point solvers
// ---------------------------------------------------------------------------

struct SolveOptions {
    double b = 0.6;
    double tol = 1e-10;
    int max_iterations = 200;
    int max_tau_halvings = 6;
};

struct SolveReport {
    SpectrumField solution;
    int iterations = 0;
    double residual_xb = 0.0;
    double contraction_estimate = 0.0;
    CutoffSpec cutoff_used;
    double b = 0.6;
    bool converged = false;
};

namespace detail {

template <typename ApplyOp>
SolveReport fixed_point_solve(const SpectrumField& base, const ApplyOp& apply, double b, double tol,
                              int max_iterations) {
    SolveReport rep;
    rep.b = b;
    SpectrumField u = base;
    double contraction = 0.0;
    double prev_delta = -1.0;
    int it = 0;
    int growth_streak = 0;
    for (; it < max_iterations; ++it) {
        SpectrumField next = base + apply(u);
        double delta = xb_norm(next - u, b);
        if (prev_delta > 0.0 && delta > 0.0) {
            double ratio = delta / prev_delta;
            contraction = std::max(contraction, ratio);
            growth_streak = ratio > 1.0 ? growth_streak + 1 : 0;
        }
        u = std::move(next);
        if (delta <= tol) {
            ++it;
            break;
        }
        if (growth_streak >= 4) break;  // diverging; caller may shrink τ
        prev_delta = delta;
    }
    rep.solution = u;
    rep.iterations = it;
    rep.residual_xb = xb_norm((base + apply(u)) - u, b);
    rep.contraction_estimate = contraction;
    rep.converged = rep.residual_xb <= tol;
    return rep;
}

}  // namespace detail

// Fixed point of u = U₀u₀ + Eη·D(V_Λ u) + g on the truncated box. If the
// iteration fails to contract, the bump is rescaled to half width (the
// equation solved is the one with the reported cutoff).
inline SolveReport solve_periodized(const SpectrumField& u0, const PotentialSpec& v,
                                    const Sublattice& lat, const SpectrumField& g,
                                    const CutoffSpec& cutoff, const TruncationBox& box,
                                    const SolveOptions& opts = {}) {
    if (!(opts.b > 0.5 && opts.b < 1.0)) throw std::invalid_argument("b must lie in (1/2, 1)");
    const SpectrumField v_field = project_potential(v, lat).field();
    const SpectrumField base = project_box(free_evolve(u0), box) + project_box(g, box);
    CutoffSpec spec = cutoff;
    for (int attempt = 0;; ++attempt) {
        const Int trunc = std::max<Int>(spec.fourier_truncation, 2 * box.window);
        const TemporalCoefficients eta = cutoff_fourier(spec, CutoffWeight::eta, trunc);
        const TemporalCoefficients t_eta = cutoff_fourier(spec, CutoffWeight::t_eta, trunc);
        auto apply = [&](const SpectrumField& u) {
            return duhamel_fourier(multiply(v_field, u), eta, t_eta, box);
        };
        SolveReport rep =
            detail::fixed_point_solve(base, apply, opts.b, opts.tol, opts.max_iterations);
        rep.cutoff_used = spec;
        if (rep.converged || attempt >= opts.max_tau_halvings) {
            if (!rep.converged)
                throw std::runtime_error("solve_periodized: no contraction after tau shrinking");
            return rep;
        }
        spec = spec.rescaled(spec.half_width / 2.0);
    }
}

// Fixed point of v = U₀u₀ + K(W_Λ v) + g with trigonometric-polynomial
// coefficients φ, ψ, W.
inline SolveReport solve_approximate(const SpectrumField& u0, const PotentialSpec& w,
                                     const SpectrumField& phi, const SpectrumField& psi,
                                     const Sublattice& lat, const SpectrumField& g,
                                     const TruncationBox& box, const SolveOptions& opts = {}) {
    if (!(opts.b > 0.5 && opts.b < 1.0)) throw std::invalid_argument("b must lie in (1/2, 1)");
    const SpectrumField w_field = project_potential(w, lat).field();
    const SpectrumField base = project_box(free_evolve(u0), box) + project_box(g, box);
    auto apply = [&](const SpectrumField& u) {
        return project_box(k_apply(multiply(w_field, u), phi, psi), box);
    };
    SolveReport rep = detail::fixed_point_solve(base, apply, opts.b, opts.tol, opts.max_iterations);
    if (!rep.converged) throw std::runtime_error("solve_approximate: iteration did not contract");
    return rep;
}

// ---------------------------------------------------------------------------
// Truncated Hamiltonian H = diag(|k|^2) + V̂_Λ-convolution, and its propagator
// ---------------------------------------------------------------------------

struct TruncatedHamiltonian {
    std::vector<IntVector> modes;  // sorted basis of the subspace box
    EigenResult eigen;             // of the Hermitian matrix H
};

inline TruncatedHamiltonian truncated_hamiltonian(std::vector<IntVector> modes,
                                                  const SpectrumField& v_field,
                                                  double hermitian_tol = 1e-12) {
    std::sort(modes.begin(), modes.end());
    const std::size_t n = modes.size();
    CMatrix h(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            cplx val = v_field.coeff(FreqPoint(0, modes[r] - modes[c]));
            if (r == c) val += static_cast<double>(norm_sq(modes[r]));
            h.at(r, c) = val;
        }
    }
    if (hermitian_defect(h) > hermitian_tol)
        throw std::runtime_error("truncated Hamiltonian is not Hermitian");
    symmetrize(h);
    TruncatedHamiltonian out;
    out.modes = std::move(modes);
    out.eigen = hermitian_eigen(h);
    return out;
}

// Coefficients of e^{-itH} u0 on the subspace box.
inline std::vector<cplx> propagate(const TruncatedHamiltonian& h, const std::vector<cplx>& u0,
                                   double t) {
    const std::size_t n = h.modes.size();
    const CMatrix& q = h.eigen.vectors;
    std::vector<cplx> y(n, cplx(0, 0));
    for (std::size_t a = 0; a < n; ++a) {
        cplx proj(0, 0);
        for (std::size_t i = 0; i < n; ++i) proj += std::conj(q.at(i, a)) * u0[i];
        double ph = -h.eigen.values[a] * t;
        y[a] = proj * cplx(std::cos(ph), std::sin(ph));
    }
    std::vector<cplx> out(n, cplx(0, 0));
    for (std::size_t i = 0; i < n; ++i) {
        cplx s(0, 0);
        for (std::size_t a = 0; a < n; ++a) s += q.at(i, a) * y[a];
        out[i] = s;
    }
    return out;
}

}  // namespace torobs
