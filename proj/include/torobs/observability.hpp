#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "torobs/common.hpp"
#include "torobs/duhamel.hpp"
#include "torobs/linalg.hpp"
#include "torobs/paraboloid.hpp"
#include "torobs/parallel.hpp"
#include "torobs/spectrum.hpp"

namespace torobs {

// ---------------------------------------------------------------------------
// |χ|² representations
// ---------------------------------------------------------------------------

// Product of one half-open interval per axis (time first); amplitude 1 inside.
struct BoxWindow {
    // intervals[i] = {lo, hi} in radians; an absent axis means the full circle
    std::vector<std::optional<std::pair<double, double>>> intervals;  // size 1+d

    static cplx interval_coeff(double lo, double hi, Int m) {
        if (m == 0) return cplx((hi - lo) / (2.0 * M_PI), 0.0);
        // (1/2π) ∫_lo^hi e^{-imt} dt
        cplx num = cplx(std::cos(-m * lo), std::sin(-m * lo)) -
                   cplx(std::cos(-m * hi), std::sin(-m * hi));
        return num / cplx(0, 2.0 * M_PI * static_cast<double>(m));
    }
};

// |χ|² as either a trigonometric polynomial or an exact box indicator. The
// closed-form Gram assembly only ever reads finitely many coefficients, which
// both representations provide exactly.
class ChiSquared {
  public:
    static ChiSquared from_field(SpectrumField f) {
        ChiSquared c;
        c.dim_ = f.dim();
        c.field_ = std::move(f);
        c.is_box_ = false;
        return c;
    }

    // |χ|² = |χ_raw|² for a trigonometric χ_raw.
    static ChiSquared from_multiplier(const SpectrumField& chi_raw) {
        return from_field(multiply(chi_raw, conjugate(chi_raw)));
    }

    static ChiSquared box(std::size_t spatial_dim, BoxWindow window) {
        if (window.intervals.size() != 1 + spatial_dim)
            throw std::invalid_argument("box window needs 1+d interval slots");
        ChiSquared c;
        c.dim_ = spatial_dim;
        c.window_ = std::move(window);
        c.is_box_ = true;
        return c;
    }

    std::size_t dim() const { return dim_; }
    bool is_box() const { return is_box_; }
    const SpectrumField& field() const {
        if (is_box_) throw std::logic_error("box indicator has no finite field");
        return field_;
    }

    cplx coeff(const FreqPoint& p) const {
        if (!is_box_) return field_.coeff(p);
        cplx prod(1, 0);
        for (std::size_t axis = 0; axis < 1 + dim_; ++axis) {
            Int m = axis == 0 ? p.n : p.k[axis - 1];
            const auto& iv = window_.intervals[axis];
            if (!iv) {
                if (m != 0) return cplx(0, 0);
                continue;
            }
            prod *= BoxWindow::interval_coeff(iv->first, iv->second, m);
        }
        return prod;
    }

    // mean of |χ|² = ||χ||²_{L²} under normalized measure
    double mass() const { return coeff(FreqPoint(0, IntVector(dim_))).real(); }

    double value_at(const std::vector<double>& z) const {  // z = (t, x_1..x_d)
        if (is_box_) {
            for (std::size_t axis = 0; axis < z.size(); ++axis) {
                const auto& iv = window_.intervals[axis];
                if (!iv) continue;
                double v = z[axis];
                double lo = iv->first, hi = iv->second;
                while (v < lo) v += 2.0 * M_PI;
                while (v >= lo + 2.0 * M_PI) v -= 2.0 * M_PI;
                if (v >= hi) return 0.0;
            }
            return 1.0;
        }
        cplx s(0, 0);
        for (auto& [p, a] : field_.items_sorted()) {
            double phase = p.n * z[0];
            for (std::size_t j = 0; j < dim_; ++j) phase += p.k[j] * z[1 + j];
            s += a * cplx(std::cos(phase), std::sin(phase));
        }
        return s.real();
    }

    double ess_sup_bound() const {
        if (is_box_) return 1.0;
        double s = 0.0;
        for (auto& [p, a] : field_.items_sorted()) s += std::abs(a);
        return s;  // ℓ¹ bound on the sup
    }

    // box indicators factor exactly: time window -> integration limits,
    // spatial windows -> product coefficients
    std::optional<std::pair<double, double>> time_window() const {
        if (!is_box_) return std::nullopt;
        return window_.intervals[0];
    }

    cplx spatial_coeff(const IntVector& dk) const {
        if (!is_box_) throw std::logic_error("spatial_coeff is for box indicators");
        cplx prod(1, 0);
        for (std::size_t j = 0; j < dim_; ++j) {
            const auto& iv = window_.intervals[1 + j];
            if (!iv) {
                if (dk[j] != 0) return cplx(0, 0);
                continue;
            }
            prod *= BoxWindow::interval_coeff(iv->first, iv->second, dk[j]);
        }
        return prod;
    }

    // grid realness/nonnegativity validation for trig-polynomial data
    void validate_nonnegative(double tol = 1e-12) const {
        if (is_box_) {
            for (auto& iv : window_.intervals)
                if (iv && !(iv->second > iv->first))
                    throw std::invalid_argument("box indicator with empty interval");
            return;
        }
        Int nt = 2 * max_temporal_degree(field_) + 2;
        Int nx = 2 * isqrt(max_spatial_degree_sq(field_)) + 2;
        Grid g = evaluate_grid(field_, next_pow2(static_cast<std::size_t>(nt)),
                               next_pow2(static_cast<std::size_t>(nx)));
        for (const cplx& v : g.data) {
            if (std::abs(v.imag()) > tol || v.real() < -tol)
                throw std::invalid_argument("|chi|^2 must be real and nonnegative on the grid");
        }
    }

  private:
    std::size_t dim_ = 0;
    bool is_box_ = false;
    SpectrumField field_;
    BoxWindow window_;
};

// ---------------------------------------------------------------------------
// Observation setups and reports
// ---------------------------------------------------------------------------

struct ObservationSetup {
    ChiSquared chi_sq;
    std::vector<IntVector> modes;  // sorted subspace box
    std::optional<PotentialSpec> potential;  // already Λ-projected by the caller

    static ObservationSetup over_box(ChiSquared chi, const AffineSublattice& gamma, Int freq_bound,
                                     std::optional<PotentialSpec> pot = std::nullopt) {
        ObservationSetup s{std::move(chi), boxed_points(gamma, freq_bound), std::move(pot)};
        if (s.modes.empty()) throw std::invalid_argument("empty observation subspace");
        return s;
    }

    static ObservationSetup over_modes(ChiSquared chi, std::vector<IntVector> modes,
                                       std::optional<PotentialSpec> pot = std::nullopt) {
        std::sort(modes.begin(), modes.end());
        ObservationSetup s{std::move(chi), std::move(modes), std::move(pot)};
        if (s.modes.empty()) throw std::invalid_argument("empty observation subspace");
        return s;
    }
};

struct ObservabilityReport {
    std::vector<IntVector> modes;
    CMatrix gram;
    std::vector<double> eigenvalues;  // ascending
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double obs_constant = 0.0;  // sqrt(max(λ_min, 0))
    double hermitian_defect = 0.0;
    std::string method;
};

namespace detail {

inline ObservabilityReport finish_report(std::vector<IntVector> modes, CMatrix gram,
                                         std::string method, double hermitian_tol = 1e-12) {
    ObservabilityReport rep;
    rep.hermitian_defect = hermitian_defect(gram);
    if (rep.hermitian_defect > hermitian_tol)
        throw std::runtime_error("Gram matrix is not Hermitian within tolerance");
    symmetrize(gram);
    EigenResult eig = hermitian_eigen(gram);
    rep.modes = std::move(modes);
    rep.gram = std::move(gram);
    rep.eigenvalues = eig.values;
    rep.lambda_min = eig.values.front();
    rep.lambda_max = eig.values.back();
    rep.obs_constant = std::sqrt(std::max(rep.lambda_min, 0.0));
    rep.method = std::move(method);
    return rep;
}

}  // namespace detail

// Free-propagator Gram in closed form: G[r][c] = c_{|χ|²}(|k_r|²-|k_c|², k_c-k_r).
// Rows are assembled in data-parallel chunks into preallocated slots.
inline ObservabilityReport gram_free(const ObservationSetup& setup) {
    if (setup.potential) throw std::invalid_argument("gram_free expects no potential");
    setup.chi_sq.validate_nonnegative();
    const auto& modes = setup.modes;
    const std::size_t n = modes.size();
    CMatrix g(n);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                Int dn = checked_sub(norm_sq(modes[r]), norm_sq(modes[c]));
                g.at(r, c) = setup.chi_sq.coeff(FreqPoint(dn, modes[c] - modes[r]));
            }
    });
    return detail::finish_report(modes, std::move(g), "closed_form");
}

// Oracle for gram_free: the same matrix read from grid-quadrature Fourier
// coefficients of |χ|² (exact once the grid resolves every difference
// frequency; trigonometric |χ|² only).
inline ObservabilityReport gram_free_quadrature(const ObservationSetup& setup, std::size_t nt,
                                                std::size_t nx) {
    if (setup.potential) throw std::invalid_argument("gram_free expects no potential");
    const auto& modes = setup.modes;
    Grid g = evaluate_grid(setup.chi_sq.field(), nt, nx);
    std::vector<cplx> data = g.data;
    for (std::size_t axis = 0; axis < g.shape.size(); ++axis) dft_axis(data, g.shape, axis, -1);
    const double scale = 1.0 / static_cast<double>(g.total());
    auto coeff = [&](Int dn, const IntVector& dk) {
        std::size_t idx = static_cast<std::size_t>(floor_mod(dn, static_cast<Int>(nt)));
        for (std::size_t j = 0; j < setup.chi_sq.dim(); ++j)
            idx = idx * nx + static_cast<std::size_t>(floor_mod(dk[j], static_cast<Int>(nx)));
        return data[idx] * scale;
    };
    const std::size_t n = modes.size();
    CMatrix m(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            m.at(r, c) = coeff(checked_sub(norm_sq(modes[r]), norm_sq(modes[c])),
                               modes[c] - modes[r]);
    return detail::finish_report(modes, std::move(m), "quadrature", 1e-10);
}

// Gram of u0 ↦ χ e^{-itH} u0 with the truncated Hamiltonian propagated by
// eigendecomposition and the time integral over [-π, π] done by composite
// Gauss-Legendre panels sized to the spectral spread.
inline ObservabilityReport gram_potential(const ObservationSetup& setup, int panels_override = 0) {
    if (!setup.potential) throw std::invalid_argument("gram_potential expects a potential");
    setup.chi_sq.validate_nonnegative();
    const auto& modes = setup.modes;
    const std::size_t n = modes.size();
    TruncatedHamiltonian ham = truncated_hamiltonian(modes, setup.potential->field());

    double spread = ham.eigen.values.back() - ham.eigen.values.front();
    Int chi_deg = 0;
    if (!setup.chi_sq.is_box()) chi_deg = max_temporal_degree(setup.chi_sq.field());
    int panels = panels_override > 0
                     ? panels_override
                     : std::max(16, static_cast<int>(std::ceil(spread + chi_deg)) + 8);

    // spatial coefficient matrix of |χ(t,·)|² per time: C(t)[a][b] = Σ_ν c(ν, k_b-k_a) e^{iνt}.
    // A box time window is exact as integration limits instead of a series.
    double t_lo = -M_PI, t_hi = M_PI;
    std::vector<std::pair<Int, CMatrix>> chi_layers;  // (ν, matrix of c(ν, k_b-k_a))
    if (setup.chi_sq.is_box()) {
        if (auto tw = setup.chi_sq.time_window()) {
            t_lo = tw->first;
            t_hi = tw->second;
        }
        CMatrix layer(n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                layer.at(a, b) = setup.chi_sq.spatial_coeff(modes[b] - modes[a]);
        chi_layers.emplace_back(0, std::move(layer));
    } else {
        Int deg = max_temporal_degree(setup.chi_sq.field());
        for (Int nu = -deg; nu <= deg; ++nu) {
            CMatrix layer(n);
            double mass = 0.0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) {
                    cplx v = setup.chi_sq.coeff(FreqPoint(nu, modes[b] - modes[a]));
                    layer.at(a, b) = v;
                    mass += std::norm(v);
                }
            if (mass > 0.0) chi_layers.emplace_back(nu, std::move(layer));
        }
    }

    // 8-point Gauss-Legendre nodes on [-1, 1]
    static const double gl_x[8] = {-0.9602898564975363, -0.7966664774136267,
                                   -0.5255324099163290, -0.1834346424956498,
                                   0.1834346424956498,  0.5255324099163290,
                                   0.7966664774136267,  0.9602898564975363};
    static const double gl_w[8] = {0.1012285362903763, 0.2223810344533745,
                                   0.3137066458778873, 0.3626837833783620,
                                   0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};

    CMatrix total(n);
    const double panel_width = (t_hi - t_lo) / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
        double lo = t_lo + pnl * panel_width;
        for (int q = 0; q < 8; ++q) {
            double t = lo + 0.5 * panel_width * (gl_x[q] + 1.0);
            double w = 0.5 * panel_width * gl_w[q] / (2.0 * M_PI);
            // U(t) on the mode basis
            CMatrix u(n);
            {
                const CMatrix& qm = ham.eigen.vectors;
                std::vector<cplx> phases(n);
                for (std::size_t a = 0; a < n; ++a) {
                    double ph = -ham.eigen.values[a] * t;
                    phases[a] = cplx(std::cos(ph), std::sin(ph));
                }
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) {
                        cplx s(0, 0);
                        for (std::size_t a = 0; a < n; ++a)
                            s += qm.at(i, a) * phases[a] * std::conj(qm.at(j, a));
                        u.at(i, j) = s;
                    }
            }
            // C(t)
            CMatrix ct(n);
            for (auto& [nu, layer] : chi_layers) {
                cplx ph(std::cos(nu * t), std::sin(nu * t));
                for (std::size_t i = 0; i < n * n; ++i) ct.a[i] += ph * layer.a[i];
            }
            // integrand = U^T C(t) conj(U)
            CMatrix tmp(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    cplx s(0, 0);
                    for (std::size_t a = 0; a < n; ++a) s += ct.at(i, a) * std::conj(u.at(a, j));
                    tmp.at(i, j) = s;
                }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    cplx s(0, 0);
                    for (std::size_t a = 0; a < n; ++a) s += u.at(a, i) * tmp.at(a, j);
                    total.at(i, j) += w * s;
                }
        }
    }
    return detail::finish_report(modes, std::move(total), "potential", 1e-9);
}

// ---------------------------------------------------------------------------
// Scans and derived quantities
// ---------------------------------------------------------------------------

struct ScanPoint {
    Int freq_bound = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double obs_constant = 0.0;
};

inline std::vector<ScanPoint> obs_constant_scan(const ChiSquared& chi, const AffineSublattice& gamma,
                                                const std::vector<Int>& freq_bounds,
                                                std::optional<PotentialSpec> pot = std::nullopt) {
    for (std::size_t i = 1; i < freq_bounds.size(); ++i)
        if (freq_bounds[i] <= freq_bounds[i - 1])
            throw std::invalid_argument("freq bounds must increase");
    std::vector<ScanPoint> out;
    for (Int f : freq_bounds) {
        ObservationSetup setup = ObservationSetup::over_box(chi, gamma, f, pot);
        ObservabilityReport rep = pot ? gram_potential(setup) : gram_free(setup);
        out.push_back({f, rep.lambda_min, rep.lambda_max, rep.obs_constant});
    }
    return out;
}

// Smallest singular value of observation restricted to the eigenspace
// span{e^{ik·x} : |k|² = n}; the Gram reads the time-averaged |χ|².
inline ObservabilityReport eigenspace_gram(Int eigenvalue, const ChiSquared& chi, std::size_t d) {
    if (eigenvalue < 0) throw std::invalid_argument("eigenspace index must be >= 0");
    std::vector<IntVector> modes;
    Int bound = isqrt(eigenvalue);
    std::vector<Int> c(d, -bound);
    while (true) {
        IntVector k(d);
        for (std::size_t j = 0; j < d; ++j) k[j] = c[j];
        if (norm_sq(k) == eigenvalue) modes.push_back(k);
        std::size_t j = 0;
        while (j < d) {
            if (++c[j] <= bound) break;
            c[j] = -bound;
            ++j;
        }
        if (j == d) break;
    }
    if (modes.empty()) throw std::invalid_argument("empty eigenspace");
    std::sort(modes.begin(), modes.end());
    const std::size_t n = modes.size();
    CMatrix g(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c2 = 0; c2 < n; ++c2)
            g.at(r, c2) = chi.coeff(FreqPoint(0, modes[c2] - modes[r]));
    return detail::finish_report(modes, std::move(g), "eigenspace");
}

// ||χu||²_{L²} by exact coefficient convolution (trig-polynomial |χ|²).
inline double observed_mass(const ChiSquared& chi, const SpectrumField& u) {
    return inner(multiply(chi.field(), u), u).real();
}

// Same integral by grid quadrature, the cross-validation route. A field |χ|²
// is sampled spectrally on the same grid; a box indicator is sampled pointwise.
inline double observed_mass_quadrature(const ChiSquared& chi, const SpectrumField& u,
                                       std::size_t nt, std::size_t nx) {
    Grid gu = evaluate_grid(u, nt, nx);
    double acc = 0.0;
    if (!chi.is_box()) {
        Grid gc = evaluate_grid(chi.field(), nt, nx);
        for (std::size_t i = 0; i < gu.data.size(); ++i)
            acc += gc.data[i].real() * std::norm(gu.data[i]);
    } else {
        std::vector<std::size_t> idx(gu.shape.size(), 0);
        std::vector<double> z(gu.shape.size());
        for (std::size_t flat = 0; flat < gu.data.size(); ++flat) {
            z[0] = 2.0 * M_PI * static_cast<double>(idx[0]) / static_cast<double>(nt);
            for (std::size_t j = 1; j < gu.shape.size(); ++j)
                z[j] = 2.0 * M_PI * static_cast<double>(idx[j]) / static_cast<double>(nx);
            acc += chi.value_at(z) * std::norm(gu.data[flat]);
            for (std::size_t axis = gu.shape.size(); axis-- > 0;) {
                if (++idx[axis] < gu.shape[axis]) break;
                idx[axis] = 0;
            }
        }
    }
    return acc / static_cast<double>(gu.total());
}

// Max over samples of |‖ζu‖² - Σ_α ‖ζu_α‖²| where u = e^{itΔ}u0 and u_α is
// the piece over Q^α (or N^α); exactly zero when deg ζ <= R.
inline double decoupling_defect(const SpectrumField& zeta, const ClusterDecomposition& dec,
                                const std::vector<SpectrumField>& u0_samples,
                                bool use_neighborhoods = false) {
    double worst = 0.0;
    for (const SpectrumField& u0 : u0_samples) {
        SpectrumField u = free_evolve(u0);
        double total = l2_norm_sq(multiply(zeta, u));
        double pieces = 0.0;
        for (auto& cl : dec.clusters) {
            std::vector<FreqPoint> pts;
            if (use_neighborhoods) {
                for (auto& k : cl.shadow) {
                    Int m = norm_sq(k);
                    for (Int n = -m - 10 * dec.scale; n <= -m + 10 * dec.scale; ++n)
                        pts.emplace_back(n, k);
                }
            } else {
                for (auto& p : cl.points) pts.push_back(p.freq());
            }
            SpectrumField part = project(u, FreqSet::from_points(std::move(pts)));
            if (!part.empty()) pieces += l2_norm_sq(multiply(zeta, part));
        }
        worst = std::max(worst, std::abs(total - pieces));
    }
    return worst;
}

struct YNormEstimate {
    double power_iteration = 0.0;
    double dense = 0.0;
};

// Largest singular value of the truncated observation u0 ↦ χ e^{itΔ}u0:
// sqrt(λ_max) of the Gram, by power iteration cross-checked densely.
inline YNormEstimate y_norm_estimate(const ChiSquared& chi, std::size_t d, Int freq_bound) {
    ObservationSetup setup = ObservationSetup::over_box(chi, AffineSublattice::full(d), freq_bound);
    const auto& modes = setup.modes;
    const std::size_t n = modes.size();
    CMatrix g(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            Int dn = checked_sub(norm_sq(modes[r]), norm_sq(modes[c]));
            g.at(r, c) = chi.coeff(FreqPoint(dn, modes[c] - modes[r]));
        }
    symmetrize(g);
    YNormEstimate est;
    est.power_iteration = std::sqrt(std::max(0.0, power_iteration_max(g)));
    est.dense = std::sqrt(std::max(0.0, hermitian_eigen(g).values.back()));
    return est;
}

}  // namespace torobs
