#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "torobs/common.hpp"
#include "torobs/fft.hpp"
#include "torobs/spectrum.hpp"

namespace torobs {

// Smooth temporal bump η ∈ C_c^∞(-τ,τ) with η ≡ 1 on [-pτ, pτ].
struct CutoffSpec {
    double half_width = M_PI / 4.0;  // τ, must stay inside (0, π)
    double plateau = 0.5;            // fraction p of τ where η ≡ 1
    Int fourier_truncation = 256;

    void validate() const {
        if (!(half_width > 0.0 && half_width < M_PI))
            throw std::invalid_argument("cutoff half_width must lie in (0, pi)");
        if (!(plateau > 0.0 && plateau < 1.0))
            throw std::invalid_argument("cutoff plateau fraction must lie in (0, 1)");
        if (fourier_truncation < 1)
            throw std::invalid_argument("cutoff fourier_truncation must be >= 1");
    }

    CutoffSpec rescaled(double tau) const {
        CutoffSpec s = *this;
        s.half_width = tau;
        return s;
    }

    double plateau_width() const { return plateau * half_width; }

    // η(t) for t in (-π, π]; exp-glue smoothstep on the transition annulus.
    double value(double t) const {
        double a = std::abs(t);
        if (a >= half_width) return 0.0;
        if (a <= plateau * half_width) return 1.0;
        double u = (half_width - a) / ((1.0 - plateau) * half_width);
        auto psi = [](double s) { return s <= 0.0 ? 0.0 : std::exp(-1.0 / s); };
        return psi(u) / (psi(u) + psi(1.0 - u));
    }
};

enum class CutoffWeight { eta, t_eta };

// Temporal Fourier coefficients c(m), |m| <= truncation, of a 2π-periodic
// function; the tail mass over (truncation, 2·truncation] is reported.
struct TemporalCoefficients {
    Int truncation = 0;
    std::vector<cplx> coeff;  // index m + truncation
    double tail_mass = 0.0;
    std::size_t quad_points = 0;

    cplx at(Int m) const {
        if (m < -truncation || m > truncation) return cplx(0, 0);
        return coeff[static_cast<std::size_t>(m + truncation)];
    }

    SpectrumField as_field(std::size_t spatial_dim) const {
        SpectrumField f(spatial_dim);
        for (Int m = -truncation; m <= truncation; ++m) {
            cplx a = at(m);
            if (std::abs(a) >= kPruneThreshold) f.set(FreqPoint(m, IntVector(spatial_dim)), a);
        }
        return f;
    }
};

// Coefficients of the periodization Eη or E(tη) by FFT quadrature on a grid
// fine enough that aliasing sits far below the smooth-bump coefficient decay.
inline TemporalCoefficients cutoff_fourier(const CutoffSpec& spec, CutoffWeight weight,
                                           Int truncation = -1) {
    spec.validate();
    const Int m_max = truncation > 0 ? truncation : spec.fourier_truncation;
    const std::size_t n = std::max<std::size_t>(next_pow2(8 * static_cast<std::size_t>(m_max) + 8),
                                                std::size_t{1} << 15);
    std::vector<cplx> samples(n);
    for (std::size_t j = 0; j < n; ++j) {
        double t = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
        if (t > M_PI) t -= 2.0 * M_PI;  // periodic extension from (-π, π]
        double v = spec.value(t);
        samples[j] = weight == CutoffWeight::eta ? cplx(v, 0) : cplx(t * v, 0);
    }
    dft_inplace(samples, -1);
    TemporalCoefficients out;
    out.truncation = m_max;
    out.quad_points = n;
    out.coeff.resize(2 * static_cast<std::size_t>(m_max) + 1);
    auto fetch = [&](Int m) {
        std::size_t idx = static_cast<std::size_t>(floor_mod(m, static_cast<Int>(n)));
        return samples[idx] / static_cast<double>(n);
    };
    for (Int m = -m_max; m <= m_max; ++m) out.coeff[static_cast<std::size_t>(m + m_max)] = fetch(m);
    double tail = 0.0;
    Int tail_hi = std::min<Int>(2 * m_max, static_cast<Int>(n / 2) - 1);
    for (Int m = m_max + 1; m <= tail_hi; ++m) tail += std::norm(fetch(m)) + std::norm(fetch(-m));
    out.tail_mass = std::sqrt(tail);
    return out;
}

}  // namespace torobs
