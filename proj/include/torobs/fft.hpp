#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "torobs/common.hpp"

namespace torobs {

// In-place transform with kernel e^{sign·2πi·jk/N}; radix-2 when N is a power
// of two, naive O(N²) otherwise. No normalization.
inline void dft_inplace(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if ((n & (n - 1)) != 0) {
        std::vector<cplx> out(n, cplx(0, 0));
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) {
                double ang = sign * 2.0 * M_PI * static_cast<double>(j * k % n) / n;
                out[k] += a[j] * cplx(std::cos(ang), std::sin(ang));
            }
        a = std::move(out);
        return;
    }
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1, 0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Multidimensional row-major array transform along one axis.
inline void dft_axis(std::vector<cplx>& data, const std::vector<std::size_t>& shape,
                     std::size_t axis, int sign) {
    std::size_t total = 1;
    for (std::size_t s : shape) total *= s;
    if (data.size() != total) throw std::invalid_argument("dft_axis: shape mismatch");
    const std::size_t n = shape[axis];
    std::size_t stride = 1;
    for (std::size_t a = axis + 1; a < shape.size(); ++a) stride *= shape[a];
    const std::size_t block = stride * n;
    std::vector<cplx> line(n);
    for (std::size_t base = 0; base < total; base += block)
        for (std::size_t off = 0; off < stride; ++off) {
            for (std::size_t j = 0; j < n; ++j) line[j] = data[base + off + j * stride];
            dft_inplace(line, sign);
            for (std::size_t j = 0; j < n; ++j) data[base + off + j * stride] = line[j];
        }
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace torobs
