#pragma once

#include <complex>
#include <vector>

#include "freqdiff/field.hpp"

namespace freqdiff {

// Row-major H x W array of complex doubles (frequency-domain fields).
struct CField {
    int h = 0;
    int w = 0;
    std::vector<std::complex<double>> v;

    CField() = default;
    CField(int height, int width)
        : h(height), w(width), v(static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {}

    std::complex<double>& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
    const std::complex<double>& at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
    std::size_t size() const { return v.size(); }
};

// 2D DFT with the orthonormal convention: both directions carry 1/sqrt(H*W),
// so fft2(ifft2(x)) == x and Parseval holds without extra factors.
CField fft2(const CField& x);
CField ifft2(const CField& x);

CField fft2(const Field& x);
Field ifft2_real(const CField& x);

// |X|^2 per bin.
Field power_map(const CField& x);

}  // namespace freqdiff
