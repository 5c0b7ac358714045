#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "freqdiff/field.hpp"

namespace freqdiff {

// CHW activation block for the networks.
template <typename T>
struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<T> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_)
        : c(c_), h(h_), w(w_),
          v(static_cast<std::size_t>(c_) * h_ * w_, T(0)) {
        if (c_ <= 0 || h_ <= 0 || w_ <= 0)
            throw std::invalid_argument("Tensor: dimensions must be positive");
    }

    std::size_t size() const { return v.size(); }
    T* ch(int ci) { return v.data() + static_cast<std::size_t>(ci) * h * w; }
    const T* ch(int ci) const { return v.data() + static_cast<std::size_t>(ci) * h * w; }
};

template <typename T>
Tensor<T> to_tensor(const Field& f) {
    Tensor<T> t(1, f.h, f.w);
    for (std::size_t i = 0; i < f.v.size(); ++i) t.v[i] = static_cast<T>(f.v[i]);
    return t;
}

template <typename T>
Field to_field(const Tensor<T>& t) {
    if (t.c != 1) throw std::invalid_argument("to_field: tensor must have one channel");
    Field f(t.h, t.w);
    for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] = static_cast<double>(t.v[i]);
    return f;
}

}  // namespace freqdiff
