#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace freqdiff {

// Row-major H x W array of doubles: images, noise fields, per-bin frequency maps.
struct Field {
    int h = 0;
    int w = 0;
    std::vector<double> v;

    Field() = default;
    Field(int height, int width, double fill = 0.0)
        : h(height), w(width), v(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill) {
        if (height <= 0 || width <= 0)
            throw std::invalid_argument("Field: dimensions must be positive");
    }

    double& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
    double at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
    std::size_t size() const { return v.size(); }
    bool same_shape(const Field& o) const { return h == o.h && w == o.w; }
};

inline void check_same_shape(const Field& a, const Field& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

inline Field operator+(const Field& a, const Field& b) {
    check_same_shape(a, b, "Field::operator+");
    Field r = a;
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += b.v[i];
    return r;
}

inline Field operator-(const Field& a, const Field& b) {
    check_same_shape(a, b, "Field::operator-");
    Field r = a;
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] -= b.v[i];
    return r;
}

inline Field operator*(double s, const Field& a) {
    Field r = a;
    for (double& x : r.v) x *= s;
    return r;
}

// y += a * x
inline void axpy(Field& y, double a, const Field& x) {
    check_same_shape(y, x, "axpy");
    for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += a * x.v[i];
}

inline double mean(const Field& a) {
    double s = 0.0;
    for (double x : a.v) s += x;
    return s / static_cast<double>(a.v.size());
}

inline double sum_sq(const Field& a) {
    double s = 0.0;
    for (double x : a.v) s += x * x;
    return s;
}

inline double max_abs(const Field& a) {
    double m = 0.0;
    for (double x : a.v) m = std::max(m, std::abs(x));
    return m;
}

inline bool all_finite(const Field& a) {
    for (double x : a.v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace freqdiff
