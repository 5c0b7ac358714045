#include <doctest.h>

#include <cmath>
#include <complex>

#include "freqdiff/fft.hpp"
#include "freqdiff/rng.hpp"

using namespace freqdiff;

namespace {

// Direct O(N^2) DFT per output bin, orthonormal convention. Slow but obviously
// correct; the reference the fast transform is judged against.
CField dft2_reference(const CField& x, int sign) {
    const double pi = 3.14159265358979323846;
    CField out(x.h, x.w);
    double scale = 1.0 / std::sqrt(static_cast<double>(x.h) * x.w);
    for (int ky = 0; ky < x.h; ++ky)
        for (int kx = 0; kx < x.w; ++kx) {
            std::complex<double> acc = 0.0;
            for (int y = 0; y < x.h; ++y)
                for (int xx = 0; xx < x.w; ++xx) {
                    double ph = sign * 2.0 * pi *
                                (static_cast<double>(ky) * y / x.h +
                                 static_cast<double>(kx) * xx / x.w);
                    acc += x.at(y, xx) * std::complex<double>(std::cos(ph), std::sin(ph));
                }
            out.at(ky, kx) = scale * acc;
        }
    return out;
}

CField random_cfield(int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    CField x(h, w);
    for (auto& c : x.v) c = {rng.normal(), rng.normal()};
    return x;
}

double max_err(const CField& a, const CField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

}  // namespace

TEST_CASE("fft2 matches the direct DFT on odd non-square shapes") {
    for (auto [h, w] : {std::pair{5, 7}, std::pair{4, 4}, std::pair{3, 8}, std::pair{6, 5}}) {
        CField x = random_cfield(h, w, 11 + h * 100 + w);
        CField fast = fft2(x);
        CField slow = dft2_reference(x, -1);
        CHECK(max_err(fast, slow) < 1e-10);
    }
}

TEST_CASE("ifft2 matches the direct inverse DFT") {
    CField x = random_cfield(5, 6, 42);
    CHECK(max_err(ifft2(x), dft2_reference(x, +1)) < 1e-10);
}

TEST_CASE("fft2/ifft2 round-trip is the identity") {
    CField x = random_cfield(9, 4, 7);
    CHECK(max_err(ifft2(fft2(x)), x) < 1e-12);
    CHECK(max_err(fft2(ifft2(x)), x) < 1e-12);
}

TEST_CASE("orthonormal scaling preserves total power") {
    CField x = random_cfield(8, 12, 3);
    CField X = fft2(x);
    double ps = 0.0, pf = 0.0;
    for (const auto& c : x.v) ps += std::norm(c);
    for (const auto& c : X.v) pf += std::norm(c);
    CHECK(pf == doctest::Approx(ps).epsilon(1e-12));
}

TEST_CASE("real-input overload agrees with the complex transform") {
    Rng rng(19);
    Field r(6, 10);
    for (double& v : r.v) v = rng.normal();
    CField promoted(6, 10);
    for (std::size_t i = 0; i < r.v.size(); ++i) promoted.v[i] = r.v[i];
    CHECK(max_err(fft2(r), fft2(promoted)) < 1e-13);
}

TEST_CASE("ifft2_real recovers a real signal from its spectrum") {
    Rng rng(23);
    Field r(7, 7);
    for (double& v : r.v) v = rng.normal();
    Field back = ifft2_real(fft2(r));
    double m = 0.0;
    for (std::size_t i = 0; i < r.v.size(); ++i) m = std::max(m, std::abs(back.v[i] - r.v[i]));
    CHECK(m < 1e-12);
}

TEST_CASE("power_map is the squared magnitude per bin") {
    CField x = random_cfield(4, 5, 99);
    Field p = power_map(x);
    REQUIRE(p.h == 4);
    REQUIRE(p.w == 5);
    for (std::size_t i = 0; i < x.v.size(); ++i)
        CHECK(p.v[i] == doctest::Approx(std::norm(x.v[i])).epsilon(1e-14));
}

TEST_CASE("DC bin of a constant image carries all the power") {
    Field r(8, 8, 2.5);
    CField X = fft2(r);
    // Orthonormal: DC = sum / sqrt(HW) = 2.5 * 64 / 8 = 20.
    CHECK(std::abs(X.at(0, 0) - std::complex<double>(20.0, 0.0)) < 1e-12);
    double off = 0.0;
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            if (y || x) off += std::norm(X.at(y, x));
    CHECK(off < 1e-20);
}
