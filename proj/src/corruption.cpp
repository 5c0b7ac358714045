#include "freqdiff/corruption.hpp"

#include <stdexcept>

namespace freqdiff {

void validate_corruption(const CorruptionSpec& spec) {
    if (!(spec.gamma_c >= 0.0))
        throw std::invalid_argument("corruption: gamma_c must be >= 0");
    if (!(spec.a_c >= 0.0 && spec.a_c <= spec.b_c && spec.b_c <= 1.0))
        throw std::invalid_argument("corruption: band must satisfy 0 <= a_c <= b_c <= 1");
}

Field corrupt(const Field& x, const CorruptionSpec& spec, const FrequencyGrid& g, Rng& rng) {
    validate_corruption(spec);
    check_same_shape(x, g.radial, "corrupt");
    if (spec.gamma_c == 0.0) return x;
    NoiseField noise = shape_noise(SpectralWeight::band_pass(spec.a_c, spec.b_c), g, rng, false);
    Field out = x;
    axpy(out, spec.gamma_c, noise.values);
    return out;
}

Field corrupt(const Field& x, const CorruptionSpec& spec, Rng& rng) {
    return corrupt(x, spec, build_grid(x.h, x.w), rng);
}

std::vector<Field> corrupt_dataset(const std::vector<Field>& xs, const CorruptionSpec& spec,
                                   std::uint64_t seed) {
    validate_corruption(spec);
    std::vector<Field> out;
    out.reserve(xs.size());
    FrequencyGrid g;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (g.radial.v.empty() || g.radial.h != xs[i].h || g.radial.w != xs[i].w)
            g = build_grid(xs[i].h, xs[i].w);
        Rng rng = Rng::derive(seed, 0xC0000000ULL + i);
        out.push_back(corrupt(xs[i], spec, g, rng));
    }
    return out;
}

SpectralWeight recovery_weight(const CorruptionSpec& spec, double gamma_l, double gamma_h) {
    validate_corruption(spec);
    if (spec.a_c == 0.0 && spec.b_c == 1.0)
        throw std::invalid_argument("recovery_weight: corrupted band covers the whole spectrum");
    SpectralWeight w = SpectralWeight::two_band(gamma_l, gamma_h, 0.0, spec.a_c, spec.b_c, 1.0);
    // bins exactly at the corruption edges stay out of both recovery bands
    w.open_bl = true;
    w.open_ah = true;
    return w;
}

}  // namespace freqdiff
