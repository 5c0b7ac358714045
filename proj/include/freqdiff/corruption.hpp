#pragma once

#include <vector>

#include "freqdiff/field.hpp"
#include "freqdiff/rng.hpp"
#include "freqdiff/spectral.hpp"

namespace freqdiff {

// Additive band-limited disturbance: x' = x + gamma_c * band noise on radial
// [a_c, b_c]. The injected noise is raw (unnormalized) band noise.
struct CorruptionSpec {
    double gamma_c = 1.0;
    double a_c = 0.0;
    double b_c = 0.0;
};

void validate_corruption(const CorruptionSpec& spec);

Field corrupt(const Field& x, const CorruptionSpec& spec, const FrequencyGrid& g, Rng& rng);
Field corrupt(const Field& x, const CorruptionSpec& spec, Rng& rng);

std::vector<Field> corrupt_dataset(const std::vector<Field>& xs, const CorruptionSpec& spec,
                                   std::uint64_t seed);

// Forward-noise weight whose two bands cover everything except the corrupted
// interval; bins exactly at radius a_c or b_c stay with the corruption band,
// so the two supports never overlap.
SpectralWeight recovery_weight(const CorruptionSpec& spec, double gamma_l, double gamma_h);

}  // namespace freqdiff
