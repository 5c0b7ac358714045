#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "freqdiff/field.hpp"
#include "freqdiff/rng.hpp"
#include "freqdiff/schedule.hpp"
#include "freqdiff/spectral.hpp"

namespace freqdiff {

// Noise predictor: (x_t, t) -> estimated noise field.
using EpsFn = std::function<Field(const Field&, int)>;

// One forward transition: sqrt(alpha_t) x_prev + sqrt(beta_t) noise.
Field forward_step(const Field& x_prev, int t, const DiffusionSchedule& s, const NoiseField& noise);

// Closed-form jump to step t. Draws a fresh normalized shaped noise field and
// returns it alongside x_t so the caller can regress against it.
std::pair<Field, NoiseField> forward_jump(const Field& x0, int t, const DiffusionSchedule& s,
                                          const SpectralWeight& w, const FrequencyGrid& g,
                                          Rng& rng);

// Mean over the batch of per-pixel squared error between the injected shaped
// noise and the model's prediction, with t drawn uniformly per item. Each
// item's (t, noise) stream is keyed by the item's content, so the value does
// not depend on batch order.
double training_loss(const EpsFn& model, const std::vector<Field>& batch,
                     const DiffusionSchedule& s, const SpectralWeight& w, std::uint64_t seed);

// One reverse transition x_t -> x_{t-1} via the posterior mean of the
// eps-parameterization. Injected stochasticity is shaped with the forward
// weight (or white when white_injection), scale sqrt(beta_tilde); the t=1
// step is always noiseless.
Field reverse_step(const EpsFn& model, const Field& x_t, int t, const DiffusionSchedule& s,
                   const SpectralWeight& w, Rng& rng, bool white_injection = false,
                   bool deterministic = false);

struct SampleOptions {
    int stride = 1;
    bool white_injection = false;
    bool deterministic = false;
    int threads = 1;
};

// Ancestral sampling over the (optionally strided) step subsequence, starting
// from a normalized shaped draw. Image i uses the RNG stream derived from
// (seed, i), so output is identical for any thread count.
std::vector<Field> sample(const EpsFn& model, const DiffusionSchedule& s, const SpectralWeight& w,
                          int count, int height, int width, std::uint64_t seed,
                          const SampleOptions& opt = {});

}  // namespace freqdiff
