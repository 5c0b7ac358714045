#pragma once

#include <string>
#include <vector>

#include "freqdiff/diffusion.hpp"
#include "freqdiff/field.hpp"
#include "freqdiff/rng.hpp"
#include "freqdiff/schedule.hpp"
#include "freqdiff/spectral.hpp"
#include "freqdiff/unet.hpp"

namespace freqdiff {

// Noise-prediction network together with its architecture descriptor.
struct DenoiserModel {
    ArchDescriptor arch;
    UNet<float> net;

    std::size_t param_count() const { return net.param_count(); }
};

struct TrainConfig {
    int epochs = 30;
    int batch_size = 16;
    double learning_rate = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double clip_norm = 1.0;
    std::uint64_t seed = 1;
};

DenoiserModel init_model(const ArchDescriptor& arch, Rng& rng);

// Network prediction of the noise component of x_t. Requires t in [0, T).
Field predict_eps(const DenoiserModel& model, const Field& x_t, int t,
                  const DiffusionSchedule& s);

// Adapter for sample()/training_loss(). The model must outlive the closure.
EpsFn make_eps_fn(const DenoiserModel& model, const DiffusionSchedule& s);

// Exact conditional mean E[noise | x_t] when the data is N(data_mean, data_var * I)
// and the forward noise is shaped by `w`: per frequency bin both components are
// independent Gaussians, so the estimate is a per-bin linear shrinkage of
// F(x_t - sqrt(abar_t) * data_mean) mapped back to pixels.
Field oracle_eps_gaussian(const Field& x_t, int t, const DiffusionSchedule& s,
                          const SpectralWeight& w, const Field& data_mean, double data_var);

EpsFn make_oracle_eps_fn(const DiffusionSchedule& s, const SpectralWeight& w,
                         const Field& data_mean, double data_var);

// Shuffled minibatch optimization of the noise-prediction objective with
// adaptive moments and gradient clipping. Returns the per-epoch mean loss.
// Item noise streams are keyed by image content, so the loss curve does not
// depend on the order the dataset was assembled in.
std::vector<double> train(DenoiserModel& model, const std::vector<Field>& dataset,
                          const DiffusionSchedule& s, const SpectralWeight& w,
                          const TrainConfig& cfg);

// Checkpoint container: magic "FDCK", version, architecture text, then the
// named parameter segments as little-endian 32-bit floats.
void save_checkpoint(const DenoiserModel& model, const std::string& path);
DenoiserModel load_checkpoint(const std::string& path);
// Variant that rejects a checkpoint whose architecture differs from `expected`.
DenoiserModel load_checkpoint(const std::string& path, const ArchDescriptor& expected);

}  // namespace freqdiff
