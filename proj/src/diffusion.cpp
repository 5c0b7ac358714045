#include "freqdiff/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "freqdiff/parallel.hpp"

namespace freqdiff {
namespace {

void check_t(int t, const DiffusionSchedule& s, const char* what) {
    if (t < 0 || t >= s.T) throw std::invalid_argument(std::string(what) + ": t out of range");
}

}  // namespace

Field forward_step(const Field& x_prev, int t, const DiffusionSchedule& s,
                   const NoiseField& noise) {
    check_t(t, s, "forward_step");
    check_same_shape(x_prev, noise.values, "forward_step");
    double sa = std::sqrt(s.alpha[t]);
    double sb = std::sqrt(s.beta[t]);
    Field out = x_prev;
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = sa * out.v[i] + sb * noise.values.v[i];
    return out;
}

std::pair<Field, NoiseField> forward_jump(const Field& x0, int t, const DiffusionSchedule& s,
                                          const SpectralWeight& w, const FrequencyGrid& g,
                                          Rng& rng) {
    check_t(t, s, "forward_jump");
    check_same_shape(x0, g.radial, "forward_jump");
    NoiseField eps = draw_noise(w, g, rng, true);
    double sa = std::sqrt(s.alpha_bar[t]);
    double sn = std::sqrt(1.0 - s.alpha_bar[t]);
    Field x_t = x0;
    for (std::size_t i = 0; i < x_t.v.size(); ++i)
        x_t.v[i] = sa * x_t.v[i] + sn * eps.values.v[i];
    return {std::move(x_t), std::move(eps)};
}

double training_loss(const EpsFn& model, const std::vector<Field>& batch,
                     const DiffusionSchedule& s, const SpectralWeight& w, std::uint64_t seed) {
    if (batch.empty()) throw std::invalid_argument("training_loss: empty batch");
    FrequencyGrid g = build_grid(batch[0].h, batch[0].w);
    // Accumulate in content order, not container order, so the reduction (and
    // therefore the value, to the last bit) ignores how the batch was arranged.
    std::vector<std::pair<std::uint64_t, const Field*>> items;
    items.reserve(batch.size());
    for (const Field& x0 : batch)
        items.emplace_back(fnv1a64(x0.v.data(), x0.v.size() * sizeof(double)), &x0);
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    double total = 0.0;
    for (const auto& [key, px0] : items) {
        const Field& x0 = *px0;
        Rng rng = Rng::derive(seed, key);
        int t = rng.uniform_int(s.T);
        auto [x_t, eps] = forward_jump(x0, t, s, w, g, rng);
        Field pred = model(x_t, t);
        check_same_shape(pred, eps.values, "training_loss");
        double item = 0.0;
        for (std::size_t i = 0; i < pred.v.size(); ++i) {
            double d = pred.v[i] - eps.values.v[i];
            item += d * d;
        }
        total += item / static_cast<double>(pred.v.size());
    }
    return total / static_cast<double>(batch.size());
}

Field reverse_step(const EpsFn& model, const Field& x_t, int t, const DiffusionSchedule& s,
                   const SpectralWeight& w, Rng& rng, bool white_injection, bool deterministic) {
    if (t < 1 || t >= s.T)
        throw std::invalid_argument("reverse_step: t must be in [1, T)");
    double ab = s.alpha_bar[t];
    double ab_prev = s.alpha_bar[t - 1];
    double beta = s.beta[t];
    double alpha = s.alpha[t];
    Field eps = model(x_t, t);
    check_same_shape(eps, x_t, "reverse_step");
    double coef = beta / std::sqrt(1.0 - ab);
    double inv_sa = 1.0 / std::sqrt(alpha);
    Field mu = x_t;
    for (std::size_t i = 0; i < mu.v.size(); ++i)
        mu.v[i] = (mu.v[i] - coef * eps.v[i]) * inv_sa;
    if (t == 1 || deterministic) return mu;
    double sigma = std::sqrt((1.0 - ab_prev) / (1.0 - ab) * beta);
    FrequencyGrid g = build_grid(x_t.h, x_t.w);
    SpectralWeight inj = white_injection ? SpectralWeight::flat() : w;
    NoiseField z = draw_noise(inj, g, rng, true);
    axpy(mu, sigma, z.values);
    return mu;
}

std::vector<Field> sample(const EpsFn& model, const DiffusionSchedule& s, const SpectralWeight& w,
                          int count, int height, int width, std::uint64_t seed,
                          const SampleOptions& opt) {
    if (count < 1) throw std::invalid_argument("sample: count must be positive");
    StridedSchedule strided = make_strided(s, opt.stride);
    FrequencyGrid g = build_grid(height, width);
    SpectralWeight inj = opt.white_injection ? SpectralWeight::flat() : w;

    std::vector<Field> out(count);
    parallel_for(count, opt.threads, [&](int i) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(i));
        Field x = draw_noise(w, g, rng, true).values;
        for (std::size_t k = strided.steps.size() - 1; k >= 1; --k) {
            int t_hi = strided.steps[k];
            double ab_hi = strided.alpha_bar[k];
            double ab_lo = strided.alpha_bar[k - 1];
            double a_eff = ab_hi / ab_lo;
            double b_eff = 1.0 - a_eff;
            Field eps = model(x, t_hi);
            check_same_shape(eps, x, "sample");
            double coef = b_eff / std::sqrt(1.0 - ab_hi);
            double inv_sa = 1.0 / std::sqrt(a_eff);
            for (std::size_t j = 0; j < x.v.size(); ++j)
                x.v[j] = (x.v[j] - coef * eps.v[j]) * inv_sa;
            if (k > 1 && !opt.deterministic) {
                double sigma = std::sqrt((1.0 - ab_lo) / (1.0 - ab_hi) * b_eff);
                NoiseField z = draw_noise(inj, g, rng, true);
                axpy(x, sigma, z.values);
            }
        }
        out[i] = std::move(x);
    });
    return out;
}

}  // namespace freqdiff
