#include "freqdiff/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "freqdiff/bin_io.hpp"
#include "freqdiff/fft.hpp"
#include "freqdiff/tensor.hpp"

namespace freqdiff {

DenoiserModel init_model(const ArchDescriptor& arch, Rng& rng) {
    validate_arch(arch);
    DenoiserModel m;
    m.arch = arch;
    m.net = UNet<float>(arch);
    m.net.init(rng);
    return m;
}

Field predict_eps(const DenoiserModel& model, const Field& x_t, int t,
                  const DiffusionSchedule& s) {
    if (t < 0 || t >= s.T) throw std::invalid_argument("predict_eps: t out of range");
    if (x_t.h != model.arch.in_h || x_t.w != model.arch.in_w)
        throw std::invalid_argument("predict_eps: input shape does not match the model");
    return to_field(model.net.forward(to_tensor<float>(x_t), t, s.T));
}

EpsFn make_eps_fn(const DenoiserModel& model, const DiffusionSchedule& s) {
    const DenoiserModel* m = &model;
    const int T = s.T;
    return [m, T](const Field& x_t, int t) -> Field {
        if (t < 0 || t >= T) throw std::invalid_argument("eps fn: t out of range");
        return to_field(m->net.forward(to_tensor<float>(x_t), t, T));
    };
}

Field oracle_eps_gaussian(const Field& x_t, int t, const DiffusionSchedule& s,
                          const SpectralWeight& w, const Field& data_mean, double data_var) {
    if (t < 0 || t >= s.T)
        throw std::invalid_argument("oracle_eps_gaussian: t out of range");
    check_same_shape(x_t, data_mean, "oracle_eps_gaussian");
    if (!(data_var >= 0.0))
        throw std::invalid_argument("oracle_eps_gaussian: data variance must be >= 0");
    validate_weight(w);

    FrequencyGrid g = build_grid(x_t.h, x_t.w);
    Field dens = spectral_density(w, g);
    double total = 0.0;
    for (double d : dens.v) total += d;
    // per-bin variance of the unit-variance shaped noise
    double c2 = total > 0.0 ? static_cast<double>(x_t.h) * x_t.w / total : 0.0;

    double ab = s.alpha_bar[t];
    double rem = 1.0 - ab;
    double sa = std::sqrt(ab);
    double srem = std::sqrt(rem);

    Field centered = x_t;
    for (std::size_t i = 0; i < centered.v.size(); ++i) centered.v[i] -= sa * data_mean.v[i];
    CField y = fft2(centered);
    // Per bin: observation = sqrt(abar)*signal + sqrt(1-abar)*noise with
    // variances data_var and rho; conditional mean of the noise coefficient is
    // a linear shrinkage of the observation.
    for (std::size_t i = 0; i < y.v.size(); ++i) {
        double rho = c2 * dens.v[i];
        double den = ab * data_var + rem * rho;
        double sh = den > 0.0 ? srem * rho / den : 0.0;
        y.v[i] *= sh;
    }
    return ifft2_real(y);
}

EpsFn make_oracle_eps_fn(const DiffusionSchedule& s, const SpectralWeight& w,
                         const Field& data_mean, double data_var) {
    return [s, w, data_mean, data_var](const Field& x_t, int t) -> Field {
        return oracle_eps_gaussian(x_t, t, s, w, data_mean, data_var);
    };
}

namespace {

double param_norm(const DenoiserModel& model) {
    double n = 0.0;
    for (float p : model.net.params().data) n += static_cast<double>(p) * p;
    return std::sqrt(n);
}

}  // namespace

std::vector<double> train(DenoiserModel& model, const std::vector<Field>& dataset,
                          const DiffusionSchedule& s, const SpectralWeight& w,
                          const TrainConfig& cfg) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    if (cfg.epochs <= 0 || cfg.batch_size <= 0)
        throw std::invalid_argument("train: epochs and batch size must be positive");
    if (!(cfg.learning_rate >= 0.0) || !(cfg.clip_norm > 0.0) || !(cfg.eps > 0.0) ||
        !(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0))
        throw std::invalid_argument("train: bad optimizer settings");
    const int H = model.arch.in_h, W = model.arch.in_w, hw = H * W;
    for (const Field& f : dataset)
        if (f.h != H || f.w != W)
            throw std::invalid_argument("train: item shape does not match the model");
    validate_weight(w);
    FrequencyGrid g = build_grid(H, W);

    const int n = static_cast<int>(dataset.size());
    std::vector<std::uint64_t> key(n);
    for (int i = 0; i < n; ++i)
        key[i] = fnv1a64(dataset[i].v.data(), dataset[i].v.size() * sizeof(double));
    // canonical item order keyed by content, so the curve is independent of
    // how the dataset happened to be assembled
    std::vector<int> canon(n);
    std::iota(canon.begin(), canon.end(), 0);
    std::stable_sort(canon.begin(), canon.end(), [&](int a, int b) { return key[a] < key[b]; });

    ParamStore<float>& ps = model.net.params();
    Adam<float> opt;
    opt.lr = cfg.learning_rate;
    opt.b1 = cfg.beta1;
    opt.b2 = cfg.beta2;
    opt.eps = cfg.eps;
    opt.init(ps.data.size());

    std::vector<double> curve;
    curve.reserve(cfg.epochs);
    long long step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<int> order = canon;
        Rng sh = Rng::derive(cfg.seed, 1000 + static_cast<std::uint64_t>(epoch));
        for (int i = n - 1; i > 0; --i) std::swap(order[i], order[sh.uniform_int(i + 1)]);

        double loss_sum = 0.0;
        for (int b0 = 0; b0 < n; b0 += cfg.batch_size) {
            int bn = std::min(cfg.batch_size, n - b0);
            model.net.zero_grad();
            double batch_loss = 0.0;
            for (int j = 0; j < bn; ++j) {
                const Field& x0 = dataset[order[b0 + j]];
                std::uint64_t ik = key[order[b0 + j]];
                Rng r = Rng::derive(cfg.seed ^ (ik * 0x9E3779B97F4A7C15ULL),
                                    0xD1F0000ULL + static_cast<std::uint64_t>(epoch));
                int t = r.uniform_int(s.T);
                auto drawn = forward_jump(x0, t, s, w, g, r);
                const Field& x_t = drawn.first;
                const Field& eps = drawn.second.values;
                Tensor<float> pred = model.net.forward_train(to_tensor<float>(x_t), t, s.T);
                Tensor<float> dout(1, H, W);
                double mse = 0.0;
                for (int p = 0; p < hw; ++p) {
                    double d = static_cast<double>(pred.v[p]) - eps.v[p];
                    mse += d * d;
                    dout.v[p] = static_cast<float>(2.0 * d / (static_cast<double>(hw) * bn));
                }
                mse /= hw;
                batch_loss += mse;
                model.net.backward(dout);
            }
            batch_loss /= bn;
            ++step;
            if (!std::isfinite(batch_loss)) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "train: non-finite loss at step %lld (parameter norm %.6g)", step,
                              param_norm(model));
                throw std::runtime_error(buf);
            }
            double gn = clip_grad_norm(ps.grad, cfg.clip_norm);
            if (!std::isfinite(gn)) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "train: non-finite gradient at step %lld (parameter norm %.6g)",
                              step, param_norm(model));
                throw std::runtime_error(buf);
            }
            opt.update(ps.data, ps.grad);
            loss_sum += batch_loss * bn;
        }
        curve.push_back(loss_sum / n);
    }
    return curve;
}

void save_checkpoint(const DenoiserModel& model, const std::string& path) {
    std::ofstream f = open_out(path);
    f.write("FDCK", 4);
    write_u32(f, 1u);
    write_str(f, arch_to_text(model.arch));
    const ParamStore<float>& ps = model.net.params();
    write_u32(f, static_cast<std::uint32_t>(ps.segs.size()));
    for (const auto& seg : ps.segs) {
        write_str(f, seg.name);
        write_u32(f, static_cast<std::uint32_t>(seg.n));
        write_f32s(f, ps.data.data() + seg.off, seg.n);
    }
    if (!f) throw std::runtime_error("failed writing checkpoint: " + path);
}

DenoiserModel load_checkpoint(const std::string& path) {
    std::ifstream f = open_in(path);
    expect_magic(f, "FDCK", "checkpoint");
    std::uint32_t ver = read_u32(f);
    if (ver != 1u) throw std::runtime_error("checkpoint: unsupported version");
    DenoiserModel m;
    m.arch = arch_from_text(read_str(f));
    validate_arch(m.arch);
    m.net = UNet<float>(m.arch);
    ParamStore<float>& ps = m.net.params();
    std::uint32_t nseg = read_u32(f);
    if (nseg != ps.segs.size())
        throw std::runtime_error("checkpoint: segment table does not match the architecture");
    for (std::uint32_t i = 0; i < nseg; ++i) {
        std::string name = read_str(f);
        std::uint32_t cnt = read_u32(f);
        if (name != ps.segs[i].name || cnt != ps.segs[i].n)
            throw std::runtime_error("checkpoint: segment '" + name +
                                     "' does not match the architecture");
        read_f32s(f, ps.data.data() + ps.segs[i].off, cnt);
    }
    return m;
}

DenoiserModel load_checkpoint(const std::string& path, const ArchDescriptor& expected) {
    DenoiserModel m = load_checkpoint(path);
    if (!arch_equal(m.arch, expected))
        throw std::runtime_error("checkpoint: architecture mismatch: " + path);
    return m;
}

}  // namespace freqdiff
