#include "freqdiff/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "freqdiff/corruption.hpp"
#include "freqdiff/csv.hpp"
#include "freqdiff/denoiser.hpp"
#include "freqdiff/diffusion.hpp"
#include "freqdiff/fft.hpp"
#include "freqdiff/schedule.hpp"

namespace freqdiff {

namespace fs = std::filesystem;

void apply_overrides(RunConfig& cfg, const CliOverrides& o) {
    if (!o.seeds.empty()) cfg.seeds = o.seeds;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.stride > 0) cfg.sample.stride = o.stride;
    if (o.threads > 0) cfg.threads = o.threads;
    validate_config(cfg);
}

Dataset make_dataset(const DatasetConfig& d) {
    if (d.kind == "gaussian") {
        Field mean(d.h, d.w, d.mean);
        Rng rng = Rng::derive(d.gen_seed, 0xDA7AULL);
        return gen_gaussian_dataset(d.n, d.h, d.w, mean, d.var, rng, d.clip);
    }
    if (d.kind == "glyphs") return gen_glyph_dataset(d.n, d.h, d.w, d.gen_seed);
    if (d.kind == "blobs") return gen_blob_dataset(d.n, d.h, d.w, d.gen_seed);
    if (d.kind == "bandlimited") {
        Dataset src = d.source == "blobs" ? gen_blob_dataset(d.n, d.h, d.w, d.gen_seed)
                                          : gen_glyph_dataset(d.n, d.h, d.w, d.gen_seed);
        Rng rng = Rng::derive(d.gen_seed, 0xBA2DULL);
        return gen_bandlimited_dataset(d.n, d.h, d.w, src, d.band_lo, d.band_hi, rng,
                                       d.noise_gamma, d.noise_band_lo, d.noise_band_hi);
    }
    Dataset ds;
    if (d.kind == "mnist")
        ds = load_mnist_idx(d.images_path, d.labels_path);
    else if (d.kind == "fdds")
        ds = load_fdds(d.path);
    else
        throw ConfigError("config: unknown dataset kind: " + d.kind);
    if (d.n > 0 && ds.n() > d.n) {
        ds.images.resize(static_cast<std::size_t>(d.n));
        if (!ds.labels.empty()) ds.labels.resize(static_cast<std::size_t>(d.n));
        ds.meta["truncated_to"] = std::to_string(d.n);
    }
    return ds;
}

FeatureExtractor build_extractor(const RunConfig& cfg, const Dataset& ds) {
    const MetricsConfig& m = cfg.metrics;
    if (m.extractor == "raw_pixels") return FeatureExtractor::raw_pixels();
    if (m.extractor == "random_projection")
        return FeatureExtractor::random_projection(m.rp_dim, m.rp_seed);
    if (!m.classifier_path.empty())
        return FeatureExtractor::trained_classifier(load_classifier(m.classifier_path));
    if (ds.labels.empty())
        throw std::runtime_error(
            "metrics: trained_classifier needs labeled data or classifier_path");
    int n_classes = 1 + *std::max_element(ds.labels.begin(), ds.labels.end());
    Classifier::Arch a;
    a.in_h = ds.h;
    a.in_w = ds.w;
    a.n_classes = std::max(n_classes, 2);
    Classifier clf(a);
    Rng rng = Rng::derive(0xC1A55ULL, 0);
    clf.init(rng);
    clf.train(ds.images, ds.labels, m.classifier_epochs, 32, 1e-3, 0xC1A55ULL);
    return FeatureExtractor::trained_classifier(std::move(clf));
}

namespace {

std::string now_iso8601() {
    std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void prepare_out_dir(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    std::ofstream f(fs::path(cfg.out_dir) / "config.ini");
    if (!f) throw std::runtime_error("cannot write config copy in " + cfg.out_dir);
    f << config_to_ini(cfg);
}

std::string artifact(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

std::string seed_name(const std::string& stem, std::uint64_t seed, const std::string& ext) {
    return stem + "_s" + std::to_string(seed) + ext;
}

// sanitize error text for a single CSV cell
std::string cell_safe(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

DenoiserModel train_one(const RunConfig& cfg, const Dataset& ds, const SpectralWeight& w,
                        std::uint64_t seed, std::vector<double>* curve_out) {
    DiffusionSchedule s = make_schedule(cfg.T, cfg.beta_start, cfg.beta_end);
    Rng init_rng = Rng::derive(seed, 1);
    DenoiserModel model = init_model(cfg.arch, init_rng);
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    std::vector<double> curve = train(model, ds.images, s, w, tc);
    if (curve_out) *curve_out = curve;
    return model;
}

std::vector<Field> sample_from(const RunConfig& cfg, const DenoiserModel& model,
                               const SpectralWeight& w, std::uint64_t seed) {
    DiffusionSchedule s = make_schedule(cfg.T, cfg.beta_start, cfg.beta_end);
    SampleOptions opt;
    opt.stride = cfg.sample.stride;
    opt.white_injection = cfg.sample.white_injection;
    opt.deterministic = cfg.sample.deterministic;
    opt.threads = cfg.threads;
    return sample(make_eps_fn(model, s), s, w, cfg.sample.count, cfg.dataset.h, cfg.dataset.w,
                  Rng::derive(seed, 2).stream_seed(), opt);
}

std::vector<Field> eval_real_subset(const Dataset& ds, int n_real) {
    int n = std::min<int>(n_real, ds.n());
    return std::vector<Field>(ds.images.begin(), ds.images.begin() + n);
}

MetricOptions metric_options(const RunConfig& cfg, int n_real, int n_gen) {
    MetricOptions opt;
    opt.subset_size = std::min(cfg.metrics.subset_size, std::min(n_real, n_gen));
    opt.n_subsets = cfg.metrics.n_subsets;
    opt.n_bins = cfg.metrics.n_bins;
    return opt;
}

// mean per-bin spectral power inside the closed radial band [a, b]
double mean_band_power(const std::vector<Field>& images, double a, double b) {
    if (images.empty()) return 0.0;
    FrequencyGrid g = build_grid(images[0].h, images[0].w);
    Field mask = band_mask(g, a, b, false, false);
    double bins = 0.0;
    for (double m : mask.v) bins += m;
    if (bins == 0.0) return 0.0;
    double acc = 0.0;
    for (const Field& img : images) {
        CField spec = fft2(img);
        double p = 0.0;
        for (std::size_t i = 0; i < spec.v.size(); ++i)
            p += mask.v[i] * std::norm(spec.v[i]);
        acc += p / bins;
    }
    return acc / static_cast<double>(images.size());
}

struct Moments {
    double mean = 0.0, stderr_ = 0.0, stddev = 0.0;
    int n = 0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    m.n = static_cast<int>(xs.size());
    if (m.n == 0) return m;
    for (double x : xs) m.mean += x;
    m.mean /= m.n;
    if (m.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.stddev = std::sqrt(ss / (m.n - 1));
        m.stderr_ = m.stddev / std::sqrt(static_cast<double>(m.n));
    }
    return m;
}

}  // namespace

void cmd_train(const RunConfig& cfg) {
    prepare_out_dir(cfg);
    Dataset ds = make_dataset(cfg.dataset);
    for (std::uint64_t seed : cfg.seeds) {
        std::vector<double> curve;
        DenoiserModel model = train_one(cfg, ds, cfg.weight, seed, &curve);
        save_checkpoint(model, artifact(cfg, seed_name("model", seed, ".fdck")));
        CsvWriter csv(artifact(cfg, seed_name("loss", seed, ".csv")),
                      {"epoch", "loss", "wrote_at"});
        for (std::size_t e = 0; e < curve.size(); ++e)
            csv.row({CsvWriter::num(static_cast<int>(e) + 1), CsvWriter::num(curve[e]),
                     now_iso8601()});
    }
}

void cmd_sample(const RunConfig& cfg) {
    prepare_out_dir(cfg);
    for (std::uint64_t seed : cfg.seeds) {
        DenoiserModel model =
            load_checkpoint(artifact(cfg, seed_name("model", seed, ".fdck")), cfg.arch);
        std::vector<Field> xs = sample_from(cfg, model, cfg.weight, seed);
        Dataset out;
        out.h = cfg.dataset.h;
        out.w = cfg.dataset.w;
        out.images = xs;
        out.name = cfg.name + "_samples";
        out.meta["seed"] = std::to_string(seed);
        out.meta["stride"] = std::to_string(cfg.sample.stride);
        out.meta["weight"] = weight_label(cfg.weight);
        save_fdds(artifact(cfg, seed_name("samples", seed, ".fdds")), out);
        int cols = std::min<int>(8, static_cast<int>(xs.size()));
        save_contact_sheet(artifact(cfg, seed_name("samples", seed, ".png")), xs, cols);
    }
}

void cmd_eval(const RunConfig& cfg) {
    prepare_out_dir(cfg);
    Dataset ds = make_dataset(cfg.dataset);
    FeatureExtractor ex = build_extractor(cfg, ds);
    std::vector<Field> real = eval_real_subset(ds, cfg.metrics.n_real);

    CsvWriter csv(artifact(cfg, "eval.csv"),
                  {"run_id", "seed", "weight", "fid", "kid", "kid_se", "spectral_fid", "n_real",
                   "n_gen", "extractor", "wrote_at"});
    std::ofstream results(artifact(cfg, "results.txt"));
    for (std::uint64_t seed : cfg.seeds) {
        DenoiserModel model =
            load_checkpoint(artifact(cfg, seed_name("model", seed, ".fdck")), cfg.arch);
        std::vector<Field> gen = sample_from(cfg, model, cfg.weight, seed);
        MetricReport r = compute_metrics(real, gen, ex,
                                         metric_options(cfg, static_cast<int>(real.size()),
                                                        static_cast<int>(gen.size())));
        csv.row({cfg.name, CsvWriter::num(static_cast<unsigned long long>(seed)),
                 weight_label(cfg.weight), CsvWriter::num(r.fid), CsvWriter::num(r.kid),
                 CsvWriter::num(r.kid_se), CsvWriter::num(r.spectral_fid),
                 CsvWriter::num(r.n_real), CsvWriter::num(r.n_gen), r.extractor, now_iso8601()});
        results << "seed=" << seed << " " << report_to_text(r) << "\n";
    }
}

void cmd_sweep_gamma(const RunConfig& cfg) {
    prepare_out_dir(cfg);
    Dataset ds = make_dataset(cfg.dataset);
    FeatureExtractor ex = build_extractor(cfg, ds);
    std::vector<Field> real = eval_real_subset(ds, cfg.metrics.n_real);

    CsvWriter csv(artifact(cfg, "sweep_gamma.csv"),
                  {"run_id", "gamma_l", "gamma_h", "seed", "row_kind", "status", "fid", "kid",
                   "kid_se", "spectral_fid", "fid_stderr", "fid_stddev", "kid_stderr",
                   "kid_stddev", "spectral_fid_stderr", "spectral_fid_stddev", "wrote_at"});

    for (double gl : cfg.sweep.gammas) {
        double gh = 1.0 - gl;
        SpectralWeight w = SpectralWeight::two_band(gl, gh, 0.0, 0.5, 0.5, 1.0);
        std::vector<double> fids, kids, sfids;
        for (std::uint64_t seed : cfg.seeds) {
            std::string status = "ok";
            MetricReport r;
            try {
                DenoiserModel model = train_one(cfg, ds, w, seed, nullptr);
                std::vector<Field> gen = sample_from(cfg, model, w, seed);
                r = compute_metrics(real, gen, ex,
                                    metric_options(cfg, static_cast<int>(real.size()),
                                                   static_cast<int>(gen.size())));
                fids.push_back(r.fid);
                kids.push_back(r.kid);
                sfids.push_back(r.spectral_fid);
            } catch (const std::exception& e) {
                status = std::string("error: ") + cell_safe(e.what());
            }
            bool ok = status == "ok";
            csv.row({cfg.name, CsvWriter::num(gl), CsvWriter::num(gh),
                     CsvWriter::num(static_cast<unsigned long long>(seed)), "seed", status,
                     ok ? CsvWriter::num(r.fid) : "", ok ? CsvWriter::num(r.kid) : "",
                     ok ? CsvWriter::num(r.kid_se) : "", ok ? CsvWriter::num(r.spectral_fid) : "",
                     "", "", "", "", "", "", now_iso8601()});
            csv.flush();
        }
        Moments mf = moments(fids), mk = moments(kids), ms = moments(sfids);
        bool any = mf.n > 0;
        csv.row({cfg.name, CsvWriter::num(gl), CsvWriter::num(gh), "", "aggregate",
                 any ? "ok" : "error: all seeds failed", any ? CsvWriter::num(mf.mean) : "",
                 any ? CsvWriter::num(mk.mean) : "", "", any ? CsvWriter::num(ms.mean) : "",
                 any ? CsvWriter::num(mf.stderr_) : "", any ? CsvWriter::num(mf.stddev) : "",
                 any ? CsvWriter::num(mk.stderr_) : "", any ? CsvWriter::num(mk.stddev) : "",
                 any ? CsvWriter::num(ms.stderr_) : "", any ? CsvWriter::num(ms.stddev) : "",
                 now_iso8601()});
        csv.flush();
    }
}

void cmd_corrupt_recover(const RunConfig& cfg) {
    if (cfg.sweep.bands.empty())
        throw ConfigError("config: corrupt-recover needs [sweep] bands");
    prepare_out_dir(cfg);
    Dataset clean = make_dataset(cfg.dataset);
    FeatureExtractor ex = build_extractor(cfg, clean);
    std::vector<Field> real = eval_real_subset(clean, cfg.metrics.n_real);

    CsvWriter csv(artifact(cfg, "corrupt_recover.csv"),
                  {"run_id", "a_c", "b_c", "gamma_c", "seed", "model", "row_kind", "status",
                   "fid", "kid", "kid_se", "spectral_fid", "band_power_samples",
                   "band_power_clean", "wrote_at"});

    const double gamma_c = cfg.corruption.spec.gamma_c;
    for (const auto& band : cfg.sweep.bands) {
        CorruptionSpec spec;
        spec.gamma_c = gamma_c;
        spec.a_c = band.first;
        spec.b_c = band.second;
        double clean_bp = mean_band_power(real, spec.a_c, spec.b_c);

        SpectralWeight recovery =
            recovery_weight(spec, cfg.corruption.recovery_gamma_l, cfg.corruption.recovery_gamma_h);
        struct Variant {
            const char* name;
            SpectralWeight w;
        };
        const Variant variants[2] = {{"baseline", SpectralWeight::flat()},
                                     {"frequency", recovery}};

        std::vector<double> fids[2], kids[2], sfids[2], bps[2];
        for (std::uint64_t seed : cfg.seeds) {
            std::vector<Field> corrupted =
                corrupt_dataset(clean.images, spec, Rng::derive(seed, 0xC0DEULL).stream_seed());
            Dataset corrupted_ds = clean;
            corrupted_ds.images = corrupted;
            for (int vi = 0; vi < 2; ++vi) {
                std::string status = "ok";
                MetricReport r;
                double bp = 0.0;
                try {
                    DenoiserModel model =
                        train_one(cfg, corrupted_ds, variants[vi].w, seed, nullptr);
                    std::vector<Field> gen = sample_from(cfg, model, variants[vi].w, seed);
                    r = compute_metrics(real, gen, ex,
                                        metric_options(cfg, static_cast<int>(real.size()),
                                                       static_cast<int>(gen.size())));
                    bp = mean_band_power(gen, spec.a_c, spec.b_c);
                    fids[vi].push_back(r.fid);
                    kids[vi].push_back(r.kid);
                    sfids[vi].push_back(r.spectral_fid);
                    bps[vi].push_back(bp);
                } catch (const std::exception& e) {
                    status = std::string("error: ") + cell_safe(e.what());
                }
                bool ok = status == "ok";
                csv.row({cfg.name, CsvWriter::num(spec.a_c), CsvWriter::num(spec.b_c),
                         CsvWriter::num(spec.gamma_c),
                         CsvWriter::num(static_cast<unsigned long long>(seed)), variants[vi].name,
                         "seed", status, ok ? CsvWriter::num(r.fid) : "",
                         ok ? CsvWriter::num(r.kid) : "", ok ? CsvWriter::num(r.kid_se) : "",
                         ok ? CsvWriter::num(r.spectral_fid) : "", ok ? CsvWriter::num(bp) : "",
                         CsvWriter::num(clean_bp), now_iso8601()});
                csv.flush();
            }
        }
        for (int vi = 0; vi < 2; ++vi) {
            Moments mf = moments(fids[vi]), mk = moments(kids[vi]), ms = moments(sfids[vi]),
                    mb = moments(bps[vi]);
            bool any = mf.n > 0;
            csv.row({cfg.name, CsvWriter::num(spec.a_c), CsvWriter::num(spec.b_c),
                     CsvWriter::num(spec.gamma_c), "", variants[vi].name, "aggregate",
                     any ? "ok" : "error: all seeds failed", any ? CsvWriter::num(mf.mean) : "",
                     any ? CsvWriter::num(mk.mean) : "", "", any ? CsvWriter::num(ms.mean) : "",
                     any ? CsvWriter::num(mb.mean) : "", CsvWriter::num(clean_bp),
                     now_iso8601()});
        }
        csv.flush();
    }
}

void cmd_spectrum(const RunConfig& cfg) {
    prepare_out_dir(cfg);
    Dataset ds = make_dataset(cfg.dataset);
    DiffusionSchedule s = make_schedule(cfg.T, cfg.beta_start, cfg.beta_end);
    FrequencyGrid g = build_grid(ds.h, ds.w);
    const std::uint64_t seed = cfg.seeds.front();
    const int batch = std::min(cfg.spectrum.batch, ds.n());
    std::vector<Field> base(ds.images.begin(), ds.images.begin() + batch);

    CsvWriter csv(artifact(cfg, "spectrum.csv"),
                  {"t", "bin", "bin_center", "mean_power", "empty", "wrote_at"});
    for (int t : cfg.spectrum.timesteps) {
        std::vector<Field> batch_t;
        if (t == 0) {
            batch_t = base;  // the dataset's own spectrum, no noise
        } else {
            batch_t.reserve(base.size());
            for (std::size_t i = 0; i < base.size(); ++i) {
                Rng rng = Rng::derive(seed, (static_cast<std::uint64_t>(t) << 24) | i);
                batch_t.push_back(forward_jump(base[i], t, s, cfg.weight, g, rng).first);
            }
        }
        std::vector<SpectrumBin> bins = radial_power_spectrum(batch_t, cfg.spectrum.n_bins);
        for (std::size_t b = 0; b < bins.size(); ++b)
            csv.row({CsvWriter::num(t), CsvWriter::num(static_cast<int>(b)),
                     CsvWriter::num(bins[b].center), CsvWriter::num(bins[b].power),
                     bins[b].empty ? "1" : "0", now_iso8601()});
    }
}

}  // namespace freqdiff
