#include "freqdiff/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "freqdiff/bin_io.hpp"
#include "freqdiff/spectral.hpp"
#include "freqdiff/tensor.hpp"

namespace freqdiff {

namespace {

constexpr double kCovRidge = 1e-6;

void fit_gaussian(const FeatureMatrix& f, Eigen::VectorXd& mu, Eigen::MatrixXd& cov) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
        f.v.data(), f.n, f.d);
    mu = X.colwise().mean();
    Eigen::MatrixXd centered = X.rowwise() - mu.transpose();
    cov = centered.transpose() * centered / static_cast<double>(f.n - 1);
    cov.diagonal().array() += kCovRidge;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double frechet(const Eigen::VectorXd& mu1, const Eigen::MatrixXd& s1, const Eigen::VectorXd& mu2,
               const Eigen::MatrixXd& s2) {
    Eigen::MatrixXd s1h = psd_sqrt(s1);
    Eigen::MatrixXd prod = s1h * s2 * s1h;
    prod = 0.5 * (prod + prod.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(prod);
    double tr_sqrt = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    double d = (mu1 - mu2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * tr_sqrt;
    return std::max(d, 0.0);
}

double frechet_from_features(const FeatureMatrix& a, const FeatureMatrix& b) {
    Eigen::VectorXd mu1, mu2;
    Eigen::MatrixXd s1, s2;
    fit_gaussian(a, mu1, s1);
    fit_gaussian(b, mu2, s2);
    return frechet(mu1, s1, mu2, s2);
}

void check_features(const FeatureMatrix& real, const FeatureMatrix& gen, const char* what) {
    if (real.d != gen.d) throw std::invalid_argument(std::string(what) + ": feature dim mismatch");
    if (real.d <= 0) throw std::invalid_argument(std::string(what) + ": empty features");
    if (real.n < 2 || gen.n < 2)
        throw std::invalid_argument(std::string(what) + ": need at least 2 samples per set");
}

std::vector<int> sample_distinct(int n, int k, Rng& rng) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        int j = i + rng.uniform_int(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace

double fid(const FeatureMatrix& real, const FeatureMatrix& gen) {
    check_features(real, gen, "fid");
    return frechet_from_features(real, gen);
}

KidResult kid_full(const FeatureMatrix& real, const FeatureMatrix& gen, int subset_size,
                   int n_subsets, std::uint64_t seed) {
    check_features(real, gen, "kid");
    if (subset_size < 2) throw std::invalid_argument("kid: subset_size must be >= 2");
    if (subset_size > std::min(real.n, gen.n))
        throw std::invalid_argument("kid: subset_size exceeds sample count");
    if (n_subsets < 1) throw std::invalid_argument("kid: n_subsets must be >= 1");

    const int s = subset_size, d = real.d;
    auto kernel = [d](const double* x, const double* y) {
        double dot = 0.0;
        for (int i = 0; i < d; ++i) dot += x[i] * y[i];
        double u = dot / d + 1.0;
        return u * u * u;
    };

    std::vector<double> vals(n_subsets);
    for (int t = 0; t < n_subsets; ++t) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(t));
        std::vector<int> ir = sample_distinct(real.n, s, rng);
        std::vector<int> ig = sample_distinct(gen.n, s, rng);
        double kxx = 0.0, kyy = 0.0, kxy = 0.0;
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) {
                if (i != j) {
                    kxx += kernel(real.row(ir[i]), real.row(ir[j]));
                    kyy += kernel(gen.row(ig[i]), gen.row(ig[j]));
                }
                kxy += kernel(real.row(ir[i]), gen.row(ig[j]));
            }
        double denom = static_cast<double>(s) * (s - 1);
        vals[t] = kxx / denom + kyy / denom - 2.0 * kxy / (static_cast<double>(s) * s);
    }
    KidResult r;
    for (double v : vals) r.mean += v;
    r.mean /= n_subsets;
    if (n_subsets > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - r.mean) * (v - r.mean);
        r.se = std::sqrt(ss / (n_subsets - 1)) / std::sqrt(static_cast<double>(n_subsets));
    }
    return r;
}

double kid(const FeatureMatrix& real, const FeatureMatrix& gen, int subset_size, int n_subsets,
           std::uint64_t seed) {
    return kid_full(real, gen, subset_size, n_subsets, seed).mean;
}

namespace {

FeatureMatrix log_spectrum_profiles(const std::vector<Field>& images, int n_bins,
                                    double log_floor) {
    FeatureMatrix f(static_cast<int>(images.size()), n_bins);
    for (std::size_t i = 0; i < images.size(); ++i) {
        std::vector<SpectrumBin> bins = radial_power_spectrum(images[i], n_bins);
        for (int j = 0; j < n_bins; ++j)
            f.v[i * static_cast<std::size_t>(n_bins) + j] =
                std::log(std::max(bins[j].power, log_floor));
    }
    return f;
}

}  // namespace

double spectral_fid(const std::vector<Field>& real, const std::vector<Field>& gen, int n_bins,
                    double log_floor) {
    if (n_bins < 4) throw std::invalid_argument("spectral_fid: n_bins must be >= 4");
    if (real.size() < 2 || gen.size() < 2)
        throw std::invalid_argument("spectral_fid: need at least 2 images per set");
    if (!(log_floor > 0.0)) throw std::invalid_argument("spectral_fid: log floor must be > 0");
    FeatureMatrix fr = log_spectrum_profiles(real, n_bins, log_floor);
    FeatureMatrix fg = log_spectrum_profiles(gen, n_bins, log_floor);
    return frechet_from_features(fr, fg);
}

// ---------------------------------------------------------------------------
// Classifier

struct Classifier::Trace {
    std::vector<float> col1, a1, s1, p1;
    std::vector<float> col2, a2, s2, p2;
    std::vector<float> f1, sf, lg;
};

Classifier::Classifier(const Arch& a) : arch_(a) {
    if (a.in_h < 4 || a.in_w < 4 || a.in_h % 4 != 0 || a.in_w % 4 != 0)
        throw std::invalid_argument("classifier: input dims must be multiples of 4");
    if (a.c1 <= 0 || a.c2 <= 0 || a.feat_dim <= 0 || a.n_classes < 2)
        throw std::invalid_argument("classifier: bad arch");
    const int flat = a.c2 * (a.in_h / 4) * (a.in_w / 4);
    off_.w1 = ps_.add("conv1.w", static_cast<std::size_t>(a.c1) * 9);
    off_.b1 = ps_.add("conv1.b", static_cast<std::size_t>(a.c1));
    off_.w2 = ps_.add("conv2.w", static_cast<std::size_t>(a.c2) * a.c1 * 9);
    off_.b2 = ps_.add("conv2.b", static_cast<std::size_t>(a.c2));
    off_.wd1 = ps_.add("fc1.w", static_cast<std::size_t>(a.feat_dim) * flat);
    off_.bd1 = ps_.add("fc1.b", static_cast<std::size_t>(a.feat_dim));
    off_.wd2 = ps_.add("fc2.w", static_cast<std::size_t>(a.n_classes) * a.feat_dim);
    off_.bd2 = ps_.add("fc2.b", static_cast<std::size_t>(a.n_classes));
}

void Classifier::init(Rng& rng) {
    const int flat = arch_.c2 * (arch_.in_h / 4) * (arch_.in_w / 4);
    fill_fan_in_uniform(ps_.p(off_.w1), static_cast<std::size_t>(arch_.c1) * 9, 9, rng);
    fill_fan_in_uniform(ps_.p(off_.w2), static_cast<std::size_t>(arch_.c2) * arch_.c1 * 9,
                        static_cast<std::size_t>(arch_.c1) * 9, rng);
    fill_fan_in_uniform(ps_.p(off_.wd1), static_cast<std::size_t>(arch_.feat_dim) * flat,
                        static_cast<std::size_t>(flat), rng);
    fill_fan_in_uniform(ps_.p(off_.wd2), static_cast<std::size_t>(arch_.n_classes) * arch_.feat_dim,
                        static_cast<std::size_t>(arch_.feat_dim), rng);
}

void Classifier::forward_into(const Field& img, Trace& tr) const {
    if (img.h != arch_.in_h || img.w != arch_.in_w)
        throw std::invalid_argument("classifier: image shape mismatch");
    const int h = arch_.in_h, w = arch_.in_w, hw = h * w;
    const int h2 = h / 2, w2 = w / 2, h4 = h / 4, w4 = w / 4;
    const int flat = arch_.c2 * h4 * w4;
    Tensor<float> x = to_tensor<float>(img);

    tr.col1.resize(static_cast<std::size_t>(9) * hw);
    im2col3(x.v.data(), 1, h, w, tr.col1.data());
    tr.a1.assign(static_cast<std::size_t>(arch_.c1) * hw, 0.0f);
    conv3_forward(ps_.p(off_.w1), ps_.p(off_.b1), tr.col1.data(), 1, arch_.c1, hw, tr.a1.data());
    tr.s1.resize(tr.a1.size());
    silu_forward(tr.a1.data(), tr.a1.size(), tr.s1.data());
    tr.p1.assign(static_cast<std::size_t>(arch_.c1) * h2 * w2, 0.0f);
    avgpool2_forward(tr.s1.data(), arch_.c1, h, w, tr.p1.data());

    tr.col2.resize(static_cast<std::size_t>(arch_.c1) * 9 * h2 * w2);
    im2col3(tr.p1.data(), arch_.c1, h2, w2, tr.col2.data());
    tr.a2.assign(static_cast<std::size_t>(arch_.c2) * h2 * w2, 0.0f);
    conv3_forward(ps_.p(off_.w2), ps_.p(off_.b2), tr.col2.data(), arch_.c1, arch_.c2, h2 * w2,
                  tr.a2.data());
    tr.s2.resize(tr.a2.size());
    silu_forward(tr.a2.data(), tr.a2.size(), tr.s2.data());
    tr.p2.assign(static_cast<std::size_t>(flat), 0.0f);
    avgpool2_forward(tr.s2.data(), arch_.c2, h2, w2, tr.p2.data());

    tr.f1.assign(static_cast<std::size_t>(arch_.feat_dim), 0.0f);
    dense_forward(ps_.p(off_.wd1), ps_.p(off_.bd1), tr.p2.data(), flat, arch_.feat_dim,
                  tr.f1.data());
    tr.sf.resize(tr.f1.size());
    silu_forward(tr.f1.data(), tr.f1.size(), tr.sf.data());
    tr.lg.assign(static_cast<std::size_t>(arch_.n_classes), 0.0f);
    dense_forward(ps_.p(off_.wd2), ps_.p(off_.bd2), tr.sf.data(), arch_.feat_dim, arch_.n_classes,
                  tr.lg.data());
}

std::vector<float> Classifier::features(const Field& img) const {
    Trace tr;
    forward_into(img, tr);
    return tr.sf;
}

std::vector<float> Classifier::logits(const Field& img) const {
    Trace tr;
    forward_into(img, tr);
    return tr.lg;
}

int Classifier::predict(const Field& img) const {
    std::vector<float> lg = logits(img);
    return static_cast<int>(std::max_element(lg.begin(), lg.end()) - lg.begin());
}

std::vector<double> Classifier::train(const std::vector<Field>& images,
                                      const std::vector<int>& labels, int epochs, int batch_size,
                                      double lr, std::uint64_t seed) {
    if (images.empty() || images.size() != labels.size())
        throw std::invalid_argument("classifier train: images and labels must align");
    if (epochs <= 0 || batch_size <= 0) throw std::invalid_argument("classifier train: bad config");
    for (int l : labels)
        if (l < 0 || l >= arch_.n_classes)
            throw std::invalid_argument("classifier train: label out of range");
    const int n = static_cast<int>(images.size());
    const int h = arch_.in_h, w = arch_.in_w, hw = h * w;
    const int h2 = h / 2, w2 = w / 2;
    const int flat = arch_.c2 * (h / 4) * (w / 4);

    Adam<float> opt;
    opt.lr = lr;
    opt.init(ps_.data.size());

    std::vector<double> acc_curve;
    Trace tr;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        Rng sh = Rng::derive(seed, 1000 + static_cast<std::uint64_t>(epoch));
        for (int i = n - 1; i > 0; --i) std::swap(order[i], order[sh.uniform_int(i + 1)]);

        int correct = 0;
        for (int b0 = 0; b0 < n; b0 += batch_size) {
            int bn = std::min(batch_size, n - b0);
            ps_.zero_grad();
            for (int j = 0; j < bn; ++j) {
                int idx = order[b0 + j];
                forward_into(images[idx], tr);
                int y = labels[idx];
                // softmax cross-entropy gradient
                float mx = *std::max_element(tr.lg.begin(), tr.lg.end());
                double z = 0.0;
                for (float l : tr.lg) z += std::exp(static_cast<double>(l) - mx);
                std::vector<float> dlg(arch_.n_classes);
                int am = 0;
                for (int k = 0; k < arch_.n_classes; ++k) {
                    double p = std::exp(static_cast<double>(tr.lg[k]) - mx) / z;
                    dlg[k] = static_cast<float>((p - (k == y ? 1.0 : 0.0)) / bn);
                    if (tr.lg[k] > tr.lg[am]) am = k;
                }
                if (am == y) ++correct;

                std::vector<float> dsf(arch_.feat_dim);
                dense_backward(ps_.p(off_.wd2), tr.sf.data(), dlg.data(), arch_.feat_dim,
                               arch_.n_classes, ps_.g(off_.wd2), ps_.g(off_.bd2), dsf.data());
                std::vector<float> df1(arch_.feat_dim);
                silu_backward(tr.f1.data(), dsf.data(), dsf.size(), df1.data());
                std::vector<float> dp2(static_cast<std::size_t>(flat));
                dense_backward(ps_.p(off_.wd1), tr.p2.data(), df1.data(), flat, arch_.feat_dim,
                               ps_.g(off_.wd1), ps_.g(off_.bd1), dp2.data());
                std::vector<float> ds2(static_cast<std::size_t>(arch_.c2) * h2 * w2);
                avgpool2_backward(dp2.data(), arch_.c2, h2, w2, ds2.data());
                std::vector<float> da2(ds2.size());
                silu_backward(tr.a2.data(), ds2.data(), ds2.size(), da2.data());
                std::vector<float> dp1(static_cast<std::size_t>(arch_.c1) * h2 * w2);
                conv3_backward(ps_.p(off_.w2), tr.col2.data(), da2.data(), arch_.c1, arch_.c2, h2,
                               w2, ps_.g(off_.w2), ps_.g(off_.b2), dp1.data());
                std::vector<float> ds1(static_cast<std::size_t>(arch_.c1) * hw);
                avgpool2_backward(dp1.data(), arch_.c1, h, w, ds1.data());
                std::vector<float> da1(ds1.size());
                silu_backward(tr.a1.data(), ds1.data(), ds1.size(), da1.data());
                conv3_backward(ps_.p(off_.w1), tr.col1.data(), da1.data(), 1, arch_.c1, h, w,
                               ps_.g(off_.w1), ps_.g(off_.b1), static_cast<float*>(nullptr));
            }
            clip_grad_norm(ps_.grad, 5.0);
            opt.update(ps_.data, ps_.grad);
        }
        acc_curve.push_back(static_cast<double>(correct) / n);
    }
    return acc_curve;
}

namespace {

std::string classifier_arch_text(const Classifier::Arch& a) {
    std::ostringstream s;
    s << "kind=classifier\nin_h=" << a.in_h << "\nin_w=" << a.in_w << "\nc1=" << a.c1
      << "\nc2=" << a.c2 << "\nfeat_dim=" << a.feat_dim << "\nn_classes=" << a.n_classes << "\n";
    return s.str();
}

Classifier::Arch classifier_arch_from_text(const std::string& text) {
    Classifier::Arch a;
    std::istringstream s(text);
    std::string line;
    bool kind_ok = false;
    while (std::getline(s, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("classifier checkpoint: bad descriptor line: " + line);
        std::string k = line.substr(0, eq), v = line.substr(eq + 1);
        if (k == "kind") {
            if (v != "classifier")
                throw std::runtime_error("classifier checkpoint: wrong model kind: " + v);
            kind_ok = true;
        } else if (k == "in_h")
            a.in_h = std::stoi(v);
        else if (k == "in_w")
            a.in_w = std::stoi(v);
        else if (k == "c1")
            a.c1 = std::stoi(v);
        else if (k == "c2")
            a.c2 = std::stoi(v);
        else if (k == "feat_dim")
            a.feat_dim = std::stoi(v);
        else if (k == "n_classes")
            a.n_classes = std::stoi(v);
        else
            throw std::runtime_error("classifier checkpoint: unknown descriptor key: " + k);
    }
    if (!kind_ok) throw std::runtime_error("classifier checkpoint: missing model kind");
    return a;
}

}  // namespace

void save_classifier(const Classifier& c, const std::string& path) {
    std::ofstream f = open_out(path);
    f.write("FDCK", 4);
    write_u32(f, 1u);
    write_str(f, classifier_arch_text(c.arch()));
    const ParamStore<float>& ps = c.params();
    write_u32(f, static_cast<std::uint32_t>(ps.segs.size()));
    for (const auto& seg : ps.segs) {
        write_str(f, seg.name);
        write_u32(f, static_cast<std::uint32_t>(seg.n));
        write_f32s(f, ps.data.data() + seg.off, seg.n);
    }
    if (!f) throw std::runtime_error("failed writing classifier checkpoint: " + path);
}

Classifier load_classifier(const std::string& path) {
    std::ifstream f = open_in(path);
    expect_magic(f, "FDCK", "checkpoint");
    std::uint32_t ver = read_u32(f);
    if (ver != 1u) throw std::runtime_error("classifier checkpoint: unsupported version");
    Classifier c(classifier_arch_from_text(read_str(f)));
    ParamStore<float>& ps = c.params();
    std::uint32_t nseg = read_u32(f);
    if (nseg != ps.segs.size())
        throw std::runtime_error("classifier checkpoint: segment table mismatch");
    for (std::uint32_t i = 0; i < nseg; ++i) {
        std::string name = read_str(f);
        std::uint32_t cnt = read_u32(f);
        if (name != ps.segs[i].name || cnt != ps.segs[i].n)
            throw std::runtime_error("classifier checkpoint: segment '" + name + "' mismatch");
        read_f32s(f, ps.data.data() + ps.segs[i].off, cnt);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Feature extractors

FeatureExtractor FeatureExtractor::raw_pixels() {
    FeatureExtractor e;
    e.kind = Kind::RawPixels;
    return e;
}

FeatureExtractor FeatureExtractor::random_projection(int dim, std::uint64_t seed) {
    if (dim <= 0) throw std::invalid_argument("random_projection: dim must be positive");
    FeatureExtractor e;
    e.kind = Kind::RandomProjection;
    e.dim = dim;
    e.seed = seed;
    return e;
}

FeatureExtractor FeatureExtractor::trained_classifier(Classifier c) {
    FeatureExtractor e;
    e.kind = Kind::TrainedClassifier;
    e.classifier = std::move(c);
    e.dim = e.classifier.arch().feat_dim;
    return e;
}

std::string FeatureExtractor::label() const {
    switch (kind) {
        case Kind::RawPixels:
            return "raw_pixels";
        case Kind::RandomProjection:
            return "random_projection(" + std::to_string(dim) + ")";
        case Kind::TrainedClassifier:
            return "trained_classifier";
    }
    return "unknown";
}

int FeatureExtractor::output_dim(int h, int w) const {
    switch (kind) {
        case Kind::RawPixels:
            return h * w;
        case Kind::RandomProjection:
            return dim;
        case Kind::TrainedClassifier:
            return classifier.arch().feat_dim;
    }
    return 0;
}

FeatureMatrix extract_features(const FeatureExtractor& ex, const std::vector<Field>& images) {
    if (images.empty()) throw std::invalid_argument("extract_features: no images");
    const int h = images[0].h, w = images[0].w, hw = h * w;
    for (const Field& img : images) check_same_shape(img, images[0], "extract_features");
    const int d = ex.output_dim(h, w);
    FeatureMatrix f(static_cast<int>(images.size()), d);

    if (ex.kind == FeatureExtractor::Kind::RawPixels) {
        for (std::size_t i = 0; i < images.size(); ++i)
            std::copy(images[i].v.begin(), images[i].v.end(), f.row(static_cast<int>(i)));
    } else if (ex.kind == FeatureExtractor::Kind::RandomProjection) {
        // projection matrix derived from (seed, image shape)
        Rng rng = Rng::derive(ex.seed, (static_cast<std::uint64_t>(h) << 32) | static_cast<std::uint64_t>(w));
        std::vector<double> proj(static_cast<std::size_t>(d) * hw);
        double scale = 1.0 / std::sqrt(static_cast<double>(hw));
        for (double& p : proj) p = rng.normal() * scale;
        for (std::size_t i = 0; i < images.size(); ++i) {
            double* out = f.row(static_cast<int>(i));
            for (int r = 0; r < d; ++r) {
                const double* pr = proj.data() + static_cast<std::size_t>(r) * hw;
                double acc = 0.0;
                for (int p = 0; p < hw; ++p) acc += pr[p] * images[i].v[p];
                out[r] = acc;
            }
        }
    } else {
        for (std::size_t i = 0; i < images.size(); ++i) {
            std::vector<float> feat = ex.classifier.features(images[i]);
            double* out = f.row(static_cast<int>(i));
            for (int r = 0; r < d; ++r) out[r] = static_cast<double>(feat[r]);
        }
    }
    return f;
}

MetricReport compute_metrics(const std::vector<Field>& real, const std::vector<Field>& gen,
                             const FeatureExtractor& ex, const MetricOptions& opt) {
    FeatureMatrix fr = extract_features(ex, real);
    FeatureMatrix fg = extract_features(ex, gen);
    MetricReport r;
    r.n_real = fr.n;
    r.n_gen = fg.n;
    r.extractor = ex.label();
    r.fid = fid(fr, fg);
    int subset = std::min(opt.subset_size, std::min(fr.n, fg.n));
    KidResult k = kid_full(fr, fg, subset, opt.n_subsets, opt.seed);
    r.kid = k.mean;
    r.kid_se = k.se;
    r.spectral_fid = spectral_fid(real, gen, opt.n_bins);
    return r;
}

std::string report_to_text(const MetricReport& r) {
    std::ostringstream s;
    s << "fid=" << r.fid << " kid=" << r.kid << " kid_se=" << r.kid_se
      << " spectral_fid=" << r.spectral_fid << " n_real=" << r.n_real << " n_gen=" << r.n_gen
      << " extractor=" << r.extractor;
    return s.str();
}

}  // namespace freqdiff
