#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "freqdiff/field.hpp"
#include "freqdiff/layers.hpp"
#include "freqdiff/rng.hpp"

namespace freqdiff {

// N x D row-major feature block.
struct FeatureMatrix {
    int n = 0, d = 0;
    std::vector<double> v;

    FeatureMatrix() = default;
    FeatureMatrix(int n_, int d_) : n(n_), d(d_), v(static_cast<std::size_t>(n_) * d_, 0.0) {}
    double* row(int i) { return v.data() + static_cast<std::size_t>(i) * d; }
    const double* row(int i) const { return v.data() + static_cast<std::size_t>(i) * d; }
};

// Frechet distance between Gaussian fits of two feature sets; covariances get
// a 1e-6 diagonal ridge and the cross-term square root clamps negative
// eigenvalues to zero.
double fid(const FeatureMatrix& real, const FeatureMatrix& gen);

struct KidResult {
    double mean = 0.0;
    double se = 0.0;
};

// Unbiased squared MMD with kernel (x.y/D + 1)^3 averaged over random
// subsets; `se` is the standard error across subsets.
KidResult kid_full(const FeatureMatrix& real, const FeatureMatrix& gen, int subset_size,
                   int n_subsets, std::uint64_t seed = 7);
double kid(const FeatureMatrix& real, const FeatureMatrix& gen, int subset_size, int n_subsets,
           std::uint64_t seed = 7);

// Frechet distance between Gaussian fits of per-image radial log-power
// profiles. `log_floor` keeps empty spectral bands from blowing up the log.
double spectral_fid(const std::vector<Field>& real, const std::vector<Field>& gen, int n_bins,
                    double log_floor = 1e-4);

// Small conv classifier whose penultimate activations stand in for a
// pretrained feature embedding.
class Classifier {
  public:
    struct Arch {
        int in_h = 28, in_w = 28;
        int c1 = 8, c2 = 16;
        int feat_dim = 32;
        int n_classes = 4;
    };

    Classifier() = default;
    explicit Classifier(const Arch& a);

    void init(Rng& rng);
    std::vector<float> features(const Field& img) const;
    std::vector<float> logits(const Field& img) const;
    int predict(const Field& img) const;

    const Arch& arch() const { return arch_; }
    ParamStore<float>& params() { return ps_; }
    const ParamStore<float>& params() const { return ps_; }

    // minibatch softmax cross-entropy training; returns per-epoch accuracy
    std::vector<double> train(const std::vector<Field>& images, const std::vector<int>& labels,
                              int epochs, int batch_size, double lr, std::uint64_t seed);

  private:
    struct Offsets {
        std::size_t w1, b1, w2, b2, wd1, bd1, wd2, bd2;
    };
    struct Trace;
    void forward_into(const Field& img, Trace& tr) const;

    Arch arch_;
    Offsets off_{};
    ParamStore<float> ps_;
};

void save_classifier(const Classifier& c, const std::string& path);
Classifier load_classifier(const std::string& path);

// Pluggable image -> feature map used by fid/kid.
struct FeatureExtractor {
    enum class Kind { RawPixels, RandomProjection, TrainedClassifier };
    Kind kind = Kind::RawPixels;
    int dim = 0;               // RandomProjection output size
    std::uint64_t seed = 0;    // RandomProjection matrix seed
    Classifier classifier;     // TrainedClassifier

    static FeatureExtractor raw_pixels();
    static FeatureExtractor random_projection(int dim, std::uint64_t seed);
    static FeatureExtractor trained_classifier(Classifier c);

    std::string label() const;
    int output_dim(int h, int w) const;
};

FeatureMatrix extract_features(const FeatureExtractor& ex, const std::vector<Field>& images);

struct MetricReport {
    double fid = 0.0;
    double kid = 0.0;
    double kid_se = 0.0;
    double spectral_fid = 0.0;
    int n_real = 0, n_gen = 0;
    std::string extractor;
};

struct MetricOptions {
    int subset_size = 50;
    int n_subsets = 20;
    int n_bins = 12;
    std::uint64_t seed = 7;
};

MetricReport compute_metrics(const std::vector<Field>& real, const std::vector<Field>& gen,
                             const FeatureExtractor& ex, const MetricOptions& opt);

std::string report_to_text(const MetricReport& r);

}  // namespace freqdiff
