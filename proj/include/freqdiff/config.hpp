#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "freqdiff/corruption.hpp"
#include "freqdiff/denoiser.hpp"
#include "freqdiff/spectral.hpp"
#include "freqdiff/unet.hpp"

namespace freqdiff {

// Raised for anything wrong with a run configuration (maps to exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Sectioned key=value text. '#' and ';' start comments; keys are unique per
// section.
using IniData = std::map<std::string, std::map<std::string, std::string>>;

IniData parse_ini(const std::string& text);
std::string serialize_ini(const IniData& data);

struct DatasetConfig {
    std::string kind = "gaussian";  // gaussian|glyphs|blobs|bandlimited|mnist|fdds
    int n = 512;
    int h = 28, w = 28;
    std::uint64_t gen_seed = 42;
    double mean = 0.0;
    double var = 0.25;
    bool clip = false;
    std::string images_path, labels_path;  // mnist
    std::string path;                      // fdds
    std::string source = "glyphs";         // bandlimited: inner generator
    double band_lo = 0.0, band_hi = 0.3;
    double noise_gamma = 0.0;
    double noise_band_lo = 0.3, noise_band_hi = 1.0;
};

struct SampleConfig {
    int count = 64;
    int stride = 1;
    bool white_injection = false;
    bool deterministic = false;
};

struct CorruptionConfig {
    bool enabled = false;
    CorruptionSpec spec;
    double recovery_gamma_l = 0.5;
    double recovery_gamma_h = 0.5;
};

struct MetricsConfig {
    std::string extractor = "raw_pixels";  // raw_pixels|random_projection|trained_classifier
    int rp_dim = 32;
    std::uint64_t rp_seed = 7;
    std::string classifier_path;  // empty: train on the run dataset's labels
    int classifier_epochs = 5;
    int subset_size = 50;
    int n_subsets = 20;
    int n_bins = 12;
    int n_real = 256;
};

struct SweepConfig {
    std::vector<double> gammas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<std::pair<double, double>> bands;  // corrupt-recover grid
};

struct SpectrumConfig {
    std::vector<int> timesteps = {0};
    int n_bins = 16;
    int batch = 64;
};

struct RunConfig {
    std::string name = "run";
    std::string out_dir = "out";
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    int threads = 1;

    DatasetConfig dataset;

    int T = 200;
    double beta_start = 1e-4;
    double beta_end = 0.02;

    SpectralWeight weight = SpectralWeight::flat();
    ArchDescriptor arch;
    TrainConfig train;
    SampleConfig sample;
    CorruptionConfig corruption;
    MetricsConfig metrics;
    SweepConfig sweep;
    SpectrumConfig spectrum;
};

RunConfig config_from_ini(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string config_to_ini(const RunConfig& cfg);

// Cross-field checks shared by every command; throws ConfigError.
void validate_config(const RunConfig& cfg);

}  // namespace freqdiff
