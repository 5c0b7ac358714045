#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freqdiff/fft.hpp"
#include "freqdiff/field.hpp"
#include "freqdiff/rng.hpp"

namespace freqdiff {

// Per-bin radial distance in frequency space, normalized so DC = 0 and the
// most distant attainable bin (Nyquist corner for even dims) = 1.
struct FrequencyGrid {
    int h = 0, w = 0;
    Field radial;
};

FrequencyGrid build_grid(int height, int width);

enum class WeightKind { Flat, PowerLaw, ExpDecay, BandPass, TwoBand };

struct SpectralWeight {
    WeightKind kind = WeightKind::Flat;
    double alpha = 0.0;  // PowerLaw exponent
    double beta = 1.0;   // ExpDecay rate
    double a = 0.0, b = 1.0;  // BandPass edges (closed interval)
    double gamma_l = 0.5, gamma_h = 0.5;
    double a_l = 0.0, b_l = 0.5, a_h = 0.5, b_h = 1.0;
    // Recovery weights exclude bins sitting exactly on the corrupted band's
    // edges: open_bl opens the low band's upper edge, open_ah the high band's
    // lower edge. Plain two-band weights keep both intervals closed.
    bool open_bl = false, open_ah = false;

    static SpectralWeight flat();
    static SpectralWeight power_law(double alpha);
    static SpectralWeight exp_decay(double beta);
    static SpectralWeight band_pass(double a, double b);
    static SpectralWeight two_band(double gamma_l, double gamma_h, double a_l, double b_l,
                                   double a_h, double b_h);
};

void validate_weight(const SpectralWeight& w);
std::string weight_label(const SpectralWeight& w);  // short human tag for CSV rows
std::map<std::string, std::string> weight_to_kv(const SpectralWeight& w);
SpectralWeight weight_from_kv(const std::map<std::string, std::string>& kv);

struct NoiseField {
    Field values;
    SpectralWeight weight;
    std::uint64_t seed = 0;
    bool normalized = false;
};

// w evaluated per bin. TwoBand is not a pointwise weight (it mixes two
// independent draws) and is rejected here.
Field eval_weight(const SpectralWeight& w, const FrequencyGrid& g);

// 1 where the (optionally half-open) interval contains the bin's radial value.
Field band_mask(const FrequencyGrid& g, double a, double b, bool open_lo, bool open_hi);

// Per-bin variance of the shaped field's Fourier coefficients, before any
// normalization: w(f)^2 for pointwise weights, gamma_l^2 M_l + gamma_h^2 M_h
// for the two-band mixture.
Field spectral_density(const SpectralWeight& w, const FrequencyGrid& g);

// Scale factor making the expected per-pixel variance 1; 0 for an all-zero
// density (degenerate weight).
double normalization_constant(const SpectralWeight& w, const FrequencyGrid& g);

// Complex field with iid standard-normal real and imaginary parts per bin.
CField sample_complex_field(const FrequencyGrid& g, Rng& rng);

NoiseField shape_noise(const SpectralWeight& w, const FrequencyGrid& g, Rng& rng, bool normalize);
NoiseField two_band_noise(const SpectralWeight& w, const FrequencyGrid& g, Rng& rng,
                          bool normalize);
// Dispatches on the weight kind.
NoiseField draw_noise(const SpectralWeight& w, const FrequencyGrid& g, Rng& rng, bool normalize);

struct SpectrumBin {
    double center = 0.0;
    double power = 0.0;  // mean |F(x)|^2 per bin in the annulus
    bool empty = false;
};

std::vector<SpectrumBin> radial_power_spectrum(const std::vector<Field>& images, int n_bins);
std::vector<SpectrumBin> radial_power_spectrum(const Field& image, int n_bins);

void save_fdnf(const NoiseField& f, const std::string& path);
NoiseField load_fdnf(const std::string& path);  // values + normalized flag only

}  // namespace freqdiff
