#pragma once

#include <map>
#include <string>
#include <vector>

#include "freqdiff/field.hpp"
#include "freqdiff/rng.hpp"
#include "freqdiff/spectral.hpp"

namespace freqdiff {

// Image collection with optional labels and a provenance record.
struct Dataset {
    int h = 0, w = 0;
    std::vector<Field> images;
    std::vector<int> labels;  // empty when the source has none
    std::string name;
    std::map<std::string, std::string> meta;

    int n() const { return static_cast<int>(images.size()); }
};

// IDX ingestion: big-endian magic 0x803 (images) / 0x801 (labels); bytes are
// rescaled 0..255 -> [-1, 1] and stored at 32-bit float precision so the
// container round-trip below is exact.
Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path = "");
void save_idx_images(const std::string& path, const std::vector<Field>& images);
void save_idx_labels(const std::string& path, const std::vector<int>& labels);

// Dataset container: "FDDS", u32 N,H,W, row-major 32-bit floats, then a
// length-prefixed metadata text (name plus key=value lines).
void save_fdds(const std::string& path, const Dataset& ds);
Dataset load_fdds(const std::string& path);

Dataset gen_gaussian_dataset(int n, int h, int w, const Field& mean_image, double var, Rng& rng,
                             bool clip = false);

// Keep only the spectral content of x whose radial frequency lies in [a, b].
Field band_project(const Field& x, double a, double b, const FrequencyGrid& g);

// Band-projected copies of `source` images (cycled to length n), optionally
// with raw band noise of strength noise_gamma added on [noise_a, noise_b].
Dataset gen_bandlimited_dataset(int n, int h, int w, const Dataset& source, double a, double b,
                                Rng& rng, double noise_gamma = 0.0, double noise_a = 0.0,
                                double noise_b = 1.0);

// Four shape classes (stripes, cross, ring, checker) with jittered geometry;
// labeled, suitable for training the metric classifier.
Dataset gen_glyph_dataset(int n, int h, int w, std::uint64_t seed);

// Smooth unlabeled images built from a few random Gaussian bumps.
Dataset gen_blob_dataset(int n, int h, int w, std::uint64_t seed);

// Grayscale export. Values are mapped lo -> 0, hi -> 255 and clamped.
void write_pgm(const std::string& path, const Field& img, double lo = -1.0, double hi = 1.0);
void write_png_gray(const std::string& path, const std::vector<unsigned char>& pix, int h, int w);
void save_image_png(const std::string& path, const Field& img, double lo = -1.0, double hi = 1.0);
void save_contact_sheet(const std::string& path, const std::vector<Field>& images, int cols,
                        double lo = -1.0, double hi = 1.0);

}  // namespace freqdiff
