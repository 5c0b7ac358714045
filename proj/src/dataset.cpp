#include "freqdiff/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "freqdiff/bin_io.hpp"
#include "freqdiff/fft.hpp"

namespace freqdiff {

namespace {

unsigned char to_byte(double v, double lo, double hi) {
    double u = (v - lo) / (hi - lo) * 255.0;
    if (u < 0.0) u = 0.0;
    if (u > 255.0) u = 255.0;
    return static_cast<unsigned char>(std::lround(u));
}

std::string meta_to_text(const Dataset& ds) {
    std::ostringstream s;
    s << "name=" << ds.name << "\n";
    for (const auto& kv : ds.meta) s << kv.first << "=" << kv.second << "\n";
    return s.str();
}

void meta_from_text(const std::string& text, Dataset& ds) {
    std::istringstream s(text);
    std::string line;
    while (std::getline(s, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string k = line.substr(0, eq), v = line.substr(eq + 1);
        if (k == "name")
            ds.name = v;
        else
            ds.meta[k] = v;
    }
}

}  // namespace

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream f = open_in(images_path);
    std::uint32_t magic = read_u32_be(f, "image magic");
    if (magic != 0x803u)
        throw std::runtime_error("bad magic, not an IDX image file: " + images_path);
    std::uint32_t n = read_u32_be(f, "image count");
    std::uint32_t h = read_u32_be(f, "image height");
    std::uint32_t w = read_u32_be(f, "image width");
    if (n == 0 || h == 0 || w == 0) throw std::runtime_error("IDX image file has empty dims");

    Dataset ds;
    ds.h = static_cast<int>(h);
    ds.w = static_cast<int>(w);
    ds.name = "mnist";
    ds.meta["source"] = images_path;
    ds.images.reserve(n);
    std::vector<unsigned char> row(static_cast<std::size_t>(h) * w);
    for (std::uint32_t i = 0; i < n; ++i) {
        f.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (!f) throw std::runtime_error("truncated IDX image file: " + images_path);
        Field img(ds.h, ds.w);
        for (std::size_t p = 0; p < row.size(); ++p)
            img.v[p] = static_cast<double>(static_cast<float>(-1.0 + 2.0 * row[p] / 255.0));
        ds.images.push_back(std::move(img));
    }

    if (!labels_path.empty()) {
        std::ifstream lf = open_in(labels_path);
        std::uint32_t lm = read_u32_be(lf, "label magic");
        if (lm != 0x801u)
            throw std::runtime_error("bad magic, not an IDX label file: " + labels_path);
        std::uint32_t ln = read_u32_be(lf, "label count");
        if (ln != n) throw std::runtime_error("label count does not match image count");
        std::vector<unsigned char> lab(ln);
        lf.read(reinterpret_cast<char*>(lab.data()), static_cast<std::streamsize>(ln));
        if (!lf) throw std::runtime_error("truncated IDX label file: " + labels_path);
        ds.labels.assign(lab.begin(), lab.end());
    }
    return ds;
}

void save_idx_images(const std::string& path, const std::vector<Field>& images) {
    if (images.empty()) throw std::invalid_argument("save_idx_images: no images");
    std::ofstream f = open_out(path);
    write_u32_be(f, 0x803u);
    write_u32_be(f, static_cast<std::uint32_t>(images.size()));
    write_u32_be(f, static_cast<std::uint32_t>(images[0].h));
    write_u32_be(f, static_cast<std::uint32_t>(images[0].w));
    for (const Field& img : images) {
        check_same_shape(img, images[0], "save_idx_images");
        for (double v : img.v) {
            unsigned char b = to_byte(v, -1.0, 1.0);
            f.write(reinterpret_cast<const char*>(&b), 1);
        }
    }
    if (!f) throw std::runtime_error("failed writing IDX file: " + path);
}

void save_idx_labels(const std::string& path, const std::vector<int>& labels) {
    std::ofstream f = open_out(path);
    write_u32_be(f, 0x801u);
    write_u32_be(f, static_cast<std::uint32_t>(labels.size()));
    for (int l : labels) {
        auto b = static_cast<unsigned char>(l);
        f.write(reinterpret_cast<const char*>(&b), 1);
    }
    if (!f) throw std::runtime_error("failed writing IDX file: " + path);
}

void save_fdds(const std::string& path, const Dataset& ds) {
    if (ds.images.empty()) throw std::invalid_argument("save_fdds: empty dataset");
    std::ofstream f = open_out(path);
    f.write("FDDS", 4);
    write_u32(f, static_cast<std::uint32_t>(ds.images.size()));
    write_u32(f, static_cast<std::uint32_t>(ds.h));
    write_u32(f, static_cast<std::uint32_t>(ds.w));
    std::vector<float> row(static_cast<std::size_t>(ds.h) * ds.w);
    for (const Field& img : ds.images) {
        check_same_shape(img, Field(ds.h, ds.w), "save_fdds");
        for (std::size_t i = 0; i < row.size(); ++i) row[i] = static_cast<float>(img.v[i]);
        write_f32s(f, row);
    }
    write_str(f, meta_to_text(ds));
    if (!f) throw std::runtime_error("failed writing dataset: " + path);
}

Dataset load_fdds(const std::string& path) {
    std::ifstream f = open_in(path);
    expect_magic(f, "FDDS", "dataset");
    std::uint32_t n = read_u32(f, "image count");
    std::uint32_t h = read_u32(f, "height");
    std::uint32_t w = read_u32(f, "width");
    if (n == 0 || h == 0 || w == 0) throw std::runtime_error("dataset file has empty dims");
    Dataset ds;
    ds.h = static_cast<int>(h);
    ds.w = static_cast<int>(w);
    ds.images.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<float> row = read_f32s(f, static_cast<std::size_t>(h) * w, "pixels");
        Field img(ds.h, ds.w);
        for (std::size_t p = 0; p < row.size(); ++p) img.v[p] = static_cast<double>(row[p]);
        ds.images.push_back(std::move(img));
    }
    meta_from_text(read_str(f, "metadata"), ds);
    return ds;
}

Dataset gen_gaussian_dataset(int n, int h, int w, const Field& mean_image, double var, Rng& rng,
                             bool clip) {
    if (n <= 0) throw std::invalid_argument("gen_gaussian_dataset: n must be positive");
    if (!(var >= 0.0)) throw std::invalid_argument("gen_gaussian_dataset: var must be >= 0");
    if (mean_image.h != h || mean_image.w != w)
        throw std::invalid_argument("gen_gaussian_dataset: mean image shape mismatch");
    double sd = std::sqrt(var);
    Dataset ds;
    ds.h = h;
    ds.w = w;
    ds.name = "gaussian";
    ds.meta["generator"] = "gaussian";
    ds.meta["var"] = std::to_string(var);
    ds.meta["clip"] = clip ? "1" : "0";
    ds.images.reserve(n);
    for (int i = 0; i < n; ++i) {
        Field img(h, w);
        for (double& v : img.v) {
            v = sd * rng.normal();
        }
        for (std::size_t p = 0; p < img.v.size(); ++p) {
            img.v[p] += mean_image.v[p];
            if (clip) img.v[p] = std::clamp(img.v[p], -1.0, 1.0);
        }
        ds.images.push_back(std::move(img));
    }
    return ds;
}

Field band_project(const Field& x, double a, double b, const FrequencyGrid& g) {
    if (!(a >= 0.0 && a <= b && b <= 1.0))
        throw std::invalid_argument("band_project: band must satisfy 0 <= a <= b <= 1");
    check_same_shape(x, g.radial, "band_project");
    Field mask = band_mask(g, a, b, false, false);
    double kept = 0.0;
    for (double m : mask.v) kept += m;
    if (kept == 0.0) throw std::invalid_argument("band_project: band selects no frequency bins");
    CField spec = fft2(x);
    for (std::size_t i = 0; i < spec.v.size(); ++i) spec.v[i] *= mask.v[i];
    return ifft2_real(spec);
}

Dataset gen_bandlimited_dataset(int n, int h, int w, const Dataset& source, double a, double b,
                                Rng& rng, double noise_gamma, double noise_a, double noise_b) {
    if (n <= 0) throw std::invalid_argument("gen_bandlimited_dataset: n must be positive");
    if (source.images.empty())
        throw std::invalid_argument("gen_bandlimited_dataset: empty source");
    if (source.h != h || source.w != w)
        throw std::invalid_argument("gen_bandlimited_dataset: source shape mismatch");
    FrequencyGrid g = build_grid(h, w);
    Dataset ds;
    ds.h = h;
    ds.w = w;
    ds.name = "bandlimited";
    ds.meta["generator"] = "bandlimited";
    ds.meta["band_lo"] = std::to_string(a);
    ds.meta["band_hi"] = std::to_string(b);
    ds.meta["source"] = source.name;
    if (noise_gamma > 0.0) {
        ds.meta["noise_gamma"] = std::to_string(noise_gamma);
        ds.meta["noise_band_lo"] = std::to_string(noise_a);
        ds.meta["noise_band_hi"] = std::to_string(noise_b);
    }
    ds.images.reserve(n);
    bool keep_labels = !source.labels.empty();
    for (int i = 0; i < n; ++i) {
        const Field& src = source.images[i % source.images.size()];
        Field img = band_project(src, a, b, g);
        if (noise_gamma > 0.0) {
            NoiseField noise =
                shape_noise(SpectralWeight::band_pass(noise_a, noise_b), g, rng, false);
            axpy(img, noise_gamma, noise.values);
        }
        ds.images.push_back(std::move(img));
        if (keep_labels) ds.labels.push_back(source.labels[i % source.images.size()]);
    }
    return ds;
}

Dataset gen_glyph_dataset(int n, int h, int w, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("gen_glyph_dataset: n must be positive");
    if (h < 8 || w < 8) throw std::invalid_argument("gen_glyph_dataset: image too small");
    Dataset ds;
    ds.h = h;
    ds.w = w;
    ds.name = "glyphs";
    ds.meta["generator"] = "glyphs";
    ds.meta["seed"] = std::to_string(seed);
    ds.images.reserve(n);
    ds.labels.reserve(n);
    auto coverage = [](double d) { return std::clamp(0.5 - d, 0.0, 1.0); };
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(i));
        int label = i % 4;
        double amp = 0.7 + 0.3 * rng.uniform();
        Field img(h, w, -1.0);
        if (label == 0) {
            // horizontal stripes
            int period = 4 + 2 * rng.uniform_int(2);
            double phase = rng.uniform() * period;
            for (int y = 0; y < h; ++y) {
                double m = std::fmod(y + phase, static_cast<double>(period)) < period / 2.0
                               ? 1.0
                               : 0.0;
                for (int x = 0; x < w; ++x) img.at(y, x) = -1.0 + 2.0 * amp * m;
            }
        } else if (label == 1) {
            // centered cross with jitter
            double cy = h / 2.0 + (rng.uniform() - 0.5) * h / 4.0;
            double cx = w / 2.0 + (rng.uniform() - 0.5) * w / 4.0;
            double arm = 1.0 + rng.uniform() * 1.5;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double d = std::min(std::abs(y - cy), std::abs(x - cx)) - arm;
                    img.at(y, x) = -1.0 + 2.0 * amp * coverage(d);
                }
        } else if (label == 2) {
            // ring
            double cy = h / 2.0 + (rng.uniform() - 0.5) * h / 6.0;
            double cx = w / 2.0 + (rng.uniform() - 0.5) * w / 6.0;
            double r = h / 5.0 + rng.uniform() * h / 8.0;
            double th = 1.0 + rng.uniform();
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double d = std::abs(std::hypot(y - cy, x - cx) - r) - th;
                    img.at(y, x) = -1.0 + 2.0 * amp * coverage(d);
                }
        } else {
            // checkerboard
            int period = 2 + rng.uniform_int(2);
            int oy = rng.uniform_int(period), ox = rng.uniform_int(period);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    int q = ((y + oy) / period + (x + ox) / period) % 2;
                    img.at(y, x) = -1.0 + 2.0 * amp * q;
                }
        }
        ds.images.push_back(std::move(img));
        ds.labels.push_back(label);
    }
    return ds;
}

Dataset gen_blob_dataset(int n, int h, int w, std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("gen_blob_dataset: n must be positive");
    Dataset ds;
    ds.h = h;
    ds.w = w;
    ds.name = "blobs";
    ds.meta["generator"] = "blobs";
    ds.meta["seed"] = std::to_string(seed);
    ds.images.reserve(n);
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(i));
        int k = 2 + rng.uniform_int(3);
        Field img(h, w);
        for (int j = 0; j < k; ++j) {
            double cy = rng.uniform() * h, cx = rng.uniform() * w;
            double sig = h / 8.0 + rng.uniform() * h / 8.0;
            double a = (rng.uniform() * 0.6 + 0.4) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
                    img.at(y, x) += a * std::exp(-d2 / (2.0 * sig * sig));
                }
        }
        double m = max_abs(img);
        if (m > 1.0)
            for (double& v : img.v) v /= m;
        ds.images.push_back(std::move(img));
    }
    return ds;
}

void write_pgm(const std::string& path, const Field& img, double lo, double hi) {
    std::ofstream f = open_out(path);
    f << "P5\n" << img.w << " " << img.h << "\n255\n";
    for (double v : img.v) {
        unsigned char b = to_byte(v, lo, hi);
        f.write(reinterpret_cast<const char*>(&b), 1);
    }
    if (!f) throw std::runtime_error("failed writing PGM: " + path);
}

namespace {

void png_chunk(std::ostream& o, const char type[4], const unsigned char* data, std::size_t n) {
    write_u32_be(o, static_cast<std::uint32_t>(n));
    o.write(type, 4);
    if (n) o.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
    if (n) crc = crc32(crc, data, static_cast<uInt>(n));
    write_u32_be(o, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_png_gray(const std::string& path, const std::vector<unsigned char>& pix, int h,
                    int w) {
    if (h <= 0 || w <= 0 || pix.size() != static_cast<std::size_t>(h) * w)
        throw std::invalid_argument("write_png_gray: bad dimensions");
    std::ofstream f = open_out(path);
    static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    f.write(reinterpret_cast<const char*>(sig), 8);

    unsigned char ihdr[13];
    ihdr[0] = static_cast<unsigned char>(w >> 24);
    ihdr[1] = static_cast<unsigned char>(w >> 16);
    ihdr[2] = static_cast<unsigned char>(w >> 8);
    ihdr[3] = static_cast<unsigned char>(w);
    ihdr[4] = static_cast<unsigned char>(h >> 24);
    ihdr[5] = static_cast<unsigned char>(h >> 16);
    ihdr[6] = static_cast<unsigned char>(h >> 8);
    ihdr[7] = static_cast<unsigned char>(h);
    ihdr[8] = 8;   // bit depth
    ihdr[9] = 0;   // grayscale
    ihdr[10] = 0;  // deflate
    ihdr[11] = 0;  // adaptive filtering
    ihdr[12] = 0;  // no interlace
    png_chunk(f, "IHDR", ihdr, 13);

    // filter byte 0 before each scanline
    std::vector<unsigned char> raw(static_cast<std::size_t>(h) * (w + 1));
    for (int y = 0; y < h; ++y) {
        raw[static_cast<std::size_t>(y) * (w + 1)] = 0;
        std::memcpy(raw.data() + static_cast<std::size_t>(y) * (w + 1) + 1,
                    pix.data() + static_cast<std::size_t>(y) * w, static_cast<std::size_t>(w));
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> comp(bound);
    if (compress2(comp.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw std::runtime_error("write_png_gray: compression failed");
    png_chunk(f, "IDAT", comp.data(), bound);
    png_chunk(f, "IEND", nullptr, 0);
    if (!f) throw std::runtime_error("failed writing PNG: " + path);
}

void save_image_png(const std::string& path, const Field& img, double lo, double hi) {
    std::vector<unsigned char> pix(img.size());
    for (std::size_t i = 0; i < pix.size(); ++i) pix[i] = to_byte(img.v[i], lo, hi);
    write_png_gray(path, pix, img.h, img.w);
}

void save_contact_sheet(const std::string& path, const std::vector<Field>& images, int cols,
                        double lo, double hi) {
    if (images.empty()) throw std::invalid_argument("save_contact_sheet: no images");
    if (cols <= 0) throw std::invalid_argument("save_contact_sheet: cols must be positive");
    const int h = images[0].h, w = images[0].w, pad = 2;
    int rows = (static_cast<int>(images.size()) + cols - 1) / cols;
    int sh = rows * h + (rows + 1) * pad, sw = cols * w + (cols + 1) * pad;
    std::vector<unsigned char> pix(static_cast<std::size_t>(sh) * sw, 32);
    for (std::size_t i = 0; i < images.size(); ++i) {
        check_same_shape(images[i], images[0], "save_contact_sheet");
        int r = static_cast<int>(i) / cols, c = static_cast<int>(i) % cols;
        int oy = pad + r * (h + pad), ox = pad + c * (w + pad);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                pix[static_cast<std::size_t>(oy + y) * sw + ox + x] =
                    to_byte(images[i].at(y, x), lo, hi);
    }
    write_png_gray(path, pix, sh, sw);
}

}  // namespace freqdiff
