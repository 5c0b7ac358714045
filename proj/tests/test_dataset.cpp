#include <doctest.h>

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqdiff/dataset.hpp"
#include "freqdiff/fft.hpp"

using namespace freqdiff;

namespace {

void put_be32(std::string& s, std::uint32_t v) {
    s.push_back(static_cast<char>(v >> 24));
    s.push_back(static_cast<char>(v >> 16));
    s.push_back(static_cast<char>(v >> 8));
    s.push_back(static_cast<char>(v));
}

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

double byte_to_level(int b) { return static_cast<double>(static_cast<float>(-1.0 + 2.0 * b / 255.0)); }

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

// minimal chunk walk over a PNG byte string; verifies structure and CRCs
struct PngInfo {
    int w = 0, h = 0, depth = 0, color = -1;
    std::vector<unsigned char> pixels;  // filter bytes stripped
};

PngInfo parse_png_gray(const std::string& bytes) {
    static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    REQUIRE(bytes.size() > 8);
    REQUIRE(std::memcmp(bytes.data(), sig, 8) == 0);
    PngInfo info;
    std::vector<unsigned char> idat;
    bool saw_end = false;
    std::size_t pos = 8;
    while (pos + 12 <= bytes.size() && !saw_end) {
        auto u8 = [&](std::size_t i) { return static_cast<unsigned char>(bytes[i]); };
        std::uint32_t len = (u8(pos) << 24) | (u8(pos + 1) << 16) | (u8(pos + 2) << 8) | u8(pos + 3);
        REQUIRE(pos + 12 + len <= bytes.size());
        std::string type = bytes.substr(pos + 4, 4);
        const unsigned char* data = reinterpret_cast<const unsigned char*>(bytes.data()) + pos + 8;
        uLong crc = crc32(0L, Z_NULL, 0);
        crc = crc32(crc, reinterpret_cast<const Bytef*>(type.data()), 4);
        if (len) crc = crc32(crc, data, len);
        std::uint32_t want_crc = (u8(pos + 8 + len) << 24) | (u8(pos + 9 + len) << 16) |
                                 (u8(pos + 10 + len) << 8) | u8(pos + 11 + len);
        REQUIRE(static_cast<std::uint32_t>(crc) == want_crc);
        if (type == "IHDR") {
            REQUIRE(len == 13);
            info.w = (data[0] << 24) | (data[1] << 16) | (data[2] << 8) | data[3];
            info.h = (data[4] << 24) | (data[5] << 16) | (data[6] << 8) | data[7];
            info.depth = data[8];
            info.color = data[9];
        } else if (type == "IDAT") {
            idat.insert(idat.end(), data, data + len);
        } else if (type == "IEND") {
            saw_end = true;
        }
        pos += 12 + len;
    }
    REQUIRE(saw_end);
    REQUIRE(info.w > 0);
    REQUIRE(info.h > 0);
    std::vector<unsigned char> raw(static_cast<std::size_t>(info.h) * (info.w + 1));
    uLongf out_len = static_cast<uLongf>(raw.size());
    REQUIRE(uncompress(raw.data(), &out_len, idat.data(), static_cast<uLong>(idat.size())) == Z_OK);
    REQUIRE(out_len == raw.size());
    info.pixels.resize(static_cast<std::size_t>(info.h) * info.w);
    for (int y = 0; y < info.h; ++y) {
        REQUIRE(raw[static_cast<std::size_t>(y) * (info.w + 1)] == 0);  // unfiltered rows
        std::memcpy(info.pixels.data() + static_cast<std::size_t>(y) * info.w,
                    raw.data() + static_cast<std::size_t>(y) * (info.w + 1) + 1,
                    static_cast<std::size_t>(info.w));
    }
    return info;
}

}  // namespace

TEST_CASE("raw byte images load with the documented level mapping") {
    TempFile img("t_idx_images.idx"), lab("t_idx_labels.idx");
    std::string bytes;
    put_be32(bytes, 0x803u);
    put_be32(bytes, 2);  // two images
    put_be32(bytes, 2);  // 2x3
    put_be32(bytes, 3);
    const int px[12] = {0, 255, 128, 1, 254, 64, 10, 20, 30, 40, 50, 60};
    for (int p : px) bytes.push_back(static_cast<char>(p));
    write_bytes(img.path, bytes);
    std::string lbytes;
    put_be32(lbytes, 0x801u);
    put_be32(lbytes, 2);
    lbytes.push_back(static_cast<char>(3));
    lbytes.push_back(static_cast<char>(9));
    write_bytes(lab.path, lbytes);

    Dataset ds = load_mnist_idx(img.path, lab.path);
    REQUIRE(ds.n() == 2);
    CHECK(ds.h == 2);
    CHECK(ds.w == 3);
    REQUIRE(ds.labels.size() == 2);
    CHECK(ds.labels[0] == 3);
    CHECK(ds.labels[1] == 9);
    for (int i = 0; i < 12; ++i) {
        double got = ds.images[i / 6].v[i % 6];
        CHECK(got == byte_to_level(px[i]));
    }
    CHECK(ds.images[0].v[0] == -1.0);  // byte 0
    CHECK(ds.images[0].v[1] == 1.0);   // byte 255
    CHECK(ds.images[0].v[2] == doctest::Approx(1.0 / 255.0).epsilon(1e-6));  // byte 128

    Dataset no_labels = load_mnist_idx(img.path);
    CHECK(no_labels.labels.empty());
    CHECK(no_labels.n() == 2);
}

TEST_CASE("malformed byte files are rejected") {
    TempFile img("t_idx_bad.idx");
    std::string bytes;
    put_be32(bytes, 0x8F3u);  // wrong magic
    put_be32(bytes, 1);
    put_be32(bytes, 2);
    put_be32(bytes, 2);
    bytes.append(4, '\0');
    write_bytes(img.path, bytes);
    try {
        load_mnist_idx(img.path);
        FAIL("expected a bad-magic error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("bad magic") != std::string::npos);
    }

    std::string trunc;
    put_be32(trunc, 0x803u);
    put_be32(trunc, 2);
    put_be32(trunc, 2);
    put_be32(trunc, 2);
    trunc.append(5, '\x10');  // 8 pixel bytes promised, 5 present
    write_bytes(img.path, trunc);
    try {
        load_mnist_idx(img.path);
        FAIL("expected a truncation error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("truncated") != std::string::npos);
    }

    std::string empty_dims;
    put_be32(empty_dims, 0x803u);
    put_be32(empty_dims, 0);
    put_be32(empty_dims, 2);
    put_be32(empty_dims, 2);
    write_bytes(img.path, empty_dims);
    CHECK_THROWS_AS(load_mnist_idx(img.path), std::runtime_error);

    std::string good;
    put_be32(good, 0x803u);
    put_be32(good, 1);
    put_be32(good, 1);
    put_be32(good, 1);
    good.push_back('\x7f');
    write_bytes(img.path, good);
    TempFile lab("t_idx_badlab.idx");
    std::string lb;
    put_be32(lb, 0x801u);
    put_be32(lb, 2);  // count disagrees with image count
    lb.append(2, '\x01');
    write_bytes(lab.path, lb);
    CHECK_THROWS_AS(load_mnist_idx(img.path, lab.path), std::runtime_error);
    CHECK_THROWS_AS(load_mnist_idx("no_such_file.idx"), std::runtime_error);
}

TEST_CASE("byte export reproduces values on the byte lattice") {
    TempFile img("t_idx_rt.idx"), lab("t_idx_rtlab.idx");
    Field a(2, 2), b(2, 2);
    const int ka[4] = {0, 17, 128, 255};
    const int kb[4] = {1, 2, 253, 254};
    for (int i = 0; i < 4; ++i) {
        a.v[i] = -1.0 + 2.0 * ka[i] / 255.0;
        b.v[i] = -1.0 + 2.0 * kb[i] / 255.0;
    }
    save_idx_images(img.path, {a, b});
    save_idx_labels(lab.path, {7, 0});
    Dataset back = load_mnist_idx(img.path, lab.path);
    REQUIRE(back.n() == 2);
    for (int i = 0; i < 4; ++i) {
        CHECK(back.images[0].v[i] == byte_to_level(ka[i]));
        CHECK(back.images[1].v[i] == byte_to_level(kb[i]));
    }
    CHECK(back.labels[0] == 7);
    CHECK(back.labels[1] == 0);
    // out-of-range values clamp to the ends
    Field hot(1, 2);
    hot.v[0] = -3.0;
    hot.v[1] = 42.0;
    save_idx_images(img.path, {hot});
    Dataset clamped = load_mnist_idx(img.path);
    CHECK(clamped.images[0].v[0] == -1.0);
    CHECK(clamped.images[0].v[1] == 1.0);
    CHECK_THROWS_AS(save_idx_images(img.path, {}), std::invalid_argument);
}

TEST_CASE("the dataset container round-trips images and metadata exactly") {
    TempFile file("t_ds.fdds");
    Rng rng(41);
    Dataset ds;
    ds.h = 5;
    ds.w = 6;
    ds.name = "roundtrip sample";
    ds.meta["gamma"] = "0.75";
    ds.meta["note"] = "a=b=c";
    for (int i = 0; i < 3; ++i) {
        Field f(5, 6);
        for (double& v : f.v) v = static_cast<double>(static_cast<float>(rng.normal()));
        ds.images.push_back(std::move(f));
    }
    ds.labels = {1, 2, 3};  // the container carries no labels
    save_fdds(file.path, ds);
    Dataset back = load_fdds(file.path);
    REQUIRE(back.n() == 3);
    CHECK(back.h == 5);
    CHECK(back.w == 6);
    CHECK(back.name == ds.name);
    CHECK(back.meta.at("gamma") == "0.75");
    CHECK(back.meta.at("note") == "a=b=c");
    CHECK(back.labels.empty());
    for (int i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < ds.images[i].size(); ++k)
            CHECK(back.images[i].v[k] == ds.images[i].v[k]);

    // double-precision inputs come back at float precision
    Dataset fine;
    fine.h = fine.w = 2;
    Field f(2, 2);
    f.v = {0.1, 0.2, 0.3, 0.4};
    fine.images.push_back(f);
    save_fdds(file.path, fine);
    Dataset q = load_fdds(file.path);
    for (int k = 0; k < 4; ++k)
        CHECK(q.images[0].v[k] == static_cast<double>(static_cast<float>(f.v[k])));
}

TEST_CASE("corrupt dataset containers are rejected") {
    TempFile file("t_ds_bad.fdds");
    write_bytes(file.path, "FDXX garbage");
    CHECK_THROWS_AS(load_fdds(file.path), std::runtime_error);
    std::string short_file = "FDDS";
    write_bytes(file.path, short_file);
    CHECK_THROWS_AS(load_fdds(file.path), std::runtime_error);
    Dataset empty;
    CHECK_THROWS_AS(save_fdds(file.path, empty), std::invalid_argument);
    CHECK_THROWS_AS(load_fdds("no_such_dir/x.fdds"), std::runtime_error);
}

TEST_CASE("gaussian dataset generation hits the requested moments") {
    Field mean(8, 8, 0.3);
    Rng rng(5);
    Dataset ds = gen_gaussian_dataset(500, 8, 8, mean, 0.25, rng);
    REQUIRE(ds.n() == 500);
    CHECK(ds.labels.empty());
    CHECK(ds.meta.at("var") == std::to_string(0.25));
    double m = 0.0, v = 0.0;
    for (const Field& f : ds.images)
        for (double x : f.v) {
            m += x;
            v += x * x;
        }
    const double cnt = 500.0 * 64.0;
    m /= cnt;
    v = v / cnt - m * m;
    CHECK(m == doctest::Approx(0.3).epsilon(0.05));
    CHECK(v == doctest::Approx(0.25).epsilon(0.05));

    Rng r1(9), r2(9);
    Dataset d1 = gen_gaussian_dataset(4, 8, 8, mean, 1.0, r1);
    Dataset d2 = gen_gaussian_dataset(4, 8, 8, mean, 1.0, r2);
    for (int i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < d1.images[i].size(); ++k)
            CHECK(d1.images[i].v[k] == d2.images[i].v[k]);

    Rng r3(9);
    Dataset clipped = gen_gaussian_dataset(50, 8, 8, Field(8, 8, 0.9), 1.0, r3, true);
    for (const Field& f : clipped.images)
        for (double x : f.v) {
            CHECK(x <= 1.0);
            CHECK(x >= -1.0);
        }

    Rng r4(1);
    CHECK_THROWS_AS(gen_gaussian_dataset(0, 8, 8, mean, 1.0, r4), std::invalid_argument);
    CHECK_THROWS_AS(gen_gaussian_dataset(4, 8, 8, mean, -1.0, r4), std::invalid_argument);
    CHECK_THROWS_AS(gen_gaussian_dataset(4, 16, 16, mean, 1.0, r4), std::invalid_argument);
}

TEST_CASE("band projection keeps exactly the selected coefficients") {
    FrequencyGrid g = build_grid(16, 16);
    Rng rng(13);
    Field x(16, 16);
    for (double& v : x.v) v = rng.normal();

    Field full = band_project(x, 0.0, 1.0, g);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(full.v[i] == doctest::Approx(x.v[i]).epsilon(1e-10));

    Field low = band_project(x, 0.0, 0.4, g);
    CField sx = fft2(x);
    CField sl = fft2(low);
    Field mask = band_mask(g, 0.0, 0.4, false, false);
    for (std::size_t i = 0; i < sx.v.size(); ++i) {
        std::complex<double> want = sx.v[i] * mask.v[i];
        CHECK(std::abs(sl.v[i] - want) < 1e-10);
    }
    Field twice = band_project(low, 0.0, 0.4, g);
    for (std::size_t i = 0; i < low.size(); ++i)
        CHECK(twice.v[i] == doctest::Approx(low.v[i]).epsilon(1e-9).scale(1.0));

    CHECK_THROWS_AS(band_project(x, 0.5, 0.2, g), std::invalid_argument);
    CHECK_THROWS_AS(band_project(x, 0.299, 0.301, g), std::invalid_argument);  // no bins there
    CHECK_THROWS_AS(band_project(Field(8, 8), 0.0, 1.0, g), std::invalid_argument);
}

TEST_CASE("bandlimited dataset cycles its source inside the band") {
    Dataset glyphs = gen_glyph_dataset(6, 16, 16, 77);
    Rng rng(3);
    Dataset ds = gen_bandlimited_dataset(10, 16, 16, glyphs, 0.0, 0.5, rng);
    REQUIRE(ds.n() == 10);
    REQUIRE(ds.labels.size() == 10);
    CHECK(ds.labels[6] == glyphs.labels[0]);
    CHECK(ds.labels[9] == glyphs.labels[3]);
    FrequencyGrid g = build_grid(16, 16);
    Field in = band_mask(g, 0.0, 0.5, false, false);
    for (const Field& f : ds.images) {
        Field p = power_map(fft2(f));
        double inside = 0.0, outside = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            (in.v[i] > 0.0 ? inside : outside) += p.v[i];
        CHECK(outside < 1e-9 * inside);
    }
    // image 6 is image 0's projection again
    for (std::size_t k = 0; k < ds.images[0].size(); ++k)
        CHECK(ds.images[6].v[k] == ds.images[0].v[k]);

    // optional additive band noise lands in its own band and nowhere else
    Rng rn(4);
    Dataset noisy = gen_bandlimited_dataset(4, 16, 16, glyphs, 0.0, 0.4, rn, 0.5, 0.6, 0.9);
    Field noise_band = band_mask(g, 0.6, 0.9, false, false);
    for (int i = 0; i < 4; ++i) {
        Field delta = noisy.images[i];
        Field base = band_project(glyphs.images[i % 6], 0.0, 0.4, g);
        for (std::size_t k = 0; k < delta.size(); ++k) delta.v[k] -= base.v[k];
        Field p = power_map(fft2(delta));
        double inside = 0.0, outside = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k)
            (noise_band.v[k] > 0.0 ? inside : outside) += p.v[k];
        CHECK(inside > 0.0);
        CHECK(outside < 1e-9 * inside);
    }

    Rng r5(1);
    CHECK_THROWS_AS(gen_bandlimited_dataset(0, 16, 16, glyphs, 0.0, 0.5, r5),
                    std::invalid_argument);
    CHECK_THROWS_AS(gen_bandlimited_dataset(4, 8, 8, glyphs, 0.0, 0.5, r5),
                    std::invalid_argument);
    Dataset no_src;
    no_src.h = no_src.w = 16;
    CHECK_THROWS_AS(gen_bandlimited_dataset(4, 16, 16, no_src, 0.0, 0.5, r5),
                    std::invalid_argument);
}

TEST_CASE("glyph and blob generators are deterministic and bounded") {
    Dataset a = gen_glyph_dataset(20, 16, 16, 5);
    Dataset b = gen_glyph_dataset(20, 16, 16, 5);
    REQUIRE(a.n() == 20);
    REQUIRE(a.labels.size() == 20);
    for (int i = 0; i < 20; ++i) {
        CHECK(a.labels[i] == i % 4);
        for (std::size_t k = 0; k < a.images[i].size(); ++k) {
            CHECK(a.images[i].v[k] == b.images[i].v[k]);
            CHECK(a.images[i].v[k] >= -1.0);
            CHECK(a.images[i].v[k] <= 1.0);
        }
    }
    Dataset c = gen_glyph_dataset(4, 16, 16, 6);
    double diff = 0.0;
    for (std::size_t k = 0; k < c.images[0].size(); ++k)
        diff += std::abs(c.images[0].v[k] - a.images[0].v[k]);
    CHECK(diff > 1e-3);
    CHECK_THROWS_AS(gen_glyph_dataset(4, 4, 4, 1), std::invalid_argument);

    Dataset blobs = gen_blob_dataset(10, 12, 12, 8);
    Dataset blobs2 = gen_blob_dataset(10, 12, 12, 8);
    for (int i = 0; i < 10; ++i)
        for (std::size_t k = 0; k < blobs.images[i].size(); ++k) {
            CHECK(blobs.images[i].v[k] == blobs2.images[i].v[k]);
            CHECK(std::abs(blobs.images[i].v[k]) <= 1.0);
        }
    CHECK_THROWS_AS(gen_blob_dataset(0, 12, 12, 8), std::invalid_argument);
}

TEST_CASE("grayscale export writes exact bytes") {
    TempFile pgm("t_img.pgm");
    Field img(2, 3);
    img.v = {-1.0, 1.0, 0.0, -2.0, 2.0, 0.5};
    write_pgm(pgm.path, img);
    std::string bytes = read_bytes(pgm.path);
    const std::string header = "P5\n3 2\n255\n";
    REQUIRE(bytes.size() == header.size() + 6);
    CHECK(bytes.compare(0, header.size(), header) == 0);
    const unsigned char* px = reinterpret_cast<const unsigned char*>(bytes.data() + header.size());
    CHECK(px[0] == 0);
    CHECK(px[1] == 255);
    CHECK(px[2] == 128);  // midpoint rounds up from 127.5
    CHECK(px[3] == 0);    // clamped low
    CHECK(px[4] == 255);  // clamped high
    CHECK(px[5] == 191);  // 0.75 * 255 = 191.25
}

TEST_CASE("png export is a valid grayscale image with exact pixels") {
    TempFile png("t_img.png");
    Rng rng(21);
    Field img(5, 7);
    for (double& v : img.v) v = 2.0 * rng.uniform() - 1.0;
    save_image_png(png.path, img);
    PngInfo info = parse_png_gray(read_bytes(png.path));
    CHECK(info.w == 7);
    CHECK(info.h == 5);
    CHECK(info.depth == 8);
    CHECK(info.color == 0);
    REQUIRE(info.pixels.size() == 35);
    for (std::size_t i = 0; i < 35; ++i) {
        double u = (img.v[i] + 1.0) / 2.0 * 255.0;
        auto want = static_cast<unsigned char>(std::lround(std::clamp(u, 0.0, 255.0)));
        CHECK(info.pixels[i] == want);
    }
    CHECK_THROWS_AS(write_png_gray(png.path, std::vector<unsigned char>(5), 2, 3),
                    std::invalid_argument);
}

TEST_CASE("contact sheets tile images row-major with padding") {
    TempFile png("t_sheet.png");
    std::vector<Field> imgs;
    for (int i = 0; i < 5; ++i) imgs.push_back(Field(8, 8, -1.0 + 0.4 * i));
    save_contact_sheet(png.path, imgs, 2);
    PngInfo info = parse_png_gray(read_bytes(png.path));
    // 3 rows x 2 cols of 8x8 tiles with 2px gutters
    CHECK(info.h == 3 * 8 + 4 * 2);
    CHECK(info.w == 2 * 8 + 3 * 2);
    CHECK(info.pixels[0] == 32);  // gutter shade
    auto px = [&](int y, int x) { return info.pixels[static_cast<std::size_t>(y) * info.w + x]; };
    auto level = [](double v) {
        return static_cast<unsigned char>(std::lround(std::clamp((v + 1.0) / 2.0 * 255.0, 0.0, 255.0)));
    };
    CHECK(px(2, 2) == level(-1.0));        // image 0 at tile (0,0)
    CHECK(px(2, 12) == level(-0.6));       // image 1 at tile (0,1)
    CHECK(px(12, 2) == level(-0.2));       // image 2 at tile (1,0)
    CHECK(px(22, 2) == level(0.6));        // image 4 at tile (2,0)
    CHECK(px(22, 12) == 32);               // empty slot stays gutter-colored
    CHECK_THROWS_AS(save_contact_sheet(png.path, {}, 2), std::invalid_argument);
    CHECK_THROWS_AS(save_contact_sheet(png.path, imgs, 0), std::invalid_argument);
}
