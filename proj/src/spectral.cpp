#include "freqdiff/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "freqdiff/bin_io.hpp"

namespace freqdiff {
namespace {

double signed_freq(int k, int n) {
    int s = (k <= n / 2) ? k : k - n;
    return static_cast<double>(s) / static_cast<double>(n);
}

double parse_num(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("weight config missing key: " + key);
    std::size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("bad number for " + key + ": " + it->second);
    return v;
}

double parse_num_or(const std::map<std::string, std::string>& kv, const std::string& key,
                    double fallback) {
    return kv.count(key) ? parse_num(kv, key) : fallback;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

FrequencyGrid build_grid(int height, int width) {
    if (height < 2 || width < 2)
        throw std::invalid_argument("build_grid: dimensions must be at least 2");
    FrequencyGrid g;
    g.h = height;
    g.w = width;
    g.radial = Field(height, width);
    double rmax = 0.0;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double v = signed_freq(y, height);
            double u = signed_freq(x, width);
            double r = std::sqrt(u * u + v * v);
            g.radial.at(y, x) = r;
            rmax = std::max(rmax, r);
        }
    for (double& r : g.radial.v) r /= rmax;
    return g;
}

SpectralWeight SpectralWeight::flat() { return SpectralWeight{}; }

SpectralWeight SpectralWeight::power_law(double alpha) {
    SpectralWeight w;
    w.kind = WeightKind::PowerLaw;
    w.alpha = alpha;
    return w;
}

SpectralWeight SpectralWeight::exp_decay(double beta) {
    SpectralWeight w;
    w.kind = WeightKind::ExpDecay;
    w.beta = beta;
    return w;
}

SpectralWeight SpectralWeight::band_pass(double a, double b) {
    SpectralWeight w;
    w.kind = WeightKind::BandPass;
    w.a = a;
    w.b = b;
    return w;
}

SpectralWeight SpectralWeight::two_band(double gamma_l, double gamma_h, double a_l, double b_l,
                                        double a_h, double b_h) {
    SpectralWeight w;
    w.kind = WeightKind::TwoBand;
    w.gamma_l = gamma_l;
    w.gamma_h = gamma_h;
    w.a_l = a_l;
    w.b_l = b_l;
    w.a_h = a_h;
    w.b_h = b_h;
    return w;
}

void validate_weight(const SpectralWeight& w) {
    auto check_band = [](double a, double b, const char* what) {
        if (!(a <= b)) throw std::invalid_argument(std::string(what) + ": band edges out of order");
        if (a < 0.0 || b > 1.0)
            throw std::invalid_argument(std::string(what) + ": band edges must lie in [0,1]");
    };
    switch (w.kind) {
        case WeightKind::Flat:
            break;
        case WeightKind::PowerLaw:
            if (!std::isfinite(w.alpha)) throw std::invalid_argument("power_law: alpha not finite");
            break;
        case WeightKind::ExpDecay:
            if (!(w.beta > 0.0)) throw std::invalid_argument("exp_decay: beta must be positive");
            break;
        case WeightKind::BandPass:
            check_band(w.a, w.b, "band_pass");
            break;
        case WeightKind::TwoBand:
            check_band(w.a_l, w.b_l, "two_band low band");
            check_band(w.a_h, w.b_h, "two_band high band");
            if (w.gamma_l < 0.0 || w.gamma_h < 0.0)
                throw std::invalid_argument("two_band: gammas must be non-negative");
            break;
    }
}

std::string weight_label(const SpectralWeight& w) {
    std::ostringstream s;
    switch (w.kind) {
        case WeightKind::Flat: return "flat";
        case WeightKind::PowerLaw: s << "power_law(" << w.alpha << ")"; break;
        case WeightKind::ExpDecay: s << "exp_decay(" << w.beta << ")"; break;
        case WeightKind::BandPass: s << "band_pass[" << w.a << ":" << w.b << "]"; break;
        case WeightKind::TwoBand:
            s << "two_band(" << w.gamma_l << ":" << w.gamma_h << ")";
            break;
    }
    return s.str();
}

std::map<std::string, std::string> weight_to_kv(const SpectralWeight& w) {
    std::map<std::string, std::string> kv;
    switch (w.kind) {
        case WeightKind::Flat:
            kv["kind"] = "flat";
            break;
        case WeightKind::PowerLaw:
            kv["kind"] = "power_law";
            kv["alpha"] = fmt(w.alpha);
            break;
        case WeightKind::ExpDecay:
            kv["kind"] = "exp_decay";
            kv["beta"] = fmt(w.beta);
            break;
        case WeightKind::BandPass:
            kv["kind"] = "band_pass";
            kv["a"] = fmt(w.a);
            kv["b"] = fmt(w.b);
            break;
        case WeightKind::TwoBand:
            kv["kind"] = "two_band";
            kv["gamma_l"] = fmt(w.gamma_l);
            kv["gamma_h"] = fmt(w.gamma_h);
            kv["a_l"] = fmt(w.a_l);
            kv["b_l"] = fmt(w.b_l);
            kv["a_h"] = fmt(w.a_h);
            kv["b_h"] = fmt(w.b_h);
            if (w.open_bl) kv["open_bl"] = "1";
            if (w.open_ah) kv["open_ah"] = "1";
            break;
    }
    return kv;
}

SpectralWeight weight_from_kv(const std::map<std::string, std::string>& kv) {
    auto it = kv.find("kind");
    if (it == kv.end()) throw std::invalid_argument("weight config missing key: kind");
    const std::string& kind = it->second;
    SpectralWeight w;
    if (kind == "flat") {
        w = SpectralWeight::flat();
    } else if (kind == "power_law") {
        w = SpectralWeight::power_law(parse_num(kv, "alpha"));
    } else if (kind == "exp_decay") {
        w = SpectralWeight::exp_decay(parse_num(kv, "beta"));
    } else if (kind == "band_pass") {
        w = SpectralWeight::band_pass(parse_num(kv, "a"), parse_num(kv, "b"));
    } else if (kind == "two_band") {
        w = SpectralWeight::two_band(parse_num(kv, "gamma_l"), parse_num(kv, "gamma_h"),
                                     parse_num_or(kv, "a_l", 0.0), parse_num_or(kv, "b_l", 0.5),
                                     parse_num_or(kv, "a_h", 0.5), parse_num_or(kv, "b_h", 1.0));
        w.open_bl = parse_num_or(kv, "open_bl", 0.0) != 0.0;
        w.open_ah = parse_num_or(kv, "open_ah", 0.0) != 0.0;
    } else {
        throw std::invalid_argument("unknown weight kind: " + kind);
    }
    validate_weight(w);
    return w;
}

Field band_mask(const FrequencyGrid& g, double a, double b, bool open_lo, bool open_hi) {
    Field m(g.h, g.w);
    for (std::size_t i = 0; i < m.v.size(); ++i) {
        double r = g.radial.v[i];
        bool lo = open_lo ? (r > a) : (r >= a);
        bool hi = open_hi ? (r < b) : (r <= b);
        m.v[i] = (lo && hi) ? 1.0 : 0.0;
    }
    return m;
}

Field eval_weight(const SpectralWeight& w, const FrequencyGrid& g) {
    validate_weight(w);
    Field out(g.h, g.w);
    switch (w.kind) {
        case WeightKind::Flat:
            for (double& v : out.v) v = 1.0;
            break;
        case WeightKind::PowerLaw:
            for (std::size_t i = 0; i < out.v.size(); ++i) {
                double r = g.radial.v[i];
                if (r == 0.0)
                    out.v[i] = (w.alpha == 0.0) ? 1.0 : 0.0;
                else
                    out.v[i] = std::pow(r, w.alpha);
            }
            break;
        case WeightKind::ExpDecay:
            for (std::size_t i = 0; i < out.v.size(); ++i) {
                double r = g.radial.v[i];
                out.v[i] = std::exp(-w.beta * r * r);
            }
            break;
        case WeightKind::BandPass:
            return band_mask(g, w.a, w.b, false, false);
        case WeightKind::TwoBand:
            throw std::invalid_argument(
                "eval_weight: two_band is a mixture of two draws, not a pointwise weight");
    }
    return out;
}

Field spectral_density(const SpectralWeight& w, const FrequencyGrid& g) {
    if (w.kind == WeightKind::TwoBand) {
        validate_weight(w);
        Field ml = band_mask(g, w.a_l, w.b_l, false, w.open_bl);
        Field mh = band_mask(g, w.a_h, w.b_h, w.open_ah, false);
        Field d(g.h, g.w);
        double gl2 = w.gamma_l * w.gamma_l, gh2 = w.gamma_h * w.gamma_h;
        for (std::size_t i = 0; i < d.v.size(); ++i) d.v[i] = gl2 * ml.v[i] + gh2 * mh.v[i];
        return d;
    }
    Field wf = eval_weight(w, g);
    for (double& v : wf.v) v *= v;
    return wf;
}

double normalization_constant(const SpectralWeight& w, const FrequencyGrid& g) {
    Field d = spectral_density(w, g);
    double s = 0.0;
    for (double v : d.v) s += v;
    if (s <= 0.0) return 0.0;
    return std::sqrt(static_cast<double>(g.h) * static_cast<double>(g.w) / s);
}

CField sample_complex_field(const FrequencyGrid& g, Rng& rng) {
    CField z(g.h, g.w);
    for (auto& c : z.v) {
        double re = rng.normal();
        double im = rng.normal();
        c = {re, im};
    }
    return z;
}

namespace {

NoiseField finish_noise(CField&& spectrum, const Field& density, const SpectralWeight& w,
                        Rng& rng, bool normalize) {
    NoiseField nf;
    nf.weight = w;
    nf.seed = rng.stream_seed();
    nf.values = ifft2_real(spectrum);
    if (normalize) {
        double s = 0.0;
        for (double v : density.v) s += v;
        double c = std::sqrt(static_cast<double>(density.h) * density.w / s);
        for (double& v : nf.values.v) v *= c;
        nf.normalized = true;
    }
    return nf;
}

NoiseField zero_noise(const FrequencyGrid& g, const SpectralWeight& w, Rng& rng) {
    NoiseField nf;
    nf.weight = w;
    nf.seed = rng.stream_seed();
    nf.values = Field(g.h, g.w);
    nf.normalized = false;
    return nf;
}

}  // namespace

NoiseField shape_noise(const SpectralWeight& w, const FrequencyGrid& g, Rng& rng, bool normalize) {
    validate_weight(w);
    if (w.kind == WeightKind::TwoBand)
        throw std::invalid_argument("shape_noise: two_band weights go through two_band_noise");
    Field wf = eval_weight(w, g);
    Field density = wf;
    for (double& v : density.v) v *= v;
    double total = 0.0;
    for (double v : density.v) total += v;
    if (total <= 0.0) return zero_noise(g, w, rng);

    CField z = sample_complex_field(g, rng);
    for (std::size_t i = 0; i < z.v.size(); ++i) z.v[i] *= wf.v[i];
    return finish_noise(std::move(z), density, w, rng, normalize);
}

NoiseField two_band_noise(const SpectralWeight& w, const FrequencyGrid& g, Rng& rng,
                          bool normalize) {
    validate_weight(w);
    if (w.kind != WeightKind::TwoBand)
        throw std::invalid_argument("two_band_noise: weight is not two_band");
    if (w.gamma_l == 0.0 && w.gamma_h == 0.0 && normalize)
        throw std::invalid_argument("two_band_noise: both gammas zero, nothing to normalize");

    Field ml = band_mask(g, w.a_l, w.b_l, false, w.open_bl);
    Field mh = band_mask(g, w.a_h, w.b_h, w.open_ah, false);
    Field density = spectral_density(w, g);
    double total = 0.0;
    for (double v : density.v) total += v;
    if (total <= 0.0) return zero_noise(g, w, rng);

    CField y(g.h, g.w);
    if (w.gamma_l != 0.0) {
        CField zl = sample_complex_field(g, rng);
        for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += w.gamma_l * ml.v[i] * zl.v[i];
    }
    if (w.gamma_h != 0.0) {
        CField zh = sample_complex_field(g, rng);
        for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += w.gamma_h * mh.v[i] * zh.v[i];
    }
    return finish_noise(std::move(y), density, w, rng, normalize);
}

NoiseField draw_noise(const SpectralWeight& w, const FrequencyGrid& g, Rng& rng, bool normalize) {
    if (w.kind == WeightKind::TwoBand) return two_band_noise(w, g, rng, normalize);
    return shape_noise(w, g, rng, normalize);
}

std::vector<SpectrumBin> radial_power_spectrum(const std::vector<Field>& images, int n_bins) {
    if (n_bins < 2) throw std::invalid_argument("radial_power_spectrum: n_bins must be >= 2");
    if (images.empty()) throw std::invalid_argument("radial_power_spectrum: empty batch");
    FrequencyGrid g = build_grid(images[0].h, images[0].w);
    std::vector<double> power(n_bins, 0.0);
    std::vector<long long> count(n_bins, 0);
    std::vector<int> bin_of(g.radial.size());
    for (std::size_t i = 0; i < bin_of.size(); ++i) {
        int b = static_cast<int>(g.radial.v[i] * n_bins);
        bin_of[i] = std::min(b, n_bins - 1);
    }
    for (const Field& img : images) {
        check_same_shape(img, g.radial, "radial_power_spectrum");
        Field p = power_map(fft2(img));
        for (std::size_t i = 0; i < p.v.size(); ++i) {
            power[bin_of[i]] += p.v[i];
            count[bin_of[i]] += 1;
        }
    }
    std::vector<SpectrumBin> out(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        out[b].center = (b + 0.5) / n_bins;
        out[b].empty = count[b] == 0;
        out[b].power = out[b].empty ? 0.0 : power[b] / static_cast<double>(count[b]);
    }
    return out;
}

std::vector<SpectrumBin> radial_power_spectrum(const Field& image, int n_bins) {
    return radial_power_spectrum(std::vector<Field>{image}, n_bins);
}

void save_fdnf(const NoiseField& f, const std::string& path) {
    auto out = open_out(path);
    out.write("FDNF", 4);
    write_u32(out, static_cast<std::uint32_t>(f.values.h));
    write_u32(out, static_cast<std::uint32_t>(f.values.w));
    write_u32(out, f.normalized ? 1u : 0u);
    std::vector<float> buf(f.values.v.begin(), f.values.v.end());
    write_f32s(out, buf);
    if (!out) throw std::runtime_error("write failed: " + path);
}

NoiseField load_fdnf(const std::string& path) {
    auto in = open_in(path);
    expect_magic(in, "FDNF", "FDNF noise field");
    int h = static_cast<int>(read_u32(in, "height"));
    int w = static_cast<int>(read_u32(in, "width"));
    std::uint32_t flags = read_u32(in, "flags");
    if (h <= 0 || w <= 0) throw std::runtime_error("FDNF: bad dimensions");
    auto buf = read_f32s(in, static_cast<std::size_t>(h) * w, "pixels");
    NoiseField nf;
    nf.values = Field(h, w);
    for (std::size_t i = 0; i < buf.size(); ++i) nf.values.v[i] = buf[i];
    nf.normalized = (flags & 1u) != 0;
    return nf;
}

}  // namespace freqdiff
