#include "freqdiff/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "freqdiff/schedule.hpp"

namespace freqdiff {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

long long to_ll(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long r = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return r;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for '" + key + "': " + v);
    }
}

int to_int(const std::string& key, const std::string& v) {
    long long r = to_ll(key, v);
    if (r < -2147483648LL || r > 2147483647LL)
        throw ConfigError("config: integer out of range for '" + key + "': " + v);
    return static_cast<int>(r);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long r = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return r;
    } catch (const std::exception&) {
        throw ConfigError("config: bad unsigned integer for '" + key + "': " + v);
    }
}

double to_f(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return r;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for '" + key + "': " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ConfigError("config: bad boolean for '" + key + "': " + v);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

std::string fmt_f(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

IniData parse_ini(const std::string& text) {
    IniData data;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto cut = line.find_first_of("#;");
        if (cut != std::string::npos) line = line.substr(0, cut);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config: empty section name at line " + std::to_string(lineno));
            data[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key=value at line " + std::to_string(lineno));
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k.empty())
            throw ConfigError("config: empty key at line " + std::to_string(lineno));
        if (section.empty())
            throw ConfigError("config: key outside any section at line " + std::to_string(lineno));
        if (!data[section].emplace(k, v).second)
            throw ConfigError("config: duplicate key '" + k + "' in [" + section + "]");
    }
    return data;
}

std::string serialize_ini(const IniData& data) {
    std::ostringstream s;
    bool first = true;
    for (const auto& sec : data) {
        if (!first) s << "\n";
        first = false;
        s << "[" << sec.first << "]\n";
        for (const auto& kv : sec.second) s << kv.first << " = " << kv.second << "\n";
    }
    return s.str();
}

namespace {

void parse_run(const std::map<std::string, std::string>& kv, RunConfig& cfg) {
    for (const auto& [k, v] : kv) {
        if (k == "name")
            cfg.name = v;
        else if (k == "out_dir")
            cfg.out_dir = v;
        else if (k == "seeds") {
            cfg.seeds.clear();
            for (const std::string& s : split(v, ',')) cfg.seeds.push_back(to_u64(k, s));
        } else if (k == "threads")
            cfg.threads = to_int(k, v);
        else
            throw ConfigError("config: unknown key '" + k + "' in [run]");
    }
}

void parse_dataset(const std::map<std::string, std::string>& kv, DatasetConfig& d) {
    for (const auto& [k, v] : kv) {
        if (k == "kind")
            d.kind = v;
        else if (k == "n")
            d.n = to_int(k, v);
        else if (k == "h")
            d.h = to_int(k, v);
        else if (k == "w")
            d.w = to_int(k, v);
        else if (k == "seed")
            d.gen_seed = to_u64(k, v);
        else if (k == "mean")
            d.mean = to_f(k, v);
        else if (k == "var")
            d.var = to_f(k, v);
        else if (k == "clip")
            d.clip = to_bool(k, v);
        else if (k == "images_path")
            d.images_path = v;
        else if (k == "labels_path")
            d.labels_path = v;
        else if (k == "path")
            d.path = v;
        else if (k == "source")
            d.source = v;
        else if (k == "band_lo")
            d.band_lo = to_f(k, v);
        else if (k == "band_hi")
            d.band_hi = to_f(k, v);
        else if (k == "noise_gamma")
            d.noise_gamma = to_f(k, v);
        else if (k == "noise_band_lo")
            d.noise_band_lo = to_f(k, v);
        else if (k == "noise_band_hi")
            d.noise_band_hi = to_f(k, v);
        else
            throw ConfigError("config: unknown key '" + k + "' in [dataset]");
    }
}

void parse_schedule(const std::map<std::string, std::string>& kv, RunConfig& cfg) {
    for (const auto& [k, v] : kv) {
        if (k == "T")
            cfg.T = to_int(k, v);
        else if (k == "beta_start")
            cfg.beta_start = to_f(k, v);
        else if (k == "beta_end")
            cfg.beta_end = to_f(k, v);
        else
            throw ConfigError("config: unknown key '" + k + "' in [schedule]");
    }
}

void parse_arch(const std::map<std::string, std::string>& kv, ArchDescriptor& a, int h, int w) {
    a.in_h = h;
    a.in_w = w;
    for (const auto& [k, v] : kv) {
        if (k == "widths") {
            a.widths.clear();
            for (const std::string& s : split(v, ',')) a.widths.push_back(to_int(k, s));
        } else if (k == "time_dim")
            a.time_dim = to_int(k, v);
        else if (k == "groups")
            a.groups = to_int(k, v);
        else
            throw ConfigError("config: unknown key '" + k + "' in [arch]");
    }
}

void parse_train(const std::map<std::string, std::string>& kv, TrainConfig& t) {
    for (const auto& [k, v] : kv) {
        if (k == "epochs")
            t.epochs = to_int(k, v);
        else if (k == "batch_size")
            t.batch_size = to_int(k, v);
        else if (k == "learning_rate")
            t.learning_rate = to_f(k, v);
        else if (k == "beta1")
            t.beta1 = to_f(k, v);
        else if (k == "beta2")
            t.beta2 = to_f(k, v);
        else if (k == "eps")
            t.eps = to_f(k, v);
        else if (k == "clip_norm")
            t.clip_norm = to_f(k, v);
        else
            throw ConfigError("config: unknown key '" + k + "' in [train]");
    }
}

void parse_sample(const std::map<std::string, std::string>& kv, SampleConfig& s) {
    for (const auto& [k, v] : kv) {
        if (k == "count")
            s.count = to_int(k, v);
        else if (k == "stride")
            s.stride = to_int(k, v);
        else if (k == "white_injection")
            s.white_injection = to_bool(k, v);
        else if (k == "deterministic")
            s.deterministic = to_bool(k, v);
        else
            throw ConfigError("config: unknown key '" + k + "' in [sample]");
    }
}

void parse_corruption(const std::map<std::string, std::string>& kv, CorruptionConfig& c) {
    c.enabled = true;
    for (const auto& [k, v] : kv) {
        if (k == "gamma_c")
            c.spec.gamma_c = to_f(k, v);
        else if (k == "a_c")
            c.spec.a_c = to_f(k, v);
        else if (k == "b_c")
            c.spec.b_c = to_f(k, v);
        else if (k == "recovery_gamma_l")
            c.recovery_gamma_l = to_f(k, v);
        else if (k == "recovery_gamma_h")
            c.recovery_gamma_h = to_f(k, v);
        else
            throw ConfigError("config: unknown key '" + k + "' in [corruption]");
    }
}

void parse_metrics(const std::map<std::string, std::string>& kv, MetricsConfig& m) {
    for (const auto& [k, v] : kv) {
        if (k == "extractor")
            m.extractor = v;
        else if (k == "rp_dim")
            m.rp_dim = to_int(k, v);
        else if (k == "rp_seed")
            m.rp_seed = to_u64(k, v);
        else if (k == "classifier_path")
            m.classifier_path = v;
        else if (k == "classifier_epochs")
            m.classifier_epochs = to_int(k, v);
        else if (k == "subset_size")
            m.subset_size = to_int(k, v);
        else if (k == "n_subsets")
            m.n_subsets = to_int(k, v);
        else if (k == "n_bins")
            m.n_bins = to_int(k, v);
        else if (k == "n_real")
            m.n_real = to_int(k, v);
        else
            throw ConfigError("config: unknown key '" + k + "' in [metrics]");
    }
}

void parse_sweep(const std::map<std::string, std::string>& kv, SweepConfig& s) {
    for (const auto& [k, v] : kv) {
        if (k == "gammas") {
            s.gammas.clear();
            for (const std::string& g : split(v, ',')) s.gammas.push_back(to_f(k, g));
        } else if (k == "bands") {
            s.bands.clear();
            for (const std::string& b : split(v, ',')) {
                auto colon = b.find(':');
                if (colon == std::string::npos)
                    throw ConfigError("config: band must be lo:hi, got: " + b);
                s.bands.emplace_back(to_f(k, trim(b.substr(0, colon))),
                                     to_f(k, trim(b.substr(colon + 1))));
            }
        } else
            throw ConfigError("config: unknown key '" + k + "' in [sweep]");
    }
}

void parse_spectrum(const std::map<std::string, std::string>& kv, SpectrumConfig& s) {
    for (const auto& [k, v] : kv) {
        if (k == "timesteps") {
            s.timesteps.clear();
            for (const std::string& t : split(v, ',')) s.timesteps.push_back(to_int(k, t));
        } else if (k == "n_bins")
            s.n_bins = to_int(k, v);
        else if (k == "batch")
            s.batch = to_int(k, v);
        else
            throw ConfigError("config: unknown key '" + k + "' in [spectrum]");
    }
}

}  // namespace

RunConfig config_from_ini(const std::string& text) {
    IniData data = parse_ini(text);
    RunConfig cfg;
    for (const auto& sec : data) {
        const std::string& name = sec.first;
        if (name == "run")
            parse_run(sec.second, cfg);
        else if (name == "dataset")
            parse_dataset(sec.second, cfg.dataset);
        else if (name == "schedule")
            parse_schedule(sec.second, cfg);
        else if (name == "weight") {
            try {
                cfg.weight = weight_from_kv(sec.second);
            } catch (const std::exception& e) {
                throw ConfigError(std::string("config: bad [weight]: ") + e.what());
            }
        } else if (name == "arch")
            parse_arch(sec.second, cfg.arch, cfg.dataset.h, cfg.dataset.w);
        else if (name == "train")
            parse_train(sec.second, cfg.train);
        else if (name == "sample")
            parse_sample(sec.second, cfg.sample);
        else if (name == "corruption")
            parse_corruption(sec.second, cfg.corruption);
        else if (name == "metrics")
            parse_metrics(sec.second, cfg.metrics);
        else if (name == "sweep")
            parse_sweep(sec.second, cfg.sweep);
        else if (name == "spectrum")
            parse_spectrum(sec.second, cfg.spectrum);
        else
            throw ConfigError("config: unknown section [" + name + "]");
    }
    // arch rides on the dataset dims even when [arch] is absent
    cfg.arch.in_h = cfg.dataset.h;
    cfg.arch.in_w = cfg.dataset.w;
    validate_config(cfg);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return config_from_ini(buf.str());
}

std::string config_to_ini(const RunConfig& cfg) {
    IniData data;
    auto& run = data["run"];
    run["name"] = cfg.name;
    run["out_dir"] = cfg.out_dir;
    {
        std::string s;
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
            s += (i ? "," : "") + std::to_string(cfg.seeds[i]);
        run["seeds"] = s;
    }
    run["threads"] = std::to_string(cfg.threads);

    auto& ds = data["dataset"];
    ds["kind"] = cfg.dataset.kind;
    ds["n"] = std::to_string(cfg.dataset.n);
    ds["h"] = std::to_string(cfg.dataset.h);
    ds["w"] = std::to_string(cfg.dataset.w);
    ds["seed"] = std::to_string(cfg.dataset.gen_seed);
    ds["mean"] = fmt_f(cfg.dataset.mean);
    ds["var"] = fmt_f(cfg.dataset.var);
    ds["clip"] = cfg.dataset.clip ? "1" : "0";
    if (!cfg.dataset.images_path.empty()) ds["images_path"] = cfg.dataset.images_path;
    if (!cfg.dataset.labels_path.empty()) ds["labels_path"] = cfg.dataset.labels_path;
    if (!cfg.dataset.path.empty()) ds["path"] = cfg.dataset.path;
    ds["source"] = cfg.dataset.source;
    ds["band_lo"] = fmt_f(cfg.dataset.band_lo);
    ds["band_hi"] = fmt_f(cfg.dataset.band_hi);
    ds["noise_gamma"] = fmt_f(cfg.dataset.noise_gamma);
    ds["noise_band_lo"] = fmt_f(cfg.dataset.noise_band_lo);
    ds["noise_band_hi"] = fmt_f(cfg.dataset.noise_band_hi);

    auto& sch = data["schedule"];
    sch["T"] = std::to_string(cfg.T);
    sch["beta_start"] = fmt_f(cfg.beta_start);
    sch["beta_end"] = fmt_f(cfg.beta_end);

    data["weight"] = weight_to_kv(cfg.weight);

    auto& ar = data["arch"];
    {
        std::string s;
        for (std::size_t i = 0; i < cfg.arch.widths.size(); ++i)
            s += (i ? "," : "") + std::to_string(cfg.arch.widths[i]);
        ar["widths"] = s;
    }
    ar["time_dim"] = std::to_string(cfg.arch.time_dim);
    ar["groups"] = std::to_string(cfg.arch.groups);

    auto& tr = data["train"];
    tr["epochs"] = std::to_string(cfg.train.epochs);
    tr["batch_size"] = std::to_string(cfg.train.batch_size);
    tr["learning_rate"] = fmt_f(cfg.train.learning_rate);
    tr["beta1"] = fmt_f(cfg.train.beta1);
    tr["beta2"] = fmt_f(cfg.train.beta2);
    tr["eps"] = fmt_f(cfg.train.eps);
    tr["clip_norm"] = fmt_f(cfg.train.clip_norm);

    auto& sa = data["sample"];
    sa["count"] = std::to_string(cfg.sample.count);
    sa["stride"] = std::to_string(cfg.sample.stride);
    sa["white_injection"] = cfg.sample.white_injection ? "1" : "0";
    sa["deterministic"] = cfg.sample.deterministic ? "1" : "0";

    if (cfg.corruption.enabled) {
        auto& co = data["corruption"];
        co["gamma_c"] = fmt_f(cfg.corruption.spec.gamma_c);
        co["a_c"] = fmt_f(cfg.corruption.spec.a_c);
        co["b_c"] = fmt_f(cfg.corruption.spec.b_c);
        co["recovery_gamma_l"] = fmt_f(cfg.corruption.recovery_gamma_l);
        co["recovery_gamma_h"] = fmt_f(cfg.corruption.recovery_gamma_h);
    }

    auto& me = data["metrics"];
    me["extractor"] = cfg.metrics.extractor;
    me["rp_dim"] = std::to_string(cfg.metrics.rp_dim);
    me["rp_seed"] = std::to_string(cfg.metrics.rp_seed);
    if (!cfg.metrics.classifier_path.empty()) me["classifier_path"] = cfg.metrics.classifier_path;
    me["classifier_epochs"] = std::to_string(cfg.metrics.classifier_epochs);
    me["subset_size"] = std::to_string(cfg.metrics.subset_size);
    me["n_subsets"] = std::to_string(cfg.metrics.n_subsets);
    me["n_bins"] = std::to_string(cfg.metrics.n_bins);
    me["n_real"] = std::to_string(cfg.metrics.n_real);

    auto& sw = data["sweep"];
    {
        std::string s;
        for (std::size_t i = 0; i < cfg.sweep.gammas.size(); ++i)
            s += (i ? "," : "") + fmt_f(cfg.sweep.gammas[i]);
        sw["gammas"] = s;
    }
    if (!cfg.sweep.bands.empty()) {
        std::string s;
        for (std::size_t i = 0; i < cfg.sweep.bands.size(); ++i)
            s += (i ? "," : "") + fmt_f(cfg.sweep.bands[i].first) + ":" +
                 fmt_f(cfg.sweep.bands[i].second);
        sw["bands"] = s;
    }

    auto& sp = data["spectrum"];
    {
        std::string s;
        for (std::size_t i = 0; i < cfg.spectrum.timesteps.size(); ++i)
            s += (i ? "," : "") + std::to_string(cfg.spectrum.timesteps[i]);
        sp["timesteps"] = s;
    }
    sp["n_bins"] = std::to_string(cfg.spectrum.n_bins);
    sp["batch"] = std::to_string(cfg.spectrum.batch);

    return serialize_ini(data);
}

void validate_config(const RunConfig& cfg) {
    if (cfg.name.empty()) throw ConfigError("config: run name must not be empty");
    if (cfg.seeds.empty()) throw ConfigError("config: at least one seed required");
    if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");

    const DatasetConfig& d = cfg.dataset;
    if (d.kind != "gaussian" && d.kind != "glyphs" && d.kind != "blobs" &&
        d.kind != "bandlimited" && d.kind != "mnist" && d.kind != "fdds")
        throw ConfigError("config: unknown dataset kind: " + d.kind);
    if (d.kind == "mnist" && d.images_path.empty())
        throw ConfigError("config: mnist dataset needs images_path");
    if (d.kind == "fdds" && d.path.empty())
        throw ConfigError("config: fdds dataset needs path");
    if (d.kind != "mnist" && d.kind != "fdds") {
        if (d.n < 1) throw ConfigError("config: dataset n must be >= 1");
        if (d.h < 2 || d.w < 2) throw ConfigError("config: dataset dims too small");
    }
    if (d.kind == "gaussian" && !(d.var >= 0.0))
        throw ConfigError("config: gaussian var must be >= 0");
    if (d.kind == "bandlimited") {
        if (d.source != "glyphs" && d.source != "blobs")
            throw ConfigError("config: bandlimited source must be glyphs or blobs");
        if (!(d.band_lo >= 0.0 && d.band_lo <= d.band_hi && d.band_hi <= 1.0))
            throw ConfigError("config: bandlimited band must satisfy 0 <= lo <= hi <= 1");
        if (d.noise_gamma < 0.0) throw ConfigError("config: noise_gamma must be >= 0");
        if (d.noise_gamma > 0.0 &&
            !(d.noise_band_lo >= 0.0 && d.noise_band_lo <= d.noise_band_hi &&
              d.noise_band_hi <= 1.0))
            throw ConfigError("config: noise band must satisfy 0 <= lo <= hi <= 1");
    }

    try {
        make_schedule(cfg.T, cfg.beta_start, cfg.beta_end);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: bad [schedule]: ") + e.what());
    }
    try {
        validate_weight(cfg.weight);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: bad [weight]: ") + e.what());
    }
    try {
        validate_arch(cfg.arch);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: bad [arch]: ") + e.what());
    }
    if (cfg.train.epochs < 1 || cfg.train.batch_size < 1)
        throw ConfigError("config: train epochs and batch_size must be >= 1");
    if (!(cfg.train.learning_rate >= 0.0))
        throw ConfigError("config: learning_rate must be >= 0");
    if (!(cfg.train.clip_norm > 0.0)) throw ConfigError("config: clip_norm must be > 0");
    if (cfg.sample.count < 1) throw ConfigError("config: sample count must be >= 1");
    if (cfg.sample.stride < 1) throw ConfigError("config: sample stride must be >= 1");
    if (cfg.corruption.enabled) {
        try {
            validate_corruption(cfg.corruption.spec);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: bad [corruption]: ") + e.what());
        }
        if (cfg.corruption.recovery_gamma_l < 0.0 || cfg.corruption.recovery_gamma_h < 0.0)
            throw ConfigError("config: recovery gammas must be >= 0");
    }
    const MetricsConfig& m = cfg.metrics;
    if (m.extractor != "raw_pixels" && m.extractor != "random_projection" &&
        m.extractor != "trained_classifier")
        throw ConfigError("config: unknown metrics extractor: " + m.extractor);
    if (m.extractor == "random_projection" && m.rp_dim < 1)
        throw ConfigError("config: rp_dim must be >= 1");
    if (m.subset_size < 2) throw ConfigError("config: subset_size must be >= 2");
    if (m.n_subsets < 1) throw ConfigError("config: n_subsets must be >= 1");
    if (m.n_bins < 4) throw ConfigError("config: metrics n_bins must be >= 4");
    if (m.n_real < 2) throw ConfigError("config: n_real must be >= 2");
    if (m.classifier_epochs < 1) throw ConfigError("config: classifier_epochs must be >= 1");
    for (double g : cfg.sweep.gammas)
        if (!(g > 0.0 && g < 1.0))
            throw ConfigError("config: sweep gammas must lie in (0,1)");
    for (const auto& b : cfg.sweep.bands)
        if (!(b.first >= 0.0 && b.first <= b.second && b.second <= 1.0))
            throw ConfigError("config: sweep bands must satisfy 0 <= lo <= hi <= 1");
    for (int t : cfg.spectrum.timesteps)
        if (t < 0 || t >= cfg.T)
            throw ConfigError("config: spectrum timestep out of range: " + std::to_string(t));
    if (cfg.spectrum.n_bins < 2) throw ConfigError("config: spectrum n_bins must be >= 2");
    if (cfg.spectrum.batch < 1) throw ConfigError("config: spectrum batch must be >= 1");
}

}  // namespace freqdiff
