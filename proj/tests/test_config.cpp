#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "freqdiff/config.hpp"

using namespace freqdiff;

TEST_CASE("ini parsing handles sections, comments, and whitespace") {
    const std::string text =
        "# leading comment\n"
        "[run]\n"
        "name = demo run\n"
        "threads=2   \n"
        "; another comment style\n"
        "\n"
        "[dataset]\n"
        "  kind = glyphs\n"
        "note = a=b still one pair\n";
    IniData d = parse_ini(text);
    REQUIRE(d.count("run") == 1);
    REQUIRE(d.count("dataset") == 1);
    CHECK(d["run"]["name"] == "demo run");
    CHECK(d["run"]["threads"] == "2");
    CHECK(d["dataset"]["kind"] == "glyphs");
    CHECK(d["dataset"]["note"] == "a=b still one pair");

    CHECK_THROWS_AS(parse_ini("[run\nname = x\n"), ConfigError);
    CHECK_THROWS_AS(parse_ini("[]\n"), ConfigError);
    CHECK_THROWS_AS(parse_ini("key = before any section\n"), ConfigError);
    CHECK_THROWS_AS(parse_ini("[run]\njust a bare line\n"), ConfigError);
    CHECK_THROWS_AS(parse_ini("[run]\n= value without key\n"), ConfigError);
    CHECK_THROWS_AS(parse_ini("[run]\nname = a\nname = b\n"), ConfigError);
}

TEST_CASE("ini serialization round-trips the data") {
    IniData d;
    d["alpha"]["x"] = "1";
    d["alpha"]["y"] = "two words";
    d["beta"]["z"] = "0.5:0.9,0.1:0.2";
    IniData back = parse_ini(serialize_ini(d));
    CHECK(back == d);
}

TEST_CASE("an empty config yields the documented defaults") {
    RunConfig cfg = config_from_ini("");
    CHECK(cfg.name == "run");
    CHECK(cfg.out_dir == "out");
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(cfg.T == 200);
    CHECK(cfg.beta_start == 1e-4);
    CHECK(cfg.beta_end == 0.02);
    CHECK(cfg.weight.kind == WeightKind::Flat);
    CHECK(cfg.dataset.kind == "gaussian");
    CHECK(cfg.dataset.h == 28);
    CHECK(cfg.arch.in_h == 28);  // arch rides on dataset dims
    CHECK(cfg.arch.widths == std::vector<int>{32, 64});
    CHECK(cfg.sample.count == 64);
    CHECK_FALSE(cfg.corruption.enabled);
    CHECK(cfg.metrics.extractor == "raw_pixels");
    CHECK(cfg.spectrum.timesteps == std::vector<int>{0});
}

TEST_CASE("a fully customized config survives the text round trip") {
    RunConfig cfg;
    cfg.name = "rt";
    cfg.out_dir = "some/dir";
    cfg.seeds = {9, 10};
    cfg.threads = 2;
    cfg.dataset.kind = "bandlimited";
    cfg.dataset.n = 48;
    cfg.dataset.h = cfg.dataset.w = 16;
    cfg.dataset.gen_seed = 77;
    cfg.dataset.mean = 0.125;
    cfg.dataset.var = 0.3678794411714423;
    cfg.dataset.clip = true;
    cfg.dataset.source = "blobs";
    cfg.dataset.band_lo = 0.05;
    cfg.dataset.band_hi = 0.45;
    cfg.dataset.noise_gamma = 0.2;
    cfg.dataset.noise_band_lo = 0.6;
    cfg.dataset.noise_band_hi = 0.95;
    cfg.T = 60;
    cfg.beta_start = 0.002;
    cfg.beta_end = 0.11;
    cfg.weight = SpectralWeight::two_band(0.9, 0.1, 0.0, 0.4, 0.4, 1.0);
    cfg.weight.open_bl = true;
    cfg.weight.open_ah = true;
    cfg.arch.in_h = cfg.arch.in_w = 16;
    cfg.arch.widths = {8, 16};
    cfg.arch.time_dim = 24;
    cfg.arch.groups = 4;
    cfg.train.epochs = 7;
    cfg.train.batch_size = 12;
    cfg.train.learning_rate = 0.00375;
    cfg.train.beta1 = 0.85;
    cfg.train.beta2 = 0.995;
    cfg.train.eps = 1e-7;
    cfg.train.clip_norm = 2.5;
    cfg.train.seed = 1;
    cfg.sample.count = 5;
    cfg.sample.stride = 4;
    cfg.sample.white_injection = true;
    cfg.sample.deterministic = true;
    cfg.corruption.enabled = true;
    cfg.corruption.spec = CorruptionSpec{0.75, 0.3, 0.6};
    cfg.corruption.recovery_gamma_l = 0.6;
    cfg.corruption.recovery_gamma_h = 0.4;
    cfg.metrics.extractor = "random_projection";
    cfg.metrics.rp_dim = 20;
    cfg.metrics.rp_seed = 5;
    cfg.metrics.classifier_epochs = 3;
    cfg.metrics.subset_size = 10;
    cfg.metrics.n_subsets = 4;
    cfg.metrics.n_bins = 8;
    cfg.metrics.n_real = 32;
    cfg.sweep.gammas = {0.25, 0.5, 0.75};
    cfg.sweep.bands = {{0.1, 0.3}, {0.5, 0.9}};
    cfg.spectrum.timesteps = {0, 10, 59};
    cfg.spectrum.n_bins = 9;
    cfg.spectrum.batch = 16;

    RunConfig back = config_from_ini(config_to_ini(cfg));
    CHECK(back.name == cfg.name);
    CHECK(back.out_dir == cfg.out_dir);
    CHECK(back.seeds == cfg.seeds);
    CHECK(back.threads == cfg.threads);
    CHECK(back.dataset.kind == cfg.dataset.kind);
    CHECK(back.dataset.n == cfg.dataset.n);
    CHECK(back.dataset.h == cfg.dataset.h);
    CHECK(back.dataset.gen_seed == cfg.dataset.gen_seed);
    CHECK(back.dataset.mean == cfg.dataset.mean);
    CHECK(back.dataset.var == cfg.dataset.var);
    CHECK(back.dataset.clip == cfg.dataset.clip);
    CHECK(back.dataset.source == cfg.dataset.source);
    CHECK(back.dataset.band_lo == cfg.dataset.band_lo);
    CHECK(back.dataset.band_hi == cfg.dataset.band_hi);
    CHECK(back.dataset.noise_gamma == cfg.dataset.noise_gamma);
    CHECK(back.dataset.noise_band_lo == cfg.dataset.noise_band_lo);
    CHECK(back.dataset.noise_band_hi == cfg.dataset.noise_band_hi);
    CHECK(back.T == cfg.T);
    CHECK(back.beta_start == cfg.beta_start);
    CHECK(back.beta_end == cfg.beta_end);
    CHECK(back.weight.kind == WeightKind::TwoBand);
    CHECK(back.weight.gamma_l == cfg.weight.gamma_l);
    CHECK(back.weight.gamma_h == cfg.weight.gamma_h);
    CHECK(back.weight.a_l == cfg.weight.a_l);
    CHECK(back.weight.b_l == cfg.weight.b_l);
    CHECK(back.weight.a_h == cfg.weight.a_h);
    CHECK(back.weight.b_h == cfg.weight.b_h);
    CHECK(back.weight.open_bl == cfg.weight.open_bl);
    CHECK(back.weight.open_ah == cfg.weight.open_ah);
    CHECK(arch_equal(back.arch, cfg.arch));
    CHECK(back.train.epochs == cfg.train.epochs);
    CHECK(back.train.batch_size == cfg.train.batch_size);
    CHECK(back.train.learning_rate == cfg.train.learning_rate);
    CHECK(back.train.beta1 == cfg.train.beta1);
    CHECK(back.train.beta2 == cfg.train.beta2);
    CHECK(back.train.eps == cfg.train.eps);
    CHECK(back.train.clip_norm == cfg.train.clip_norm);
    CHECK(back.sample.count == cfg.sample.count);
    CHECK(back.sample.stride == cfg.sample.stride);
    CHECK(back.sample.white_injection == cfg.sample.white_injection);
    CHECK(back.sample.deterministic == cfg.sample.deterministic);
    CHECK(back.corruption.enabled);
    CHECK(back.corruption.spec.gamma_c == cfg.corruption.spec.gamma_c);
    CHECK(back.corruption.spec.a_c == cfg.corruption.spec.a_c);
    CHECK(back.corruption.spec.b_c == cfg.corruption.spec.b_c);
    CHECK(back.corruption.recovery_gamma_l == cfg.corruption.recovery_gamma_l);
    CHECK(back.corruption.recovery_gamma_h == cfg.corruption.recovery_gamma_h);
    CHECK(back.metrics.extractor == cfg.metrics.extractor);
    CHECK(back.metrics.rp_dim == cfg.metrics.rp_dim);
    CHECK(back.metrics.rp_seed == cfg.metrics.rp_seed);
    CHECK(back.metrics.classifier_epochs == cfg.metrics.classifier_epochs);
    CHECK(back.metrics.subset_size == cfg.metrics.subset_size);
    CHECK(back.metrics.n_subsets == cfg.metrics.n_subsets);
    CHECK(back.metrics.n_bins == cfg.metrics.n_bins);
    CHECK(back.metrics.n_real == cfg.metrics.n_real);
    CHECK(back.sweep.gammas == cfg.sweep.gammas);
    CHECK(back.sweep.bands == cfg.sweep.bands);
    CHECK(back.spectrum.timesteps == cfg.spectrum.timesteps);
    CHECK(back.spectrum.n_bins == cfg.spectrum.n_bins);
    CHECK(back.spectrum.batch == cfg.spectrum.batch);
}

TEST_CASE("config parsing reports precise errors") {
    CHECK_THROWS_AS(config_from_ini("[run]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[nosuch]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[run]\nthreads = abc\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[run]\nthreads = 3.5\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[run]\nseeds = 1,x\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[dataset]\nclip = maybe\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[dataset]\nkind = parquet\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[dataset]\nkind = mnist\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[dataset]\nkind = fdds\n"), ConfigError);

    // values that parse but fail cross-field validation
    CHECK_THROWS_AS(config_from_ini("[run]\nname =\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[run]\nthreads = 0\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[schedule]\nT = 0\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[schedule]\nbeta_end = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[weight]\nkind = mystery\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[weight]\nkind = band_pass\na = 0.9\nb = 0.1\n"),
                    ConfigError);
    CHECK_THROWS_AS(config_from_ini("[arch]\nwidths = 32,33\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[arch]\ngroups = 5\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[train]\nepochs = 0\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[train]\nlearning_rate = -1\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[sample]\nstride = 0\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[corruption]\ngamma_c = 0.5\na_c = 0.9\nb_c = 0.2\n"),
                    ConfigError);
    CHECK_THROWS_AS(config_from_ini("[corruption]\nenabled = 1\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[metrics]\nextractor = inception\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[metrics]\nsubset_size = 1\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[sweep]\ngammas = 0.5,1.0\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[sweep]\nbands = 0.5-0.9\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[sweep]\nbands = 0.9:0.5\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[spectrum]\ntimesteps = 0,200\n"), ConfigError);
    CHECK_THROWS_AS(config_from_ini("[spectrum]\nn_bins = 1\n"), ConfigError);

    // error text names the offender
    try {
        config_from_ini("[train]\nmomentum = 0.9\n");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("momentum") != std::string::npos);
        CHECK(msg.find("train") != std::string::npos);
    }
}

TEST_CASE("config files load from disk") {
    const std::string path = "t_config.ini";
    {
        std::ofstream f(path);
        f << "[run]\nname = from_file\n[dataset]\nh = 16\nw = 16\n[arch]\nwidths = 8,16\n"
             "time_dim = 16\ngroups = 4\n";
    }
    RunConfig cfg = load_config_file(path);
    CHECK(cfg.name == "from_file");
    CHECK(cfg.arch.in_h == 16);
    CHECK(cfg.arch.widths == std::vector<int>{8, 16});
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_config_file("no_such_config.ini"), ConfigError);
}
