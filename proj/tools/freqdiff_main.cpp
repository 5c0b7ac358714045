#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "freqdiff/config.hpp"
#include "freqdiff/runner.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    int stride = 0;
    int threads = 0;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config_path, "run configuration file")->required();
    sub->add_option("--seed", f.seeds, "random seed (repeatable; overrides config)");
    sub->add_option("--out", f.out_dir, "output directory (overrides config)");
    sub->add_option("--stride", f.stride, "sampling stride (overrides config)");
    sub->add_option("--device-threads", f.threads, "worker thread count (overrides config)");
}

int run_command(const CommonFlags& f, void (*body)(const freqdiff::RunConfig&)) {
    freqdiff::RunConfig cfg;
    try {
        cfg = freqdiff::load_config_file(f.config_path);
        freqdiff::CliOverrides o;
        o.seeds = f.seeds;
        o.out_dir = f.out_dir;
        o.stride = f.stride;
        o.threads = f.threads;
        freqdiff::apply_overrides(cfg, o);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    try {
        body(cfg);
    } catch (const freqdiff::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-shaped diffusion toolkit"};
    app.require_subcommand(1);

    struct Entry {
        const char* name;
        const char* help;
        void (*body)(const freqdiff::RunConfig&);
    };
    const Entry entries[] = {
        {"train", "train a noise-prediction model", freqdiff::cmd_train},
        {"sample", "draw samples from a trained model", freqdiff::cmd_sample},
        {"eval", "compute metrics for a trained model", freqdiff::cmd_eval},
        {"sweep-gamma", "train/evaluate across a gamma_l grid", freqdiff::cmd_sweep_gamma},
        {"corrupt-recover", "corruption-recovery ablation grid", freqdiff::cmd_corrupt_recover},
        {"spectrum", "forward-process spectrum dump", freqdiff::cmd_spectrum},
    };

    std::vector<CommonFlags> flags(std::size(entries));
    std::vector<std::function<int()>> bodies(std::size(entries));
    for (std::size_t i = 0; i < std::size(entries); ++i) {
        CLI::App* sub = app.add_subcommand(entries[i].name, entries[i].help);
        add_common(sub, flags[i]);
        auto body = entries[i].body;
        CommonFlags* fl = &flags[i];
        sub->callback([fl, body, &bodies, i]() {
            bodies[i] = [fl, body]() { return run_command(*fl, body); };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        // CLI11 returns 0 for --help; anything else is a usage/config problem
        return code == 0 ? 0 : 2;
    }

    for (auto& b : bodies)
        if (b) return b();
    return 2;
}
