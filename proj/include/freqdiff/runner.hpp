#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "freqdiff/config.hpp"
#include "freqdiff/dataset.hpp"
#include "freqdiff/metrics.hpp"

namespace freqdiff {

// Command-line overrides layered on top of the config file.
struct CliOverrides {
    std::vector<std::uint64_t> seeds;  // empty: keep config
    std::string out_dir;               // empty: keep config
    int stride = 0;                    // 0: keep config
    int threads = 0;                   // 0: keep config
};

void apply_overrides(RunConfig& cfg, const CliOverrides& o);

// Materialize the dataset a config describes.
Dataset make_dataset(const DatasetConfig& d);

// Build the configured feature extractor, training the classifier on the run
// dataset when no checkpoint path is given.
FeatureExtractor build_extractor(const RunConfig& cfg, const Dataset& ds);

// Subcommand bodies. Each creates the output directory, drops a provenance
// copy of the config, and writes its artifacts; errors surface as exceptions
// (ConfigError -> exit 2, anything else -> exit 3).
void cmd_train(const RunConfig& cfg);
void cmd_sample(const RunConfig& cfg);
void cmd_eval(const RunConfig& cfg);
void cmd_sweep_gamma(const RunConfig& cfg);
void cmd_corrupt_recover(const RunConfig& cfg);
void cmd_spectrum(const RunConfig& cfg);

}  // namespace freqdiff
