#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "curator/Commands.h"
#include "curator/Errors.h"

namespace {

struct Overrides {
    std::string input;
    std::string outputDir;
    std::optional<uint64_t> seed;
    std::optional<size_t> nAug;
    std::optional<double> gamma;
};

curator::EngineConfig loadWithOverrides(const std::string& configPath, const Overrides& ov) {
    curator::EngineConfig cfg = curator::loadEngineConfig(configPath);
    if (!ov.input.empty()) cfg.input = ov.input;
    if (!ov.outputDir.empty()) cfg.outputDir = ov.outputDir;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.nAug) cfg.augmentation.nAug = *ov.nAug;
    if (ov.gamma) {
        if (!cfg.injection) throw curator::ConfigError("--gamma needs an injection section in the config");
        cfg.injection->gamma = *ov.gamma;
    }
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tabcurator: ensemble error detection and clean-data densification for tabular datasets"};
    app.require_subcommand(1);

    std::string configPath;
    Overrides ov;
    app.add_option("-c,--config", configPath, "engine config file (JSON)")->required();
    app.add_option("-i,--input", ov.input, "input CSV (overrides config)");
    app.add_option("-o,--output-dir", ov.outputDir, "output directory (overrides config)");
    uint64_t seedValue = 0;
    auto* seedOpt = app.add_option("-s,--seed", seedValue, "seed (overrides config)");
    size_t nAugValue = 0;
    auto* nAugOpt = app.add_option("--n-aug", nAugValue, "augmentation budget (overrides config)");
    double gammaValue = 0.0;
    auto* gammaOpt = app.add_option("--gamma", gammaValue, "error rate (overrides config)");

    auto* detect = app.add_subcommand("detect", "run detectors and adaptive voting, write the ensemble mask");
    auto* curate = app.add_subcommand("curate", "detect, train the VAE, generate clean rows, merge");
    auto* injectCmd = app.add_subcommand("inject", "inject controlled errors into a clean CSV");
    bool verifyRestore = false;
    injectCmd->add_flag("--verify-restore", verifyRestore, "restore from the mask and compare with the input");
    auto* evaluate = app.add_subcommand("evaluate", "run the pipeline variants and report downstream metrics");
    auto* sweepK = app.add_subcommand("sweep-k", "detection accuracy across fixed voting thresholds");
    auto* sweepAug = app.add_subcommand("sweep-aug", "downstream metric across augmentation sizes");
    auto* sweepErr = app.add_subcommand("sweep-error-rate", "variant metrics across error rates");

    CLI11_PARSE(app, argc, argv);

    if (*seedOpt) ov.seed = seedValue;
    if (*nAugOpt) ov.nAug = nAugValue;
    if (*gammaOpt) ov.gamma = gammaValue;

    try {
        const curator::EngineConfig cfg = loadWithOverrides(configPath, ov);
        if (*detect) {
            curator::cmdDetect(cfg);
        } else if (*curate) {
            curator::cmdCurate(cfg);
        } else if (*injectCmd) {
            curator::cmdInject(cfg, verifyRestore);
        } else if (*evaluate) {
            curator::cmdEvaluate(cfg);
        } else if (*sweepK) {
            curator::cmdSweepK(cfg);
        } else if (*sweepAug) {
            curator::cmdSweepAug(cfg);
        } else if (*sweepErr) {
            curator::cmdSweepErrorRate(cfg);
        }
    } catch (const curator::EngineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exitCode();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
