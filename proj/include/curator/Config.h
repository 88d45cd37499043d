#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curator/Csv.h"
#include "curator/Detectors.h"
#include "curator/ErrorInjector.h"
#include "curator/Harness.h"
#include "curator/Vae.h"

namespace curator {

struct VotingConfig {
    int kInit = 2;
    int alphaU = 1;
    int iterationCap = 0;   // 0 = automatic
    int regressionBins = 0; // 0 = no class check for regression labels
};

struct HarnessConfig {
    double testFraction = 0.25;
    size_t repeats = 3;
    std::vector<std::string> variants = {"clean", "dirty", "autocure", "mink", "std_impute"};
    int minKThreshold = 3;
    ModelConfig model;
    std::vector<int> kRange;          // default 1..m
    std::vector<size_t> augSizes = {0, 500, 1000, 2000};
    std::vector<double> gammaRange = {0.1, 0.2, 0.3, 0.4};
};

struct EngineConfig {
    std::string input;
    std::string outputDir = "out";
    uint64_t seed = 1;

    CsvReadOptions csv;               // missing tokens, schema hints, label, task
    std::vector<DetectorSpec> detectors;
    std::vector<FdRule> fdRules;
    VotingConfig voting;
    AugmentConfig augmentation;
    std::optional<InjectionPlan> injection;
    HarnessConfig harness;

    void validate() const;
    std::vector<DetectorSpec> registryOrDefault() const;
    HarnessOptions harnessOptions() const;
};

EngineConfig loadEngineConfig(const std::string& path);
EngineConfig parseEngineConfig(const std::string& text);

}  // namespace curator
