#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curator/Dataset.h"
#include "curator/Detectors.h"
#include "curator/ErrorInjector.h"
#include "curator/NeuralNet.h"
#include "curator/Vae.h"
#include "curator/Voting.h"

namespace curator {

struct DetectionReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    size_t tp = 0;
    size_t fp = 0;
    size_t fn = 0;
};

DetectionReport detectionMetrics(const DetectionSet& flagged, const ErrorMask& truth);

struct ModelConfig {
    std::vector<size_t> hidden = {32, 16};
    size_t epochs = 500;
    size_t batchSize = 64;
    double learningRate = 1e-3;
    double valFraction = 0.1;  // slice of the training rows kept for the curve
};

struct ExperimentRecord {
    std::string pipelineId;
    std::string metricName;  // macro_f1 or mse
    double metric = 0.0;
    double trainTimeSeconds = 0.0;
    std::string configSnapshot;  // JSON
    uint64_t seed = 0;
    std::vector<EpochLoss> learningCurve;
    size_t trainRowsUsed = 0;
    size_t droppedRows = 0;
};

// Trains the downstream MLP on the complete rows of `train` and scores
// it on `test` (macro F1 for classification, MSE in original units for
// regression). Rows with missing cells are dropped before encoding.
ExperimentRecord downstreamEval(const Dataset& train, const Dataset& test, const ModelConfig& cfg, uint64_t seed);

double macroF1(const std::vector<std::string>& truth, const std::vector<std::string>& predicted);

enum class VariantKind { Clean, Dirty, Autocure, MinK, StdImpute };

std::string variantName(VariantKind kind);

struct PipelineVariant {
    VariantKind kind = VariantKind::Dirty;
    int kThreshold = 3;       // MinK only
    AugmentConfig augment;    // Autocure only

    std::string id() const;

    static PipelineVariant clean();
    static PipelineVariant dirty();
    static PipelineVariant autocure(AugmentConfig cfg);
    static PipelineVariant minK(int k);
    static PipelineVariant stdImpute();
};

struct HarnessOptions {
    double testFraction = 0.25;
    std::vector<DetectorSpec> registry;
    int kInit = 2;
    int alphaU = 1;
    int iterationCap = 0;   // 0 = default
    int regressionBins = 0; // 0 = class check skipped for regression
    ModelConfig model;
    size_t repeats = 3;
};

struct PipelineResult {
    ExperimentRecord record;
    std::optional<DetectionReport> detection;
    std::optional<VoteState> voteState;
    size_t cleanFractionRows = 0;
};

// Shared protocol for every variant: split the clean source, inject
// into the training half only, apply the variant, evaluate against the
// untouched clean test half. The split and injection depend only on
// (clean, plan, seed), so variants compete on identical data.
PipelineResult runPipeline(const Dataset& clean, const InjectionPlan& plan, const PipelineVariant& variant,
                           const HarnessOptions& opts, uint64_t seed);

struct KSweepRow {
    int k = 0;
    DetectionReport report;
};

std::vector<KSweepRow> sweepK(const Dataset& clean, const InjectionPlan& plan, const std::vector<int>& kRange,
                              const HarnessOptions& opts, uint64_t seed);

struct AugSweepRow {
    size_t nAug = 0;
    double metric = 0.0;
    double trainTimeSeconds = 0.0;
};

// One autocure run per size with a shared detection phase; the VAE is
// trained once and generates every size.
std::vector<AugSweepRow> sweepAugmentation(const Dataset& clean, const InjectionPlan& plan,
                                           const std::vector<size_t>& sizes, const AugmentConfig& augBase,
                                           const HarnessOptions& opts, uint64_t seed);

struct ErrorRateSweepRow {
    double gamma = 0.0;
    double dirtyMetric = 0.0;
    double autocureMetric = 0.0;
    double stdImputeMetric = 0.0;
};

std::vector<ErrorRateSweepRow> sweepErrorRate(const Dataset& clean, const InjectionPlan& planBase,
                                              const std::vector<double>& gammas, const AugmentConfig& augCfg,
                                              const HarnessOptions& opts, uint64_t seed);

}  // namespace curator
