#include "curator/Harness.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>

#include <json.hpp>

#include "curator/Encoding.h"
#include "curator/Errors.h"
#include "curator/Rng.h"

namespace curator {

namespace {

// Seed salts for the independent random streams of one pipeline run.
enum : uint64_t {
    kSaltSplit = 0x01,
    kSaltInject = 0x02,
    kSaltEval = 0x03,
    kSaltVae = 0x04,
    kSaltGenerate = 0x05,
};

}  // namespace

DetectionReport detectionMetrics(const DetectionSet& flagged, const ErrorMask& truth) {
    DetectionReport report;
    for (const auto& ref : flagged.cells) {
        if (truth.containsCell(ref)) {
            report.tp += 1;
        } else {
            report.fp += 1;
        }
    }
    for (const auto& entry : truth.entries) {
        if (!flagged.contains(entry.cell)) report.fn += 1;
    }
    const double tp = static_cast<double>(report.tp);
    report.precision = (report.tp + report.fp) > 0 ? tp / static_cast<double>(report.tp + report.fp) : 0.0;
    report.recall = (report.tp + report.fn) > 0 ? tp / static_cast<double>(report.tp + report.fn) : 0.0;
    report.f1 = (report.precision + report.recall) > 0.0
                    ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                    : 0.0;
    return report;
}

double macroF1(const std::vector<std::string>& truth, const std::vector<std::string>& predicted) {
    if (truth.size() != predicted.size()) throw DataError("macro F1: label vectors disagree on length");
    std::map<std::string, std::array<size_t, 3>> counts;  // class -> tp, fp, fn
    for (size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == predicted[i]) {
            counts[truth[i]][0] += 1;
        } else {
            counts[predicted[i]][1] += 1;
            counts[truth[i]][2] += 1;
        }
    }
    if (counts.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [cls, c] : counts) {
        const double tp = static_cast<double>(c[0]);
        const double denom = 2.0 * tp + static_cast<double>(c[1]) + static_cast<double>(c[2]);
        sum += denom > 0.0 ? 2.0 * tp / denom : 0.0;
    }
    return sum / static_cast<double>(counts.size());
}

ExperimentRecord downstreamEval(const Dataset& train, const Dataset& test, const ModelConfig& cfg, uint64_t seed) {
    if (train.task() == Task::None) throw ConfigError("downstream evaluation needs a labeled dataset");

    std::vector<size_t> usable;
    for (size_t r = 0; r < train.rowCount(); ++r) {
        if (train.rowComplete(r)) usable.push_back(r);
    }
    ExperimentRecord record;
    record.seed = seed;
    record.droppedRows = train.rowCount() - usable.size();
    record.trainRowsUsed = usable.size();
    if (record.droppedRows > 0) {
        std::cerr << "[curator] downstream eval dropped " << record.droppedRows << " incomplete rows of "
                  << train.rowCount() << "\n";
    }
    if (usable.empty()) throw DataError("downstream evaluation has no complete training rows");

    const Dataset usableTrain = train.selectRows(usable);
    const EncodingSchema schema = buildEncoding(usableTrain);
    const Matrix full = encodeAllRows(usableTrain, schema);
    const size_t featureWidth = schema.featureWidth();
    const size_t labelWidth = schema.label().width;

    const size_t n = full.rows();
    Rng splitRng(mixSeed(seed, 0x76616c));
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    splitRng.shuffle(order);
    size_t valCount = static_cast<size_t>(std::floor(cfg.valFraction * static_cast<double>(n)));
    if (n - valCount < 1) valCount = n - 1;

    auto fillSplit = [&](size_t from, size_t to, Matrix& x, Matrix& y) {
        x = Matrix(to - from, featureWidth);
        y = Matrix(to - from, labelWidth);
        for (size_t i = from; i < to; ++i) {
            const double* src = full.rowPtr(order[i]);
            std::copy(src, src + featureWidth, x.rowPtr(i - from));
            std::copy(src + featureWidth, src + featureWidth + labelWidth, y.rowPtr(i - from));
        }
    };
    Matrix trainX, trainY, valX, valY;
    fillSplit(valCount, n, trainX, trainY);
    if (valCount > 0) fillSplit(0, valCount, valX, valY);

    std::vector<size_t> dims;
    dims.push_back(featureWidth);
    for (size_t h : cfg.hidden) dims.push_back(h);
    dims.push_back(labelWidth);
    std::vector<Activation> acts(dims.size() - 1, Activation::ReLU);
    acts.back() = Activation::Identity;

    Network net = initNetwork(dims, acts, mixSeed(seed, 0x6e6574));

    TrainOptions options;
    options.epochs = cfg.epochs;
    options.batchSize = cfg.batchSize;
    options.learningRate = cfg.learningRate;
    options.seed = mixSeed(seed, 0x737566);
    if (valCount > 0) {
        options.valInputs = &valX;
        options.valTargets = &valY;
    }
    const LossKind loss = train.task() == Task::Classification ? LossKind::CrossEntropy : LossKind::Mse;

    const auto started = std::chrono::steady_clock::now();
    record.learningCurve = curator::train(net, trainX, trainY, loss, options);
    const auto finished = std::chrono::steady_clock::now();
    record.trainTimeSeconds = std::chrono::duration<double>(finished - started).count();

    // Score on the clean test rows. Test features are encoded with the
    // training schema; test labels are compared as raw values.
    std::vector<size_t> testRows;
    for (size_t r = 0; r < test.rowCount(); ++r) {
        if (test.rowComplete(r)) testRows.push_back(r);
    }
    if (testRows.empty()) throw DataError("downstream evaluation has no complete test rows");
    const Dataset testUsable = test.selectRows(testRows);

    Matrix testX(testUsable.rowCount(), featureWidth);
    {
        // Encode features only; unseen categories map to zero blocks.
        for (size_t r = 0; r < testUsable.rowCount(); ++r) {
            double* out = testX.rowPtr(r);
            for (size_t bi = 0; bi < schema.blocks.size(); ++bi) {
                if (static_cast<int>(bi) == schema.labelBlock) continue;
                const ColumnEncoding& block = schema.blocks[bi];
                if (block.kind == ColumnKind::Numeric) {
                    const double range = block.max - block.min;
                    double scaled =
                        range > 0.0 ? (testUsable.numberAt(r, block.column) - block.min) / range : 0.0;
                    out[block.offset] = std::clamp(scaled, 0.0, 1.0);
                } else {
                    for (size_t j = 0; j < block.width; ++j) out[block.offset + j] = 0.0;
                    const int idx = block.vocabIndex(testUsable.textAt(r, block.column));
                    if (idx >= 0) out[block.offset + static_cast<size_t>(idx)] = 1.0;
                }
            }
        }
    }
    const ForwardPass testPass = forward(net, testX);
    const Matrix& pred = testPass.output();

    if (train.task() == Task::Classification) {
        const auto& vocab = schema.label().vocabulary;
        std::vector<std::string> truthLabels, predLabels;
        truthLabels.reserve(testUsable.rowCount());
        predLabels.reserve(testUsable.rowCount());
        for (size_t r = 0; r < testUsable.rowCount(); ++r) {
            size_t best = 0;
            for (size_t j = 1; j < pred.cols(); ++j) {
                if (pred.at(r, j) > pred.at(r, best)) best = j;
            }
            predLabels.push_back(vocab[best]);
            truthLabels.push_back(*testUsable.labelAt(r));
        }
        record.metricName = "macro_f1";
        record.metric = macroF1(truthLabels, predLabels);
    } else {
        const ColumnEncoding& label = schema.label();
        double sum = 0.0;
        for (size_t r = 0; r < testUsable.rowCount(); ++r) {
            const double scaled = std::clamp(pred.at(r, 0), 0.0, 1.0);
            const double value = label.min + scaled * (label.max - label.min);
            const double diff = value - testUsable.numberAt(r, label.column);
            sum += diff * diff;
        }
        record.metricName = "mse";
        record.metric = sum / static_cast<double>(testUsable.rowCount());
    }
    return record;
}

std::string variantName(VariantKind kind) {
    switch (kind) {
        case VariantKind::Clean: return "clean";
        case VariantKind::Dirty: return "dirty";
        case VariantKind::Autocure: return "autocure";
        case VariantKind::MinK: return "mink";
        case VariantKind::StdImpute: return "std_impute";
    }
    return "unknown";
}

std::string PipelineVariant::id() const {
    if (kind == VariantKind::MinK) return "mink_k=" + std::to_string(kThreshold);
    return variantName(kind);
}

PipelineVariant PipelineVariant::clean() { return PipelineVariant{VariantKind::Clean, 3, {}}; }
PipelineVariant PipelineVariant::dirty() { return PipelineVariant{VariantKind::Dirty, 3, {}}; }
PipelineVariant PipelineVariant::autocure(AugmentConfig cfg) {
    return PipelineVariant{VariantKind::Autocure, 3, std::move(cfg)};
}
PipelineVariant PipelineVariant::minK(int k) { return PipelineVariant{VariantKind::MinK, k, {}}; }
PipelineVariant PipelineVariant::stdImpute() { return PipelineVariant{VariantKind::StdImpute, 3, {}}; }

namespace {

Dataset imputeFlagged(const Dataset& dirty, const DetectionSet& flagged) {
    Dataset out = dirty;
    for (size_t c = 0; c < dirty.colCount(); ++c) {
        const Column& col = dirty.columns()[c];
        std::vector<size_t> targets;
        double sum = 0.0;
        size_t kept = 0;
        for (size_t r = 0; r < dirty.rowCount(); ++r) {
            const bool bad = !col.present[r] || flagged.contains({r, c});
            if (bad) {
                targets.push_back(r);
            } else if (col.kind == ColumnKind::Numeric) {
                sum += col.numeric[r];
                ++kept;
            }
        }
        if (targets.empty()) continue;
        if (col.kind == ColumnKind::Numeric) {
            double mean = kept > 0 ? sum / static_cast<double>(kept) : 0.0;
            if (kept == 0) {
                double fallback = 0.0;
                size_t seen = 0;
                for (size_t r = 0; r < dirty.rowCount(); ++r) {
                    if (col.present[r]) {
                        fallback += col.numeric[r];
                        ++seen;
                    }
                }
                mean = seen > 0 ? fallback / static_cast<double>(seen) : 0.0;
            }
            for (size_t r : targets) out.setCell(r, c, CellValue::ofNumber(mean));
        } else {
            for (size_t r : targets) out.setCell(r, c, CellValue::ofText("dummy"));
        }
    }
    return out;
}

nlohmann::ordered_json planJson(const InjectionPlan& plan) {
    nlohmann::ordered_json doc;
    doc["gamma"] = plan.gamma;
    doc["mix"] = {{"MV", plan.mixMv}, {"OT", plan.mixOt}, {"TP", plan.mixTp}, {"RV", plan.mixRv}};
    doc["outlier_scale"] = plan.outlierScale;
    return doc;
}

}  // namespace

PipelineResult runPipeline(const Dataset& clean, const InjectionPlan& plan, const PipelineVariant& variant,
                           const HarnessOptions& opts, uint64_t seed) {
    const SplitResult split = splitTrainTest(clean, opts.testFraction, mixSeed(seed, kSaltSplit));

    InjectionPlan seededPlan = plan;
    seededPlan.seed = mixSeed(seed, kSaltInject);
    const InjectionResult injected = inject(split.train, seededPlan);

    const uint64_t evalSeed = mixSeed(seed, kSaltEval);

    PipelineResult result;
    nlohmann::ordered_json snapshot;
    snapshot["variant"] = variant.id();
    snapshot["seed"] = seed;
    snapshot["test_fraction"] = opts.testFraction;
    snapshot["plan"] = planJson(plan);

    switch (variant.kind) {
        case VariantKind::Clean: {
            result.record = downstreamEval(split.train, split.test, opts.model, evalSeed);
            break;
        }
        case VariantKind::Dirty: {
            result.record = downstreamEval(injected.dirty, split.test, opts.model, evalSeed);
            break;
        }
        case VariantKind::Autocure: {
            const auto detections = runAll(injected.dirty, opts.registry);
            const AdaptiveResult adaptive = adaptiveDetect(injected.dirty, detections, opts.kInit, opts.alphaU,
                                                           opts.iterationCap, opts.regressionBins);
            result.detection = detectionMetrics(adaptive.flagged, injected.mask);
            result.voteState = adaptive.state;
            result.cleanFractionRows = adaptive.clean.rows.size();

            AugmentConfig augCfg = variant.augment;
            augCfg.seed = mixSeed(seed, kSaltVae);
            const EncodingSchema schema = buildEncoding(adaptive.clean.data);
            const VaeTrainResult vae = trainVae(adaptive.clean.data, schema, augCfg);
            const Dataset aug = generateRows(vae.model, augCfg.nAug, mixSeed(seed, kSaltGenerate));
            const IntegratedData merged = integrate(injected.dirty, aug);

            snapshot["n_aug"] = augCfg.nAug;
            if (clean.task() == Task::Classification && aug.rowCount() > 0) {
                snapshot["aug_classes"] = labelClasses(aug).size();
            }
            snapshot["latent_dim"] = augCfg.latentDim;
            snapshot["kl_weight"] = augCfg.klWeight;
            snapshot["vae_epochs"] = augCfg.epochs;
            snapshot["k_init"] = opts.kInit;
            snapshot["alpha_u"] = opts.alphaU;
            snapshot["clean_fraction_rows"] = adaptive.clean.rows.size();

            result.record = downstreamEval(merged.data, split.test, opts.model, evalSeed);
            break;
        }
        case VariantKind::MinK: {
            const auto detections = runAll(injected.dirty, opts.registry);
            const AdaptiveResult fixed = minKDetect(injected.dirty, detections, variant.kThreshold);
            result.detection = detectionMetrics(fixed.flagged, injected.mask);
            result.voteState = fixed.state;
            result.cleanFractionRows = fixed.clean.rows.size();
            snapshot["k"] = variant.kThreshold;
            result.record = downstreamEval(fixed.clean.data, split.test, opts.model, evalSeed);
            break;
        }
        case VariantKind::StdImpute: {
            const auto detections = runAll(injected.dirty, opts.registry);
            const AdaptiveResult adaptive = adaptiveDetect(injected.dirty, detections, opts.kInit, opts.alphaU,
                                                           opts.iterationCap, opts.regressionBins);
            result.detection = detectionMetrics(adaptive.flagged, injected.mask);
            result.voteState = adaptive.state;
            result.cleanFractionRows = adaptive.clean.rows.size();
            const Dataset imputed = imputeFlagged(injected.dirty, adaptive.flagged);
            result.record = downstreamEval(imputed, split.test, opts.model, evalSeed);
            break;
        }
    }

    result.record.pipelineId = variant.id();
    result.record.configSnapshot = snapshot.dump();
    result.record.seed = seed;
    return result;
}

std::vector<KSweepRow> sweepK(const Dataset& clean, const InjectionPlan& plan, const std::vector<int>& kRange,
                              const HarnessOptions& opts, uint64_t seed) {
    const SplitResult split = splitTrainTest(clean, opts.testFraction, mixSeed(seed, kSaltSplit));
    InjectionPlan seededPlan = plan;
    seededPlan.seed = mixSeed(seed, kSaltInject);
    const InjectionResult injected = inject(split.train, seededPlan);
    const auto detections = runAll(injected.dirty, opts.registry);

    std::vector<KSweepRow> rows;
    rows.reserve(kRange.size());
    for (int k : kRange) {
        const AdaptiveResult fixed = minKDetect(injected.dirty, detections, k);
        KSweepRow row;
        row.k = k;
        row.report = detectionMetrics(fixed.flagged, injected.mask);
        rows.push_back(row);
    }
    return rows;
}

std::vector<AugSweepRow> sweepAugmentation(const Dataset& clean, const InjectionPlan& plan,
                                           const std::vector<size_t>& sizes, const AugmentConfig& augBase,
                                           const HarnessOptions& opts, uint64_t seed) {
    if (sizes.empty()) throw ConfigError("augmentation sweep needs at least one size");
    const SplitResult split = splitTrainTest(clean, opts.testFraction, mixSeed(seed, kSaltSplit));
    InjectionPlan seededPlan = plan;
    seededPlan.seed = mixSeed(seed, kSaltInject);
    const InjectionResult injected = inject(split.train, seededPlan);

    const auto detections = runAll(injected.dirty, opts.registry);
    const AdaptiveResult adaptive = adaptiveDetect(injected.dirty, detections, opts.kInit, opts.alphaU,
                                                   opts.iterationCap, opts.regressionBins);

    AugmentConfig augCfg = augBase;
    augCfg.seed = mixSeed(seed, kSaltVae);
    const EncodingSchema schema = buildEncoding(adaptive.clean.data);
    const VaeTrainResult vae = trainVae(adaptive.clean.data, schema, augCfg);

    std::vector<AugSweepRow> rows;
    rows.reserve(sizes.size());
    const uint64_t evalSeed = mixSeed(seed, kSaltEval);
    for (size_t nAug : sizes) {
        const Dataset aug = generateRows(vae.model, nAug, mixSeed(seed, kSaltGenerate));
        const IntegratedData merged = integrate(injected.dirty, aug);
        const ExperimentRecord record = downstreamEval(merged.data, split.test, opts.model, evalSeed);
        AugSweepRow row;
        row.nAug = nAug;
        row.metric = record.metric;
        row.trainTimeSeconds = record.trainTimeSeconds;
        rows.push_back(row);
    }
    return rows;
}

std::vector<ErrorRateSweepRow> sweepErrorRate(const Dataset& clean, const InjectionPlan& planBase,
                                              const std::vector<double>& gammas, const AugmentConfig& augCfg,
                                              const HarnessOptions& opts, uint64_t seed) {
    std::vector<ErrorRateSweepRow> rows;
    rows.reserve(gammas.size());
    const size_t repeats = std::max<size_t>(1, opts.repeats);
    for (double gamma : gammas) {
        InjectionPlan plan = planBase;
        plan.gamma = gamma;
        ErrorRateSweepRow row;
        row.gamma = gamma;
        for (size_t rep = 0; rep < repeats; ++rep) {
            const uint64_t repSeed = mixSeed(seed, 0x1000 + rep);
            row.dirtyMetric += runPipeline(clean, plan, PipelineVariant::dirty(), opts, repSeed).record.metric;
            row.autocureMetric +=
                runPipeline(clean, plan, PipelineVariant::autocure(augCfg), opts, repSeed).record.metric;
            row.stdImputeMetric +=
                runPipeline(clean, plan, PipelineVariant::stdImpute(), opts, repSeed).record.metric;
        }
        row.dirtyMetric /= static_cast<double>(repeats);
        row.autocureMetric /= static_cast<double>(repeats);
        row.stdImputeMetric /= static_cast<double>(repeats);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace curator
