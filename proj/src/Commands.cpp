#include "curator/Commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <json.hpp>

#include "curator/Encoding.h"
#include "curator/Errors.h"
#include "curator/Rng.h"
#include "curator/Voting.h"

namespace curator {

namespace {

namespace fs = std::filesystem;

fs::path prepareOutputDir(const EngineConfig& cfg) {
    fs::path dir(cfg.outputDir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory: " + cfg.outputDir);
    return dir;
}

Dataset loadInput(const EngineConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("no input dataset configured");
    return loadCsv(cfg.input, cfg.csv);
}

void writeText(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << text;
}

struct DetectionRun {
    std::vector<DetectionSet> detections;
    AdaptiveResult result;
};

DetectionRun runAdaptive(const EngineConfig& cfg, const Dataset& ds) {
    DetectionRun run;
    run.detections = runAll(ds, cfg.registryOrDefault());
    run.result = adaptiveDetect(ds, run.detections, cfg.voting.kInit, cfg.voting.alphaU, cfg.voting.iterationCap,
                                cfg.voting.regressionBins);
    return run;
}

std::string formatMetric(double v) { return formatNumber(v); }

std::string formatRounded(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

DetectSummary cmdDetect(const EngineConfig& cfg) {
    const fs::path dir = prepareOutputDir(cfg);
    const Dataset ds = loadInput(cfg);
    DetectionRun run;
    try {
        run = runAdaptive(cfg, ds);
    } catch (const AdaptiveLoopError& e) {
        writeText(dir / "trace.jsonl", voteTraceJsonl(e.state()));
        throw;
    }

    for (const auto& detection : run.detections) {
        writeDetectionsCsv(detection, (dir / ("detector_" + detection.detectorId + ".csv")).string());
    }
    writeDetectionsCsv(run.result.flagged, (dir / "ensemble.csv").string());
    writeText(dir / "trace.jsonl", voteTraceJsonl(run.result.state));

    DetectSummary summary;
    summary.detectorCount = run.detections.size();
    summary.finalKAttr = run.result.state.kAttr;
    summary.finalKClass = run.result.state.kClass;
    summary.iterations = run.result.state.iteration;
    summary.flagged = run.result.flagged.cells.size();
    summary.cleanRows = run.result.clean.rows.size();

    std::cout << "detect: m=" << summary.detectorCount << " iterations=" << summary.iterations
              << " k_attr=" << summary.finalKAttr << " k_class=" << summary.finalKClass
              << " flagged=" << summary.flagged << " clean_rows=" << summary.cleanRows << "\n";
    return summary;
}

CurateSummary cmdCurate(const EngineConfig& cfg) {
    const fs::path dir = prepareOutputDir(cfg);
    const Dataset ds = loadInput(cfg);
    const DetectionRun run = runAdaptive(cfg, ds);

    AugmentConfig augCfg = cfg.augmentation;
    augCfg.seed = mixSeed(cfg.seed, 0x637572617465);

    Dataset aug = run.result.clean.data.emptyLike();
    std::vector<VaeLoss> history;
    if (augCfg.nAug > 0) {
        const EncodingSchema schema = buildEncoding(run.result.clean.data);
        const VaeTrainResult vae = trainVae(run.result.clean.data, schema, augCfg);
        history = vae.history;
        aug = generateRows(vae.model, augCfg.nAug, mixSeed(cfg.seed, 0x67656e));
        writeText(dir / "vae_model.json", vaeModelToJson(vae.model));
        writeVaeHistoryCsv(history, (dir / "vae_history.csv").string());
    }
    const IntegratedData merged = integrate(ds, aug);

    writeCsv(merged.data, (dir / "d_final.csv").string());
    writeProvenanceCsv(merged.synthetic, (dir / "provenance.csv").string());
    writeText(dir / "trace.jsonl", voteTraceJsonl(run.result.state));

    CurateSummary summary;
    summary.inputRows = ds.rowCount();
    summary.augmentedRows = aug.rowCount();
    summary.finalRows = merged.data.rowCount();
    summary.cleanFractionRows = run.result.clean.rows.size();

    std::cout << "curate: input_rows=" << summary.inputRows << " clean_fraction=" << summary.cleanFractionRows
              << " generated=" << summary.augmentedRows << " final_rows=" << summary.finalRows << "\n";
    return summary;
}

InjectSummary cmdInject(const EngineConfig& cfg, bool verifyRestore) {
    if (!cfg.injection.has_value()) throw ConfigError("inject needs an injection section in the config");
    const fs::path dir = prepareOutputDir(cfg);
    const Dataset clean = loadInput(cfg);

    InjectionPlan plan = *cfg.injection;
    plan.seed = mixSeed(cfg.seed, 0x696e6a);
    const InjectionResult injected = inject(clean, plan);

    writeCsv(injected.dirty, (dir / "dirty.csv").string());
    writeMaskCsv(injected.mask, (dir / "mask.csv").string());

    InjectSummary summary;
    summary.corruptedCells = injected.mask.entries.size();
    summary.realizedRate = realizedRate(injected.mask, clean);

    if (verifyRestore) {
        const Dataset restored = restore(injected.dirty, injected.mask);
        summary.restoreVerified = toCsvString(restored) == toCsvString(clean);
        if (!summary.restoreVerified) throw InternalError("restore check failed: mask does not reproduce the input");
        std::cout << "restore check: OK\n";
    }

    std::cout << "inject: cells=" << summary.corruptedCells << " realized_rate=" << formatMetric(summary.realizedRate)
              << "\n";
    return summary;
}

namespace {

PipelineVariant variantFromName(const std::string& name, const EngineConfig& cfg) {
    if (name == "clean") return PipelineVariant::clean();
    if (name == "dirty") return PipelineVariant::dirty();
    if (name == "autocure") return PipelineVariant::autocure(cfg.augmentation);
    if (name == "mink") return PipelineVariant::minK(cfg.harness.minKThreshold);
    if (name == "std_impute") return PipelineVariant::stdImpute();
    throw ConfigError("unknown harness variant: " + name);
}

struct VariantStats {
    std::vector<double> metrics;
    std::vector<double> times;

    double mean(const std::vector<double>& v) const {
        double sum = 0.0;
        for (double x : v) sum += x;
        return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
    }
    double stddev(const std::vector<double>& v) const {
        if (v.size() < 2) return 0.0;
        const double m = mean(v);
        double var = 0.0;
        for (double x : v) var += (x - m) * (x - m);
        return std::sqrt(var / static_cast<double>(v.size()));
    }
};

}  // namespace

void cmdEvaluate(const EngineConfig& cfg) {
    if (!cfg.injection.has_value()) throw ConfigError("evaluate needs an injection section in the config");
    const fs::path dir = prepareOutputDir(cfg);
    const Dataset clean = loadInput(cfg);
    const HarnessOptions opts = cfg.harnessOptions();

    std::ofstream records((dir / "records.csv").string(), std::ios::binary);
    if (!records) throw DataError("cannot write records.csv");
    records << "pipeline_id,seed,metric_name,metric,train_time_seconds,train_rows,dropped_rows,"
               "detection_precision,detection_recall,detection_f1\n";

    std::map<std::string, VariantStats> stats;
    std::string metricName;

    for (const auto& variantName : cfg.harness.variants) {
        const PipelineVariant variant = variantFromName(variantName, cfg);
        for (size_t rep = 0; rep < cfg.harness.repeats; ++rep) {
            const uint64_t seed = mixSeed(cfg.seed, 100 + rep);
            const PipelineResult result = runPipeline(clean, *cfg.injection, variant, opts, seed);
            metricName = result.record.metricName;

            records << result.record.pipelineId << ',' << seed << ',' << result.record.metricName << ','
                    << formatMetric(result.record.metric) << ',' << formatMetric(result.record.trainTimeSeconds)
                    << ',' << result.record.trainRowsUsed << ',' << result.record.droppedRows << ',';
            if (result.detection.has_value()) {
                records << formatMetric(result.detection->precision) << ',' << formatMetric(result.detection->recall)
                        << ',' << formatMetric(result.detection->f1);
            } else {
                records << ",,";
            }
            records << '\n';

            writeLossHistoryCsv(result.record.learningCurve,
                                (dir / ("curve_" + result.record.pipelineId + "_s" + std::to_string(seed) + ".csv"))
                                    .string());

            auto& vs = stats[result.record.pipelineId];
            vs.metrics.push_back(result.record.metric);
            vs.times.push_back(result.record.trainTimeSeconds);
        }
    }
    records.close();

    nlohmann::ordered_json summary;
    summary["metric"] = metricName;
    summary["repeats"] = cfg.harness.repeats;
    double combinedTime = 0.0;
    nlohmann::ordered_json variants = nlohmann::ordered_json::object();
    for (const auto& [id, vs] : stats) {
        nlohmann::ordered_json entry;
        entry["metric_mean"] = vs.mean(vs.metrics);
        entry["metric_std"] = vs.stddev(vs.metrics);
        entry["train_time_mean_seconds"] = vs.mean(vs.times);
        variants[id] = std::move(entry);
        if (id != "clean" && id != "autocure") combinedTime += vs.mean(vs.times);
    }
    summary["variants"] = std::move(variants);
    // Sum over the executed baseline variants, the cost of running every
    // traditional curation strategy to pick the best one.
    summary["combined_baselines_train_time_seconds"] = combinedTime;
    writeText(dir / "summary.json", summary.dump(2) + "\n");

    std::cout << "evaluate: metric=" << metricName << "\n";
    for (const auto& [id, vs] : stats) {
        std::cout << "  " << id << ": mean=" << formatRounded(vs.mean(vs.metrics))
                  << " std=" << formatRounded(vs.stddev(vs.metrics))
                  << " train_time=" << formatRounded(vs.mean(vs.times)) << "s\n";
    }
    std::cout << "  combined baselines train time: " << formatRounded(combinedTime) << "s\n";
}

void cmdSweepK(const EngineConfig& cfg) {
    if (!cfg.injection.has_value()) throw ConfigError("sweep-k needs an injection section in the config");
    const fs::path dir = prepareOutputDir(cfg);
    const Dataset clean = loadInput(cfg);
    const HarnessOptions opts = cfg.harnessOptions();

    std::vector<int> kRange = cfg.harness.kRange;
    if (kRange.empty()) {
        for (int k = 1; k <= static_cast<int>(opts.registry.size()); ++k) kRange.push_back(k);
    }
    const auto rows = sweepK(clean, *cfg.injection, kRange, opts, cfg.seed);

    std::ofstream out((dir / "sweep_k.csv").string(), std::ios::binary);
    if (!out) throw DataError("cannot write sweep_k.csv");
    out << "k,precision,recall,f1,tp,fp,fn\n";
    for (const auto& row : rows) {
        out << row.k << ',' << formatMetric(row.report.precision) << ',' << formatMetric(row.report.recall) << ','
            << formatMetric(row.report.f1) << ',' << row.report.tp << ',' << row.report.fp << ',' << row.report.fn
            << '\n';
    }
    std::cout << "sweep-k: wrote " << rows.size() << " rows\n";
}

void cmdSweepAug(const EngineConfig& cfg) {
    if (!cfg.injection.has_value()) throw ConfigError("sweep-aug needs an injection section in the config");
    const fs::path dir = prepareOutputDir(cfg);
    const Dataset clean = loadInput(cfg);
    const HarnessOptions opts = cfg.harnessOptions();

    const auto rows = sweepAugmentation(clean, *cfg.injection, cfg.harness.augSizes, cfg.augmentation, opts, cfg.seed);

    std::ofstream out((dir / "sweep_aug.csv").string(), std::ios::binary);
    if (!out) throw DataError("cannot write sweep_aug.csv");
    out << "n_aug,metric,train_time_seconds\n";
    for (const auto& row : rows) {
        out << row.nAug << ',' << formatMetric(row.metric) << ',' << formatMetric(row.trainTimeSeconds) << '\n';
    }
    std::cout << "sweep-aug: wrote " << rows.size() << " rows\n";
}

void cmdSweepErrorRate(const EngineConfig& cfg) {
    if (!cfg.injection.has_value()) throw ConfigError("sweep-error-rate needs an injection section in the config");
    const fs::path dir = prepareOutputDir(cfg);
    const Dataset clean = loadInput(cfg);
    const HarnessOptions opts = cfg.harnessOptions();

    const auto rows = sweepErrorRate(clean, *cfg.injection, cfg.harness.gammaRange, cfg.augmentation, opts, cfg.seed);

    std::ofstream out((dir / "sweep_error_rate.csv").string(), std::ios::binary);
    if (!out) throw DataError("cannot write sweep_error_rate.csv");
    out << "gamma,dirty,autocure,std_impute\n";
    for (const auto& row : rows) {
        out << formatMetric(row.gamma) << ',' << formatMetric(row.dirtyMetric) << ','
            << formatMetric(row.autocureMetric) << ',' << formatMetric(row.stdImputeMetric) << '\n';
    }
    std::cout << "sweep-error-rate: wrote " << rows.size() << " rows\n";
}

}  // namespace curator
