#include <doctest.h>

#include <cmath>
#include <set>

#include "TestUtils.h"
#include "curator/Errors.h"
#include "curator/Harness.h"
#include "curator/Rng.h"

using namespace curator;
using testutil::numericColumn;
using testutil::textColumn;

namespace {

// Brute-force oracle: count tp/fp/fn by scanning both sets directly.
void bruteForceCounts(const DetectionSet& flagged, const ErrorMask& truth, size_t& tp, size_t& fp, size_t& fn) {
    tp = fp = fn = 0;
    std::set<CellRef> truthCells;
    for (const auto& entry : truth.entries) truthCells.insert(entry.cell);
    for (const auto& ref : flagged.cells) {
        if (truthCells.count(ref)) {
            ++tp;
        } else {
            ++fp;
        }
    }
    for (const auto& ref : truthCells) {
        if (!flagged.cells.count(ref)) ++fn;
    }
}

HarnessOptions fastOptions() {
    HarnessOptions opts;
    opts.registry = {DetectorSpec::missing(), DetectorSpec::outlierIqr(1.5), DetectorSpec::outlierSd(2.0),
                     DetectorSpec::duplicates()};
    opts.model.epochs = 60;
    opts.model.hidden = {16, 8};
    opts.testFraction = 0.25;
    return opts;
}

InjectionPlan mvOtPlan(double gamma) {
    InjectionPlan plan;
    plan.gamma = gamma;
    plan.mixMv = 0.5;
    plan.mixOt = 0.5;
    return plan;
}

}  // namespace

TEST_CASE("detection metrics formulas") {
    ErrorMask truth;
    for (size_t r = 0; r < 5; ++r) truth.entries.push_back({{r, 0}, ErrorType::MV, CellValue::ofNumber(1)});

    DetectionSet perfect;
    for (size_t r = 0; r < 5; ++r) perfect.cells.insert({r, 0});
    const DetectionReport exact = detectionMetrics(perfect, truth);
    CHECK(exact.precision == 1.0);
    CHECK(exact.recall == 1.0);
    CHECK(exact.f1 == 1.0);

    const DetectionReport nothing = detectionMetrics(DetectionSet{}, truth);
    CHECK(nothing.recall == 0.0);
    CHECK(nothing.f1 == 0.0);

    // tp=3, fp=1, fn=2 -> p=0.75, r=0.6, f1=2/3.
    ErrorMask five;
    for (size_t r = 0; r < 5; ++r) five.entries.push_back({{r, 0}, ErrorType::MV, CellValue::ofNumber(1)});
    DetectionSet partial;
    partial.cells = {{0, 0}, {1, 0}, {2, 0}, {9, 9}};
    const DetectionReport mixed = detectionMetrics(partial, five);
    CHECK(mixed.tp == 3);
    CHECK(mixed.fp == 1);
    CHECK(mixed.fn == 2);
    CHECK(mixed.precision == doctest::Approx(0.75));
    CHECK(mixed.recall == doctest::Approx(0.6));
    CHECK(mixed.f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("detection metrics agree with the brute-force counter") {
    Rng rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        DetectionSet flagged;
        ErrorMask truth;
        std::set<CellRef> used;
        const size_t nFlag = rng.uniformIndex(30);
        const size_t nTruth = rng.uniformIndex(30);
        for (size_t i = 0; i < nFlag; ++i) flagged.cells.insert({rng.uniformIndex(20), rng.uniformIndex(5)});
        for (size_t i = 0; i < nTruth; ++i) {
            const CellRef ref{rng.uniformIndex(20), rng.uniformIndex(5)};
            if (used.insert(ref).second) truth.entries.push_back({ref, ErrorType::MV, CellValue::ofNumber(0)});
        }
        std::sort(truth.entries.begin(), truth.entries.end(),
                  [](const auto& a, const auto& b) { return a.cell < b.cell; });
        size_t tp, fp, fn;
        bruteForceCounts(flagged, truth, tp, fp, fn);
        const DetectionReport report = detectionMetrics(flagged, truth);
        CHECK(report.tp == tp);
        CHECK(report.fp == fp);
        CHECK(report.fn == fn);
        if (tp + fp > 0) {
            CHECK(report.precision == doctest::Approx(double(tp) / double(tp + fp)));
        } else {
            CHECK(report.precision == 0.0);
        }
        if (report.precision + report.recall > 0) {
            CHECK(report.f1 == doctest::Approx(2 * report.precision * report.recall /
                                               (report.precision + report.recall)));
        } else {
            CHECK(report.f1 == 0.0);
        }
    }
}

TEST_CASE("macro f1 basics") {
    CHECK(macroF1({"a", "b", "a"}, {"a", "b", "a"}) == 1.0);
    CHECK(macroF1({"a", "a"}, {"b", "b"}) == 0.0);
    // Hand check: class a has tp=1 fn=1, class b has tp=1 fp=1.
    const double f1 = macroF1({"a", "a", "b"}, {"a", "b", "b"});
    CHECK(f1 == doctest::Approx((2.0 / 3.0 + 2.0 / 3.0) / 2.0));
}

TEST_CASE("downstream eval separates an easy blob") {
    const Dataset blob = testutil::makeBlobs(400, 2, 6.0, 7);
    const SplitResult split = splitTrainTest(blob, 0.25, 3);
    ModelConfig cfg;
    cfg.epochs = 80;
    cfg.hidden = {16, 8};
    const ExperimentRecord record = downstreamEval(split.train, split.test, cfg, 5);
    CHECK(record.metricName == "macro_f1");
    CHECK(record.metric > 0.95);
    CHECK(record.learningCurve.size() == cfg.epochs);
    CHECK(record.trainTimeSeconds > 0.0);

    const ExperimentRecord again = downstreamEval(split.train, split.test, cfg, 5);
    CHECK(again.metric == record.metric);
}

TEST_CASE("downstream eval solves noiseless regression") {
    Rng rng(70);
    std::vector<double> xs(300), ys(300);
    for (size_t i = 0; i < xs.size(); ++i) {
        xs[i] = rng.uniform01();
        ys[i] = xs[i];
    }
    Dataset ds = Dataset::fromColumns({numericColumn("x", xs), numericColumn("y", ys)});
    ds.setLabel(1, Task::Regression);
    const SplitResult split = splitTrainTest(ds, 0.25, 4);
    ModelConfig cfg;
    cfg.epochs = 200;
    cfg.hidden = {16, 8};
    const ExperimentRecord record = downstreamEval(split.train, split.test, cfg, 6);
    CHECK(record.metricName == "mse");
    CHECK(record.metric < 1e-2);
}

TEST_CASE("downstream eval drops incomplete rows and needs a label") {
    Dataset blob = testutil::makeBlobs(60, 2, 4.0, 9);
    blob.setMissing(0, 0);
    blob.setMissing(1, 1);
    const SplitResult split = splitTrainTest(blob, 0.3, 2);
    ModelConfig cfg;
    cfg.epochs = 5;
    const ExperimentRecord record = downstreamEval(split.train, split.test, cfg, 1);
    CHECK(record.droppedRows + record.trainRowsUsed == split.train.rowCount());

    Dataset unlabeled = Dataset::fromColumns({numericColumn("x", {1, 2, 3})});
    CHECK_THROWS_AS(downstreamEval(unlabeled, unlabeled, cfg, 1), ConfigError);
}

TEST_CASE("pipeline variants run on identical data and are seed-deterministic") {
    const Dataset clean = testutil::makeBlobs(400, 3, 2.5, 21);
    const HarnessOptions opts = fastOptions();
    const InjectionPlan plan = mvOtPlan(0.2);

    const PipelineResult dirtyA = runPipeline(clean, plan, PipelineVariant::dirty(), opts, 11);
    const PipelineResult dirtyB = runPipeline(clean, plan, PipelineVariant::dirty(), opts, 11);
    CHECK(dirtyA.record.metric == dirtyB.record.metric);
    CHECK(dirtyA.record.pipelineId == "dirty");
    CHECK_FALSE(dirtyA.detection.has_value());

    const PipelineResult cleanRun = runPipeline(clean, plan, PipelineVariant::clean(), opts, 11);
    CHECK(cleanRun.record.pipelineId == "clean");

    AugmentConfig aug;
    aug.nAug = 0;
    aug.latentDim = 4;
    aug.epochs = 30;
    aug.klWeight = 0.02;
    const PipelineResult zeroAug = runPipeline(clean, plan, PipelineVariant::autocure(aug), opts, 11);
    // A zero augmentation budget degenerates to training on the dirty data.
    CHECK(zeroAug.record.metric == dirtyA.record.metric);
    CHECK(zeroAug.detection.has_value());
    CHECK(zeroAug.voteState.has_value());
    CHECK(zeroAug.detection->precision >= 0.0);

    aug.nAug = 50;
    const PipelineResult withAug = runPipeline(clean, plan, PipelineVariant::autocure(aug), opts, 11);
    // Integration never drops data: every dirty row plus the budget.
    const SplitResult split = splitTrainTest(clean, opts.testFraction, 0);
    CHECK(withAug.record.trainRowsUsed + withAug.record.droppedRows == split.train.rowCount() + 50);

    const PipelineResult mink = runPipeline(clean, plan, PipelineVariant::minK(2), opts, 11);
    CHECK(mink.record.pipelineId == "mink_k=2");
    CHECK(mink.detection.has_value());

    const PipelineResult imputed = runPipeline(clean, plan, PipelineVariant::stdImpute(), opts, 11);
    CHECK(imputed.record.pipelineId == "std_impute");
    CHECK(imputed.record.droppedRows == 0);  // imputation fills every hole
}

TEST_CASE("k sweep recall never increases") {
    const Dataset clean = testutil::makeBlobs(500, 3, 2.5, 33);
    const HarnessOptions opts = fastOptions();
    std::vector<int> kRange;
    for (int k = 1; k <= static_cast<int>(opts.registry.size()); ++k) kRange.push_back(k);
    const auto rows = sweepK(clean, mvOtPlan(0.15), kRange, opts, 13);
    REQUIRE(rows.size() == kRange.size());
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].report.recall <= rows[i - 1].report.recall + 1e-12);
    }
    // k = 1 flags the union of all detectors, so recall is maximal there.
    CHECK(rows[0].report.recall >= rows.back().report.recall);
}

TEST_CASE("augmentation sweep emits one row per size with the zero anchor") {
    const Dataset clean = testutil::makeBlobs(300, 2, 3.0, 44);
    HarnessOptions opts = fastOptions();
    opts.model.epochs = 30;
    AugmentConfig aug;
    aug.latentDim = 4;
    aug.epochs = 30;
    aug.klWeight = 0.02;
    const std::vector<size_t> sizes = {0, 100, 200};
    const auto rows = sweepAugmentation(clean, mvOtPlan(0.15), sizes, aug, opts, 17);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].nAug == 0);
    for (const auto& row : rows) CHECK(std::isfinite(row.metric));
    CHECK_THROWS_AS(sweepAugmentation(clean, mvOtPlan(0.15), {}, aug, opts, 17), ConfigError);
}

TEST_CASE("error-rate sweep emits one row per gamma and is reproducible") {
    const Dataset clean = testutil::makeBlobs(300, 2, 3.0, 55);
    HarnessOptions opts = fastOptions();
    opts.model.epochs = 25;
    opts.repeats = 1;
    AugmentConfig aug;
    aug.nAug = 150;
    aug.latentDim = 4;
    aug.epochs = 25;
    aug.klWeight = 0.02;
    const std::vector<double> gammas = {0.1, 0.25};
    const auto rows = sweepErrorRate(clean, mvOtPlan(0.1), gammas, aug, opts, 19);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].gamma == 0.1);
    CHECK(rows[1].gamma == 0.25);
    const auto again = sweepErrorRate(clean, mvOtPlan(0.1), gammas, aug, opts, 19);
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].dirtyMetric == again[i].dirtyMetric);
        CHECK(rows[i].autocureMetric == again[i].autocureMetric);
        CHECK(rows[i].stdImputeMetric == again[i].stdImputeMetric);
    }
}
