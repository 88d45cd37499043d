#include <doctest.h>

#include <cmath>
#include <set>

#include "TestUtils.h"
#include "curator/Csv.h"
#include "curator/Detectors.h"
#include "curator/ErrorInjector.h"
#include "curator/Errors.h"
#include "curator/Rng.h"

using namespace curator;
using testutil::numericColumn;
using testutil::textColumn;

namespace {

// 100 rows, 4 feature columns plus a label.
Dataset injectionFixture(uint64_t seed) {
    Rng rng(seed);
    const size_t rows = 100;
    std::vector<double> n1(rows), n2(rows);
    std::vector<std::string> group(rows), city(rows), label(rows);
    const char* groups[] = {"g1", "g2", "g3", "g4", "g5"};
    const char* cities[] = {"rome", "oslo", "kyiv", "lima", "bern"};
    for (size_t r = 0; r < rows; ++r) {
        n1[r] = rng.normal(5.0, 1.5);
        n2[r] = rng.normal(-2.0, 3.0);
        const size_t g = rng.uniformIndex(5);
        group[r] = groups[g];
        city[r] = cities[g];  // group -> city holds by construction
        label[r] = (r % 2) ? "1" : "0";
    }
    Dataset ds = Dataset::fromColumns({
        numericColumn("n1", n1),
        numericColumn("n2", n2),
        textColumn("group", group),
        textColumn("city", city),
        textColumn("class", label),
    });
    ds.setLabel(4, Task::Classification);
    return ds;
}

InjectionPlan mixedPlan(uint64_t seed) {
    InjectionPlan plan;
    plan.gamma = 0.1;
    plan.mixMv = 0.25;
    plan.mixOt = 0.25;
    plan.mixTp = 0.25;
    plan.mixRv = 0.25;
    plan.fdRules = {{{"group"}, "city"}};
    plan.seed = seed;
    return plan;
}

}  // namespace

TEST_CASE("mask size follows the floor formula") {
    // 100 rows x 4 targetable columns, gamma 0.1 -> floor(40) = 40.
    const Dataset clean = injectionFixture(1);
    CHECK(targetableCells(clean) == 400);
    const InjectionResult result = inject(clean, mixedPlan(5));
    CHECK(result.mask.entries.size() == 40);
    CHECK(realizedRate(result.mask, clean) == doctest::Approx(0.1));
}

TEST_CASE("mv-only injection puts exactly the mask cells to missing") {
    const Dataset clean = injectionFixture(2);
    InjectionPlan plan;
    plan.gamma = 0.05;
    plan.mixMv = 1.0;
    plan.seed = 3;
    const InjectionResult result = inject(clean, plan);
    const DetectionSet missing = detectMissing(result.dirty);
    std::set<CellRef> maskCells;
    for (const auto& entry : result.mask.entries) {
        CHECK(entry.type == ErrorType::MV);
        maskCells.insert(entry.cell);
    }
    CHECK(missing.cells == maskCells);
}

TEST_CASE("restoring the originals reproduces the clean csv") {
    for (uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        const Dataset clean = injectionFixture(seed);
        const InjectionResult result = inject(clean, mixedPlan(seed * 31));
        CHECK(toCsvString(result.dirty) != toCsvString(clean));
        const Dataset restored = restore(result.dirty, result.mask);
        CHECK(toCsvString(restored) == toCsvString(clean));
    }
}

TEST_CASE("injection is deterministic per seed and varies across seeds") {
    const Dataset clean = injectionFixture(7);
    const InjectionResult a = inject(clean, mixedPlan(11));
    const InjectionResult b = inject(clean, mixedPlan(11));
    CHECK(toCsvString(a.dirty) == toCsvString(b.dirty));
    REQUIRE(a.mask.entries.size() == b.mask.entries.size());
    for (size_t i = 0; i < a.mask.entries.size(); ++i) {
        CHECK(a.mask.entries[i].cell == b.mask.entries[i].cell);
    }
    const InjectionResult c = inject(clean, mixedPlan(12));
    CHECK(toCsvString(a.dirty) != toCsvString(c.dirty));
    bool sameCells = a.mask.entries.size() == c.mask.entries.size();
    if (sameCells) {
        for (size_t i = 0; i < a.mask.entries.size(); ++i) {
            sameCells = sameCells && a.mask.entries[i].cell == c.mask.entries[i].cell;
        }
    }
    CHECK_FALSE(sameCells);
}

TEST_CASE("the label column is never corrupted") {
    const Dataset clean = injectionFixture(9);
    InjectionPlan plan = mixedPlan(17);
    plan.gamma = 0.4;
    const InjectionResult result = inject(clean, plan);
    for (const auto& entry : result.mask.entries) CHECK(entry.cell.col != 4);
    for (size_t r = 0; r < clean.rowCount(); ++r) {
        CHECK(result.dirty.textAt(r, 4) == clean.textAt(r, 4));
    }
}

TEST_CASE("outlier cells sit at the configured deviation from the clean mean") {
    const Dataset clean = injectionFixture(13);
    InjectionPlan plan;
    plan.gamma = 0.1;
    plan.mixOt = 1.0;
    plan.outlierScale = 6.0;
    plan.seed = 23;
    const InjectionResult result = inject(clean, plan);
    for (size_t c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (size_t r = 0; r < clean.rowCount(); ++r) mean += clean.numberAt(r, c);
        mean /= static_cast<double>(clean.rowCount());
        double var = 0.0;
        for (size_t r = 0; r < clean.rowCount(); ++r) {
            var += (clean.numberAt(r, c) - mean) * (clean.numberAt(r, c) - mean);
        }
        const double sigma = std::sqrt(var / static_cast<double>(clean.rowCount()));
        for (const auto& entry : result.mask.entries) {
            if (entry.cell.col != c) continue;
            const double v = result.dirty.numberAt(entry.cell.row, entry.cell.col);
            CHECK(std::abs(std::abs(v - mean) - 6.0 * sigma) < 1e-9);
        }
    }
}

TEST_CASE("typos are single-character out-of-vocabulary substitutions") {
    const Dataset clean = injectionFixture(19);
    InjectionPlan plan;
    plan.gamma = 0.05;
    plan.mixTp = 1.0;
    plan.seed = 29;
    const InjectionResult result = inject(clean, plan);
    CHECK(!result.mask.entries.empty());
    for (const auto& entry : result.mask.entries) {
        CHECK(entry.type == ErrorType::TP);
        const std::string& corrupted = result.dirty.textAt(entry.cell.row, entry.cell.col);
        const std::string& original = entry.original.text;
        CHECK(corrupted.size() == original.size());
        CHECK(boundedEditDistance(corrupted, original, 1) == 1);
        const Column& col = clean.columns()[entry.cell.col];
        for (const auto& value : col.text) CHECK(value != corrupted);
    }
}

TEST_CASE("rule violations break their lhs group") {
    const Dataset clean = injectionFixture(23);
    InjectionPlan plan;
    plan.gamma = 0.02;
    plan.mixRv = 1.0;
    plan.fdRules = {{{"group"}, "city"}};
    plan.seed = 31;
    const InjectionResult result = inject(clean, plan);
    CHECK(!result.mask.entries.empty());
    const DetectionSet violations = detectFdViolations(result.dirty, plan.fdRules);
    for (const auto& entry : result.mask.entries) {
        CHECK(entry.type == ErrorType::RV);
        CHECK(entry.cell.col == 3);  // rhs column
        CHECK(violations.contains(entry.cell));
        CHECK(result.dirty.textAt(entry.cell.row, entry.cell.col) != entry.original.text);
    }
}

TEST_CASE("plan validation errors") {
    const Dataset clean = injectionFixture(27);
    InjectionPlan bad;
    bad.gamma = 0.0;
    bad.mixMv = 1.0;
    CHECK_THROWS_AS(inject(clean, bad), ConfigError);

    InjectionPlan unnormalized;
    unnormalized.gamma = 0.1;
    unnormalized.mixMv = 0.5;
    unnormalized.mixOt = 0.2;
    CHECK_THROWS_AS(inject(clean, unnormalized), ConfigError);

    InjectionPlan rvWithoutRules;
    rvWithoutRules.gamma = 0.1;
    rvWithoutRules.mixRv = 1.0;
    CHECK_THROWS_AS(inject(clean, rvWithoutRules), ConfigError);

    InjectionPlan tiny;
    tiny.gamma = 0.0001;
    tiny.mixMv = 1.0;
    CHECK_THROWS_AS(inject(clean, tiny), ConfigError);
}

TEST_CASE("insufficient compatible cells name the shortfall") {
    Dataset textOnly = Dataset::fromColumns({
        textColumn("a", {"x", "y", "z", "w", "v", "u", "t", "s", "r", "q"}),
    });
    InjectionPlan plan;
    plan.gamma = 0.5;
    plan.mixOt = 1.0;  // no numeric cells exist
    plan.seed = 1;
    CHECK_THROWS_WITH_AS(inject(textOnly, plan), doctest::Contains("OT"), ConfigError);
}

TEST_CASE("injection requires a complete input") {
    Dataset withHole = injectionFixture(31);
    withHole.setMissing(5, 0);
    CHECK_THROWS_AS(inject(withHole, mixedPlan(1)), DataError);
}

TEST_CASE("mask csv round-trip") {
    testutil::TempDir dir;
    const Dataset clean = injectionFixture(37);
    const InjectionResult result = inject(clean, mixedPlan(41));
    writeMaskCsv(result.mask, dir.file("mask.csv"));
    const ErrorMask back = readMaskCsv(dir.file("mask.csv"), clean);
    REQUIRE(back.entries.size() == result.mask.entries.size());
    for (size_t i = 0; i < back.entries.size(); ++i) {
        CHECK(back.entries[i].cell == result.mask.entries[i].cell);
        CHECK(back.entries[i].type == result.mask.entries[i].type);
        CHECK(back.entries[i].original.missing == result.mask.entries[i].original.missing);
        CHECK(back.entries[i].original.num == result.mask.entries[i].original.num);
        CHECK(back.entries[i].original.text == result.mask.entries[i].original.text);
    }
    const Dataset restored = restore(result.dirty, back);
    CHECK(toCsvString(restored) == toCsvString(clean));
}

TEST_CASE("realized rate sits within the floor bound") {
    Rng rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset clean = injectionFixture(100 + trial);
        InjectionPlan plan;
        plan.gamma = 0.02 + 0.3 * rng.uniform01();
        plan.mixMv = 0.5;
        plan.mixOt = 0.5;
        plan.seed = rng.nextU64();
        const InjectionResult result = inject(clean, plan);
        const double rate = realizedRate(result.mask, clean);
        CHECK(rate <= plan.gamma);
        CHECK(plan.gamma - rate < 1.0 / static_cast<double>(targetableCells(clean)));
    }
    ErrorMask empty;
    CHECK(realizedRate(empty, injectionFixture(1)) == 0.0);
}
