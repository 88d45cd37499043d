#include <doctest.h>

#include <set>

#include "TestUtils.h"
#include "curator/Dataset.h"
#include "curator/Errors.h"

using namespace curator;
using testutil::numericColumn;
using testutil::textColumn;

TEST_CASE("number parsing is strict and locale independent") {
    CHECK(parseNumber("1.5").value() == doctest::Approx(1.5));
    CHECK(parseNumber("-2e3").value() == doctest::Approx(-2000.0));
    CHECK(parseNumber("42").value() == 42.0);
    CHECK_FALSE(parseNumber("").has_value());
    CHECK_FALSE(parseNumber("1.5x").has_value());
    CHECK_FALSE(parseNumber(" 1").has_value());
    CHECK_FALSE(parseNumber("nan").has_value());
    CHECK_FALSE(parseNumber("inf").has_value());
}

TEST_CASE("number formatting round-trips and normalizes zero") {
    CHECK(formatNumber(1.5) == "1.5");
    CHECK(formatNumber(-0.0) == "0");
    CHECK(formatNumber(0.0) == "0");
    for (double v : {0.1, 1e-9, 123456.789, -3.25, 2.2250738585072014e-308}) {
        CHECK(parseNumber(formatNumber(v)).value() == v);
    }
}

TEST_CASE("classes returns distinct non-missing labels") {
    Dataset ds = Dataset::fromColumns({
        numericColumn("x", {1, 2, 3, 4, 5}),
        textColumn("y", {"0", "1", "1", "0", "1"}),
    });
    ds.setLabel(1, Task::Classification);
    CHECK(labelClasses(ds) == std::set<std::string>{"0", "1"});

    Dataset single = Dataset::fromColumns({textColumn("y", {"a", "a", "a"})});
    single.setLabel(0, Task::Classification);
    CHECK(labelClasses(single) == std::set<std::string>{"a"});
}

TEST_CASE("classes ignores missing labels") {
    // Oracle: manual set construction skipping the missing entry.
    Dataset ds = Dataset::fromColumns({textColumn("y", {"0", "1", "1"})});
    ds.setLabel(0, Task::Classification);
    ds.setMissing(2, 0);
    CHECK(labelClasses(ds) == std::set<std::string>{"0", "1"});
}

TEST_CASE("classes requires a classification dataset") {
    Dataset ds = Dataset::fromColumns({numericColumn("x", {1, 2})});
    CHECK_THROWS_AS(labelClasses(ds), DataError);
}

TEST_CASE("split is deterministic and respects the fraction") {
    Dataset ds = Dataset::fromColumns({numericColumn("x", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9})});
    const SplitResult a = splitTrainTest(ds, 0.2, 7);
    const SplitResult b = splitTrainTest(ds, 0.2, 7);
    CHECK(a.train.rowCount() == 8);
    CHECK(a.test.rowCount() == 2);
    CHECK(a.testRows == b.testRows);
    CHECK(a.trainRows == b.trainRows);

    const SplitResult half = splitTrainTest(Dataset::fromColumns({numericColumn("x", {1, 2, 3, 4})}), 0.5, 3);
    CHECK(half.train.rowCount() == 2);
    CHECK(half.test.rowCount() == 2);
}

TEST_CASE("split stratifies balanced classes") {
    // Oracle: exhaustive count of labels on each side.
    Dataset ds = Dataset::fromColumns({
        numericColumn("x", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}),
        textColumn("y", {"A", "A", "A", "A", "A", "B", "B", "B", "B", "B"}),
    });
    ds.setLabel(1, Task::Classification);
    for (uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        const SplitResult split = splitTrainTest(ds, 0.2, seed);
        CHECK(split.stratified);
        REQUIRE(split.test.rowCount() == 2);
        size_t countA = 0, countB = 0;
        for (size_t r = 0; r < split.test.rowCount(); ++r) {
            if (split.test.textAt(r, 1) == "A") ++countA;
            if (split.test.textAt(r, 1) == "B") ++countB;
        }
        CHECK(countA == 1);
        CHECK(countB == 1);
    }
}

TEST_CASE("split falls back to unstratified when a class has a single row") {
    Dataset ds = Dataset::fromColumns({
        numericColumn("x", {0, 1, 2, 3}),
        textColumn("y", {"A", "A", "A", "B"}),
    });
    ds.setLabel(1, Task::Classification);
    const SplitResult split = splitTrainTest(ds, 0.25, 5);
    CHECK_FALSE(split.stratified);
    CHECK(split.train.rowCount() + split.test.rowCount() == 4);
}

TEST_CASE("split partitions the dataset") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const size_t n = 2 + rng.uniformIndex(60);
        std::vector<double> values(n);
        for (auto& v : values) v = rng.uniform01();
        Dataset ds = Dataset::fromColumns({numericColumn("x", values)});
        const double fraction = 0.1 + 0.8 * rng.uniform01();
        const SplitResult split = splitTrainTest(ds, fraction, rng.nextU64());

        std::set<size_t> seen;
        for (size_t r : split.trainRows) seen.insert(r);
        for (size_t r : split.testRows) CHECK(seen.insert(r).second);
        CHECK(seen.size() == n);
        CHECK(split.train.rowCount() + split.test.rowCount() == n);
        CHECK(split.train.rowCount() >= 1);
        CHECK(split.test.rowCount() >= 1);
    }
}

TEST_CASE("split preconditions") {
    Dataset tiny = Dataset::fromColumns({numericColumn("x", {1})});
    CHECK_THROWS_AS(splitTrainTest(tiny, 0.5, 1), DataError);
    Dataset ok = Dataset::fromColumns({numericColumn("x", {1, 2})});
    CHECK_THROWS_AS(splitTrainTest(ok, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(splitTrainTest(ok, 1.0, 1), ConfigError);
}

TEST_CASE("row completeness and cell text") {
    Dataset ds = Dataset::fromColumns({
        numericColumn("x", {1.25, 2}),
        textColumn("y", {"a", "b"}),
    });
    CHECK(ds.rowComplete(0));
    ds.setMissing(1, 0);
    CHECK_FALSE(ds.rowComplete(1));
    CHECK(ds.cellText(0, 0) == "1.25");
    CHECK(ds.cellText(0, 1) == "a");
    CHECK(ds.cellText(1, 0) == "");
}
