#include <doctest.h>

#include <cmath>

#include "TestUtils.h"
#include "curator/Encoding.h"
#include "curator/Errors.h"
#include "curator/Rng.h"

using namespace curator;
using testutil::numericColumn;
using testutil::textColumn;

TEST_CASE("numeric ranges and min-max scaling") {
    Dataset ds = Dataset::fromColumns({numericColumn("a", {2, 4, 6})});
    const EncodingSchema schema = buildEncoding(ds);
    CHECK(schema.encodedWidth == 1);
    CHECK(schema.blocks[0].min == 2.0);
    CHECK(schema.blocks[0].max == 6.0);
    const Matrix m = encodeAllRows(ds, schema);
    CHECK(m.at(0, 0) == doctest::Approx(0.0));
    CHECK(m.at(1, 0) == doctest::Approx(0.5));
    CHECK(m.at(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("categorical vocabulary is sorted and one-hot") {
    Dataset ds = Dataset::fromColumns({textColumn("c", {"red", "blue", "red"})});
    const EncodingSchema schema = buildEncoding(ds);
    CHECK(schema.encodedWidth == 2);
    CHECK(schema.blocks[0].vocabulary == std::vector<std::string>{"blue", "red"});
    const Matrix m = encodeAllRows(ds, schema);
    CHECK(m.at(0, 0) == 0.0);
    CHECK(m.at(0, 1) == 1.0);
    CHECK(m.at(1, 0) == 1.0);
    CHECK(m.at(1, 1) == 0.0);
}

TEST_CASE("encoded width sums numeric slots and one-hot blocks") {
    // Oracle: 3 numeric + binary categorical (2) + binary label (2) = 7.
    Dataset ds = Dataset::fromColumns({
        numericColumn("n1", {1, 2}),
        numericColumn("n2", {3, 4}),
        numericColumn("n3", {5, 6}),
        textColumn("c", {"a", "b"}),
        textColumn("y", {"0", "1"}),
    });
    ds.setLabel(4, Task::Classification);
    const EncodingSchema schema = buildEncoding(ds);
    CHECK(schema.encodedWidth == 7);
    CHECK(schema.labelBlock == 4);
    CHECK(schema.label().offset == 5);
    CHECK(schema.featureWidth() == 5);
}

TEST_CASE("out-of-range numerics clamp") {
    Dataset train = Dataset::fromColumns({numericColumn("a", {2, 6})});
    const EncodingSchema schema = buildEncoding(train);
    Dataset wider = Dataset::fromColumns({numericColumn("a", {10, -5})});
    const Matrix m = encodeAllRows(wider, schema);
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(1, 0) == 0.0);
}

TEST_CASE("decode argmax and tie-break") {
    Dataset ds = Dataset::fromColumns({textColumn("c", {"blue", "red"})});
    const EncodingSchema schema = buildEncoding(ds);
    CHECK(decodeRow({0.3, 0.7}, schema)[0].text == "red");
    CHECK(decodeRow({0.5, 0.5}, schema)[0].text == "blue");
    CHECK_THROWS_AS(decodeRow({0.5}, schema), DataError);
}

TEST_CASE("encode-decode is the identity on complete rows") {
    Rng rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const size_t rows = 3 + rng.uniformIndex(20);
        std::vector<double> n1(rows), n2(rows);
        std::vector<std::string> c1(rows);
        const char* categories[] = {"alpha", "beta", "gamma", "delta"};
        for (size_t r = 0; r < rows; ++r) {
            n1[r] = rng.uniform(-50, 50);
            n2[r] = rng.uniform(0, 1);
            c1[r] = categories[rng.uniformIndex(4)];
        }
        Dataset ds = Dataset::fromColumns({
            numericColumn("n1", n1),
            numericColumn("n2", n2),
            textColumn("c1", c1),
        });
        const EncodingSchema schema = buildEncoding(ds);
        const Matrix m = encodeAllRows(ds, schema);
        for (size_t r = 0; r < rows; ++r) {
            std::vector<double> v(m.rowPtr(r), m.rowPtr(r) + schema.encodedWidth);
            const auto cells = decodeRow(v, schema);
            CHECK(std::abs(cells[0].num - n1[r]) < 1e-9);
            CHECK(std::abs(cells[1].num - n2[r]) < 1e-9);
            CHECK(cells[2].text == c1[r]);
        }
    }
}

TEST_CASE("constant columns encode to zero and decode to the constant") {
    Dataset ds = Dataset::fromColumns({numericColumn("a", {3, 3, 3})});
    const EncodingSchema schema = buildEncoding(ds);
    const Matrix m = encodeAllRows(ds, schema);
    CHECK(m.at(0, 0) == 0.0);
    CHECK(decodeRow({0.9}, schema)[0].num == 3.0);
}

TEST_CASE("schema building is deterministic") {
    Dataset ds = Dataset::fromColumns({
        numericColumn("a", {1, 2}),
        textColumn("b", {"x", "y"}),
    });
    const EncodingSchema s1 = buildEncoding(ds);
    const EncodingSchema s2 = buildEncoding(ds);
    REQUIRE(s1.blocks.size() == s2.blocks.size());
    for (size_t i = 0; i < s1.blocks.size(); ++i) {
        CHECK(s1.blocks[i].min == s2.blocks[i].min);
        CHECK(s1.blocks[i].max == s2.blocks[i].max);
        CHECK(s1.blocks[i].vocabulary == s2.blocks[i].vocabulary);
        CHECK(s1.blocks[i].offset == s2.blocks[i].offset);
    }
}

TEST_CASE("encoding errors") {
    Dataset ds = Dataset::fromColumns({numericColumn("a", {1, 2})});
    ds.setMissing(0, 0);
    const EncodingSchema schema = buildEncoding(ds);
    CHECK_THROWS_AS(encodeRows(ds, schema, {0}), DataError);

    Dataset empty = Dataset::fromColumns({numericColumn("gone", {1, 2})});
    empty.setMissing(0, 0);
    empty.setMissing(1, 0);
    CHECK_THROWS_WITH_AS(buildEncoding(empty), doctest::Contains("gone"), DataError);
}
