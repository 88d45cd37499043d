#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "curator/Dataset.h"
#include "curator/Detectors.h"
#include "curator/Rng.h"

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path() / "curator_test_XXXXXX";
        std::string tmpl = base.string();
        if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return out;
}

inline curator::Column numericColumn(std::string name, std::vector<double> values) {
    curator::Column col;
    col.name = std::move(name);
    col.kind = curator::ColumnKind::Numeric;
    col.present.assign(values.size(), 1);
    col.numeric = std::move(values);
    return col;
}

inline curator::Column textColumn(std::string name, std::vector<std::string> values) {
    curator::Column col;
    col.name = std::move(name);
    col.kind = curator::ColumnKind::Categorical;
    col.present.assign(values.size(), 1);
    col.text = std::move(values);
    return col;
}

// The voting-example toy table: five rows, attributes A1/A2, binary
// labels, and seven synthetic detector outputs giving C12 three votes
// and C42 four.
struct ToyFixture {
    curator::Dataset table;
    std::vector<curator::DetectionSet> detections;
};

inline ToyFixture toyVotingFixture() {
    using namespace curator;
    ToyFixture fixture;
    fixture.table = Dataset::fromColumns({
        numericColumn("A1", {1, 2, 3, 4, 5}),
        numericColumn("A2", {10, 20, 30, 40, 50}),
        textColumn("class", {"1", "0", "0", "1", "0"}),
    });
    fixture.table.setLabel(2, Task::Classification);

    const CellRef c12{0, 1};
    const CellRef c42{3, 1};
    auto set = [](std::string id, std::vector<CellRef> cells) {
        DetectionSet out;
        out.detectorId = std::move(id);
        out.cells.insert(cells.begin(), cells.end());
        return out;
    };
    fixture.detections = {
        set("s1", {c12, c42}), set("s2", {c42}), set("s3", {c12}), set("s4", {c12}),
        set("s5", {c42}),      set("s6", {c42}), set("s7", {}),
    };
    return fixture;
}

// Two Gaussian blobs in `dim` numeric features with a binary label.
inline curator::Dataset makeBlobs(size_t rows, size_t dim, double separation, uint64_t seed) {
    using namespace curator;
    curator::Rng rng(seed);
    std::vector<Column> columns;
    for (size_t d = 0; d < dim; ++d) {
        Column col;
        col.name = "f" + std::to_string(d);
        col.kind = ColumnKind::Numeric;
        columns.push_back(std::move(col));
    }
    Column label;
    label.name = "class";
    label.kind = ColumnKind::Categorical;
    columns.push_back(std::move(label));

    Dataset ds(std::move(columns), 0);
    std::vector<CellValue> row(dim + 1);
    for (size_t r = 0; r < rows; ++r) {
        const bool positive = (r % 2) == 1;
        const double center = positive ? separation / 2.0 : -separation / 2.0;
        for (size_t d = 0; d < dim; ++d) row[d] = CellValue::ofNumber(rng.normal(center, 1.0));
        row[dim] = CellValue::ofText(positive ? "1" : "0");
        ds.appendRow(row);
    }
    ds.setLabel(static_cast<int>(dim), Task::Classification);
    return ds;
}

}  // namespace testutil
