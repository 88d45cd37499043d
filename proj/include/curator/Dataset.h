#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace curator {

enum class ColumnKind { Numeric, Categorical };
enum class Task { Classification, Regression, None };

struct CellRef {
    size_t row = 0;
    size_t col = 0;

    bool operator==(const CellRef& other) const { return row == other.row && col == other.col; }
    bool operator<(const CellRef& other) const {
        return row != other.row ? row < other.row : col < other.col;
    }
};

// A single cell as read back out of a Dataset. `num` is meaningful for
// numeric columns, `text` for categorical ones, neither when missing.
struct CellValue {
    bool missing = true;
    double num = 0.0;
    std::string text;

    static CellValue makeMissing() { return CellValue{}; }
    static CellValue ofNumber(double v) { return CellValue{false, v, {}}; }
    static CellValue ofText(std::string s) { return CellValue{false, 0.0, std::move(s)}; }
};

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Categorical;
    std::vector<double> numeric;     // per-row values when kind == Numeric
    std::vector<std::string> text;   // per-row values when kind == Categorical
    std::vector<uint8_t> present;    // 0 = missing
};

// Strict locale-independent numeric parse; the whole field must be
// consumed and the value finite.
std::optional<double> parseNumber(std::string_view field);

// Shortest decimal form that parses back to the same double. -0 is
// normalized to 0 so equal values always render identically.
std::string formatNumber(double v);

// Rectangular typed table. Immutable in normal pipeline use; the
// mutating setters exist for construction and for the error injector.
class Dataset {
public:
    Dataset() = default;
    // Empty columns sized to `rows` (all cells missing).
    Dataset(std::vector<Column> columns, size_t rows);
    // Adopts fully populated columns of equal length.
    static Dataset fromColumns(std::vector<Column> columns);

    size_t rowCount() const { return rowCount_; }
    size_t colCount() const { return columns_.size(); }
    const std::vector<Column>& columns() const { return columns_; }
    const Column& column(size_t c) const { return columns_[c]; }

    int labelCol() const { return labelCol_; }
    Task task() const { return task_; }
    void setLabel(int col, Task task);

    int findColumn(const std::string& name) const;

    bool isMissing(size_t r, size_t c) const { return columns_[c].present[r] == 0; }
    double numberAt(size_t r, size_t c) const { return columns_[c].numeric[r]; }
    const std::string& textAt(size_t r, size_t c) const { return columns_[c].text[r]; }

    CellValue cell(size_t r, size_t c) const;
    void setCell(size_t r, size_t c, const CellValue& v);
    void setMissing(size_t r, size_t c);

    // Canonical string form of a cell: numeric via formatNumber,
    // categorical verbatim, missing as the empty token.
    std::string cellText(size_t r, size_t c) const;

    bool rowComplete(size_t r) const;
    bool sameColumnStructure(const Dataset& other) const;

    void appendRow(const std::vector<CellValue>& cells);
    Dataset selectRows(const std::vector<size_t>& rows) const;
    Dataset emptyLike() const;

    // Label of a row as text (classification labels are categorical).
    // Empty optional when the label cell is missing or no label is set.
    std::optional<std::string> labelAt(size_t r) const;

    void checkRef(const CellRef& ref) const;

private:
    std::vector<Column> columns_;
    size_t rowCount_ = 0;
    int labelCol_ = -1;
    Task task_ = Task::None;
};

// Distinct non-missing label values. Requires a classification dataset.
std::set<std::string> labelClasses(const Dataset& ds);

struct SplitResult {
    Dataset train;
    Dataset test;
    std::vector<size_t> trainRows;
    std::vector<size_t> testRows;
    bool stratified = false;
};

// Deterministic disjoint train/test partition; stratified by label for
// classification when every class has at least two rows.
SplitResult splitTrainTest(const Dataset& ds, double testFraction, uint64_t seed);

}  // namespace curator
