#include "curator/Dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <map>

#include "curator/Errors.h"
#include "curator/Rng.h"

namespace curator {

std::optional<double> parseNumber(std::string_view field) {
    if (field.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::string formatNumber(double v) {
    if (v == 0.0) return "0";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

Dataset::Dataset(std::vector<Column> columns, size_t rows) : columns_(std::move(columns)), rowCount_(rows) {
    for (auto& col : columns_) {
        if (col.kind == ColumnKind::Numeric) {
            col.numeric.resize(rows, 0.0);
        } else {
            col.text.resize(rows);
        }
        col.present.resize(rows, 0);
    }
}

Dataset Dataset::fromColumns(std::vector<Column> columns) {
    Dataset ds;
    size_t rows = columns.empty() ? 0 : columns.front().present.size();
    for (auto& col : columns) {
        if (col.present.size() != rows) throw DataError("fromColumns: columns disagree on row count");
        const size_t valueCount = col.kind == ColumnKind::Numeric ? col.numeric.size() : col.text.size();
        if (valueCount != rows) throw DataError("fromColumns: column " + col.name + " has inconsistent storage");
    }
    ds.columns_ = std::move(columns);
    ds.rowCount_ = rows;
    return ds;
}

void Dataset::setLabel(int col, Task task) {
    if (task != Task::None) {
        if (col < 0 || col >= static_cast<int>(columns_.size())) {
            throw ConfigError("label column index out of range");
        }
        if (task == Task::Classification && columns_[col].kind != ColumnKind::Categorical) {
            throw ConfigError("classification label column must be categorical: " + columns_[col].name);
        }
        if (task == Task::Regression && columns_[col].kind != ColumnKind::Numeric) {
            throw ConfigError("regression label column must be numeric: " + columns_[col].name);
        }
    }
    labelCol_ = (task == Task::None) ? -1 : col;
    task_ = task;
}

int Dataset::findColumn(const std::string& name) const {
    for (size_t c = 0; c < columns_.size(); ++c) {
        if (columns_[c].name == name) return static_cast<int>(c);
    }
    return -1;
}

CellValue Dataset::cell(size_t r, size_t c) const {
    const Column& col = columns_[c];
    if (!col.present[r]) return CellValue::makeMissing();
    if (col.kind == ColumnKind::Numeric) return CellValue::ofNumber(col.numeric[r]);
    return CellValue::ofText(col.text[r]);
}

void Dataset::setCell(size_t r, size_t c, const CellValue& v) {
    Column& col = columns_[c];
    if (v.missing) {
        col.present[r] = 0;
        if (col.kind == ColumnKind::Numeric) {
            col.numeric[r] = 0.0;
        } else {
            col.text[r].clear();
        }
        return;
    }
    col.present[r] = 1;
    if (col.kind == ColumnKind::Numeric) {
        col.numeric[r] = v.num;
    } else {
        col.text[r] = v.text;
    }
}

void Dataset::setMissing(size_t r, size_t c) { setCell(r, c, CellValue::makeMissing()); }

std::string Dataset::cellText(size_t r, size_t c) const {
    const Column& col = columns_[c];
    if (!col.present[r]) return "";
    if (col.kind == ColumnKind::Numeric) return formatNumber(col.numeric[r]);
    return col.text[r];
}

bool Dataset::rowComplete(size_t r) const {
    for (const auto& col : columns_) {
        if (!col.present[r]) return false;
    }
    return true;
}

bool Dataset::sameColumnStructure(const Dataset& other) const {
    if (columns_.size() != other.columns_.size()) return false;
    for (size_t c = 0; c < columns_.size(); ++c) {
        if (columns_[c].name != other.columns_[c].name) return false;
        if (columns_[c].kind != other.columns_[c].kind) return false;
    }
    return true;
}

void Dataset::appendRow(const std::vector<CellValue>& cells) {
    if (cells.size() != columns_.size()) {
        throw DataError("appendRow: expected " + std::to_string(columns_.size()) + " cells, got " +
                        std::to_string(cells.size()));
    }
    for (size_t c = 0; c < columns_.size(); ++c) {
        Column& col = columns_[c];
        if (col.kind == ColumnKind::Numeric) {
            col.numeric.push_back(cells[c].missing ? 0.0 : cells[c].num);
        } else {
            col.text.push_back(cells[c].missing ? std::string() : cells[c].text);
        }
        col.present.push_back(cells[c].missing ? 0 : 1);
    }
    ++rowCount_;
}

Dataset Dataset::selectRows(const std::vector<size_t>& rows) const {
    Dataset out = emptyLike();
    for (size_t r : rows) {
        for (size_t c = 0; c < columns_.size(); ++c) {
            const Column& src = columns_[c];
            Column& dst = out.columns_[c];
            if (src.kind == ColumnKind::Numeric) {
                dst.numeric.push_back(src.numeric[r]);
            } else {
                dst.text.push_back(src.text[r]);
            }
            dst.present.push_back(src.present[r]);
        }
        ++out.rowCount_;
    }
    return out;
}

Dataset Dataset::emptyLike() const {
    Dataset out;
    for (const auto& col : columns_) {
        Column empty;
        empty.name = col.name;
        empty.kind = col.kind;
        out.columns_.push_back(std::move(empty));
    }
    out.rowCount_ = 0;
    out.labelCol_ = labelCol_;
    out.task_ = task_;
    return out;
}

std::optional<std::string> Dataset::labelAt(size_t r) const {
    if (labelCol_ < 0) return std::nullopt;
    const size_t c = static_cast<size_t>(labelCol_);
    if (isMissing(r, c)) return std::nullopt;
    return cellText(r, c);
}

void Dataset::checkRef(const CellRef& ref) const {
    if (ref.row >= rowCount_ || ref.col >= columns_.size()) {
        throw DataError("cell reference (" + std::to_string(ref.row) + "," + std::to_string(ref.col) +
                        ") outside dataset bounds " + std::to_string(rowCount_) + "x" +
                        std::to_string(columns_.size()));
    }
}

std::set<std::string> labelClasses(const Dataset& ds) {
    if (ds.task() != Task::Classification) {
        throw DataError("classes() requires a classification dataset");
    }
    std::set<std::string> out;
    const size_t c = static_cast<size_t>(ds.labelCol());
    for (size_t r = 0; r < ds.rowCount(); ++r) {
        if (!ds.isMissing(r, c)) out.insert(ds.textAt(r, c));
    }
    return out;
}

namespace {

size_t targetTestCount(size_t n, double fraction) {
    const auto t = static_cast<size_t>(std::llround(fraction * static_cast<double>(n)));
    return std::clamp<size_t>(t, 1, n - 1);
}

}  // namespace

SplitResult splitTrainTest(const Dataset& ds, double testFraction, uint64_t seed) {
    if (ds.rowCount() < 2) throw DataError("split requires at least 2 rows");
    if (!(testFraction > 0.0 && testFraction < 1.0)) {
        throw ConfigError("test fraction must lie in (0,1)");
    }

    const size_t n = ds.rowCount();
    const size_t testTarget = targetTestCount(n, testFraction);
    Rng rng(seed);

    std::vector<size_t> testRows;
    bool stratified = false;

    if (ds.task() == Task::Classification) {
        // Group rows by label text; missing labels form their own group.
        std::map<std::string, std::vector<size_t>> groups;
        const size_t lc = static_cast<size_t>(ds.labelCol());
        for (size_t r = 0; r < n; ++r) {
            const std::string key = ds.isMissing(r, lc) ? std::string("\x01missing") : ds.textAt(r, lc);
            groups[key].push_back(r);
        }
        bool feasible = groups.size() >= 2 || (groups.size() == 1 && groups.begin()->second.size() >= 2);
        for (const auto& kv : groups) {
            if (kv.second.size() < 2) feasible = false;
        }
        if (feasible && groups.size() > 1) {
            // Largest-remainder quota per class, each class keeping at
            // least one row on both sides.
            struct Quota {
                const std::vector<size_t>* rows;
                size_t take;
                double remainder;
            };
            std::vector<Quota> quotas;
            size_t assigned = 0;
            for (const auto& [key, rows] : groups) {
                const double exact = testFraction * static_cast<double>(rows.size());
                size_t take = static_cast<size_t>(std::floor(exact));
                take = std::min(take, rows.size() - 1);
                quotas.push_back({&rows, take, exact - std::floor(exact)});
                assigned += take;
            }
            while (assigned < testTarget) {
                size_t best = quotas.size();
                for (size_t i = 0; i < quotas.size(); ++i) {
                    if (quotas[i].take >= quotas[i].rows->size() - 1) continue;
                    if (best == quotas.size() || quotas[i].remainder > quotas[best].remainder) best = i;
                }
                if (best == quotas.size()) break;
                quotas[best].take += 1;
                quotas[best].remainder = -1.0;
                ++assigned;
            }
            for (const auto& q : quotas) {
                std::vector<size_t> shuffled = *q.rows;
                rng.shuffle(shuffled);
                testRows.insert(testRows.end(), shuffled.begin(), shuffled.begin() + static_cast<long>(q.take));
            }
            stratified = true;
        } else if (!feasible) {
            std::cerr << "[curator] warning: class with a single row, falling back to unstratified split\n";
        }
    }

    if (!stratified) {
        std::vector<size_t> all(n);
        for (size_t r = 0; r < n; ++r) all[r] = r;
        rng.shuffle(all);
        testRows.assign(all.begin(), all.begin() + static_cast<long>(testTarget));
    }

    std::sort(testRows.begin(), testRows.end());
    std::vector<size_t> trainRows;
    trainRows.reserve(n - testRows.size());
    size_t next = 0;
    for (size_t r = 0; r < n; ++r) {
        if (next < testRows.size() && testRows[next] == r) {
            ++next;
        } else {
            trainRows.push_back(r);
        }
    }

    SplitResult out;
    out.train = ds.selectRows(trainRows);
    out.test = ds.selectRows(testRows);
    out.trainRows = std::move(trainRows);
    out.testRows = std::move(testRows);
    out.stratified = stratified;
    return out;
}

}  // namespace curator
