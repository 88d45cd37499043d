#include "curator/Csv.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "curator/Errors.h"

namespace curator {

namespace {

struct RawRecord {
    std::vector<std::string> fields;
    size_t line = 0;  // physical line where the record starts, 1-based
};

std::vector<RawRecord> parseRecords(const std::string& content) {
    std::vector<RawRecord> records;
    RawRecord current;
    current.line = 1;
    std::string field;
    bool inQuotes = false;
    bool fieldStarted = false;
    size_t line = 1;

    auto pushField = [&]() {
        current.fields.push_back(std::move(field));
        field.clear();
        fieldStarted = false;
    };
    auto pushRecord = [&]() {
        pushField();
        // A completely empty line is not a record.
        if (!(current.fields.size() == 1 && current.fields[0].empty())) {
            records.push_back(std::move(current));
        }
        current = RawRecord{};
        current.line = line;
    };

    for (size_t i = 0; i < content.size(); ++i) {
        const char ch = content[i];
        if (inQuotes) {
            if (ch == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    inQuotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (!fieldStarted && field.empty()) {
                    inQuotes = true;
                    fieldStarted = true;
                } else {
                    field.push_back(ch);  // stray quote inside an unquoted field
                }
                break;
            case ',':
                pushField();
                break;
            case '\r':
                break;
            case '\n':
                ++line;
                pushRecord();
                break;
            default:
                field.push_back(ch);
                fieldStarted = true;
                break;
        }
    }
    if (inQuotes) throw DataError("CSV parse error: unterminated quoted field");
    if (!field.empty() || fieldStarted || !current.fields.empty()) pushRecord();
    return records;
}

bool needsQuoting(const std::string& s) {
    return s.find_first_of(",\"\r\n") != std::string::npos;
}

void writeField(std::string& out, const std::string& s) {
    if (!needsQuoting(s)) {
        out += s;
        return;
    }
    out.push_back('"');
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
}

}  // namespace

Dataset parseCsv(const std::string& content, const CsvReadOptions& opts) {
    const std::vector<RawRecord> records = parseRecords(content);
    if (records.empty()) throw DataError("CSV parse error: no header row");

    const std::vector<std::string>& header = records[0].fields;
    const size_t nCols = header.size();
    {
        std::unordered_set<std::string> seen;
        for (const auto& name : header) {
            if (!seen.insert(name).second) throw DataError("CSV header contains duplicate column: " + name);
        }
    }

    const size_t nRows = records.size() - 1;
    const std::unordered_set<std::string> missingTokens(opts.missingTokens.begin(), opts.missingTokens.end());

    // First pass: missingness and numeric-parse status per column.
    std::vector<std::vector<const std::string*>> raw(nCols, std::vector<const std::string*>(nRows, nullptr));
    std::vector<uint8_t> allNumeric(nCols, 1);
    for (size_t r = 0; r < nRows; ++r) {
        const RawRecord& rec = records[r + 1];
        if (rec.fields.size() != nCols) {
            throw DataError("CSV parse error at line " + std::to_string(rec.line) + ": expected " +
                            std::to_string(nCols) + " fields, found " + std::to_string(rec.fields.size()));
        }
        for (size_t c = 0; c < nCols; ++c) {
            const std::string& value = rec.fields[c];
            if (missingTokens.count(value)) continue;
            raw[c][r] = &value;
            if (allNumeric[c] && !parseNumber(value)) allNumeric[c] = 0;
        }
    }

    std::vector<Column> columns(nCols);
    for (size_t c = 0; c < nCols; ++c) {
        columns[c].name = header[c];
        const auto hint = opts.schemaHint.find(header[c]);
        if (hint != opts.schemaHint.end()) {
            columns[c].kind = hint->second;
        } else {
            columns[c].kind = allNumeric[c] ? ColumnKind::Numeric : ColumnKind::Categorical;
        }
    }
    int labelIdx = -1;
    if (!opts.labelColumn.empty()) {
        for (size_t c = 0; c < nCols; ++c) {
            if (header[c] == opts.labelColumn) labelIdx = static_cast<int>(c);
        }
        if (labelIdx < 0) throw ConfigError("label column not found: " + opts.labelColumn);
    }
    Task task = Task::None;
    if (opts.task.has_value()) {
        task = *opts.task;
        if (task != Task::None && labelIdx < 0) throw ConfigError("task requires a label column");
    } else if (labelIdx >= 0) {
        task = columns[labelIdx].kind == ColumnKind::Numeric ? Task::Regression : Task::Classification;
    }
    if (task == Task::Classification && labelIdx >= 0) {
        columns[labelIdx].kind = ColumnKind::Categorical;
    }

    Dataset ds(std::move(columns), 0);
    std::vector<CellValue> cells(nCols);
    for (size_t r = 0; r < nRows; ++r) {
        for (size_t c = 0; c < nCols; ++c) {
            if (raw[c][r] == nullptr) {
                cells[c] = CellValue::makeMissing();
                continue;
            }
            if (ds.columns()[c].kind == ColumnKind::Numeric) {
                const auto parsed = parseNumber(*raw[c][r]);
                cells[c] = parsed ? CellValue::ofNumber(*parsed) : CellValue::makeMissing();
            } else {
                cells[c] = CellValue::ofText(*raw[c][r]);
            }
        }
        ds.appendRow(cells);
    }
    if (task != Task::None) ds.setLabel(labelIdx, task);
    return ds;
}

Dataset loadCsv(const std::string& path, const CsvReadOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open CSV file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parseCsv(buffer.str(), opts);
}

std::string csvField(const std::string& value) {
    std::string out;
    writeField(out, value);
    return out;
}

std::string toCsvString(const Dataset& ds) {
    std::string out;
    for (size_t c = 0; c < ds.colCount(); ++c) {
        if (c) out.push_back(',');
        writeField(out, ds.columns()[c].name);
    }
    out.push_back('\n');
    for (size_t r = 0; r < ds.rowCount(); ++r) {
        for (size_t c = 0; c < ds.colCount(); ++c) {
            if (c) out.push_back(',');
            writeField(out, ds.cellText(r, c));
        }
        out.push_back('\n');
    }
    return out;
}

void writeCsv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write CSV file: " + path);
    out << toCsvString(ds);
}

}  // namespace curator
