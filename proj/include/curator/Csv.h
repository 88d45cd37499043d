#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curator/Dataset.h"

namespace curator {

struct CsvReadOptions {
    // Field values treated as missing after unquoting (exact match).
    std::vector<std::string> missingTokens = {"", "NA", "NaN", "?", "null"};
    // Explicit column kinds by name; inference covers the rest. Cells
    // that fail to parse under an explicit numeric hint become missing.
    std::map<std::string, ColumnKind> schemaHint;
    std::string labelColumn;         // empty = no label
    std::optional<Task> task;        // defaults from the label column kind
};

// RFC 4180 with a mandatory header row, UTF-8. Column kinds are
// inferred unless hinted: numeric iff every non-missing cell parses as
// a finite real.
Dataset loadCsv(const std::string& path, const CsvReadOptions& opts = {});
Dataset parseCsv(const std::string& content, const CsvReadOptions& opts = {});

void writeCsv(const Dataset& ds, const std::string& path);
std::string toCsvString(const Dataset& ds);

// Quotes and escapes a single field when needed.
std::string csvField(const std::string& value);

}  // namespace curator
