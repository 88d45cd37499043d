#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curator/Dataset.h"
#include "curator/Detectors.h"

namespace curator {

enum class ErrorType { MV, OT, TP, RV };

std::string errorTypeName(ErrorType t);
ErrorType errorTypeFromName(const std::string& name);

struct MaskEntry {
    CellRef cell;
    ErrorType type = ErrorType::MV;
    CellValue original;
};

// Ground truth for injected errors: one entry per corrupted cell,
// ordered by cell, carrying the pre-injection value.
struct ErrorMask {
    std::vector<MaskEntry> entries;

    bool containsCell(const CellRef& ref) const;
};

struct InjectionPlan {
    double gamma = 0.1;              // fraction of targetable cells corrupted
    double mixMv = 0.0;              // type weights, non-negative, summing to 1
    double mixOt = 0.0;
    double mixTp = 0.0;
    double mixRv = 0.0;
    std::vector<FdRule> fdRules;     // required when mixRv > 0
    double outlierScale = 5.0;
    uint64_t seed = 0;

    void validate() const;
};

struct InjectionResult {
    Dataset dirty;
    ErrorMask mask;
};

// Cells outside the label column.
size_t targetableCells(const Dataset& ds);

// Corrupts floor(gamma * targetable) distinct non-label cells of a
// complete dataset, partitioned across the requested error types.
// MV clears the cell; OT shifts a numeric cell to
// mean +/- outlierScale * stddev (clean-data statistics); TP applies a
// one-character substitution yielding an out-of-vocabulary string; RV
// overwrites an FD rhs cell with a different in-column value so its
// lhs group disagrees.
InjectionResult inject(const Dataset& clean, const InjectionPlan& plan);

double realizedRate(const ErrorMask& mask, const Dataset& ds);

// Writes the originals back; restore(inject(clean).dirty) == clean.
Dataset restore(const Dataset& dirty, const ErrorMask& mask);

// Mask CSV: row,col,error_type,original_value.
void writeMaskCsv(const ErrorMask& mask, const std::string& path);
ErrorMask readMaskCsv(const std::string& path, const Dataset& like);

}  // namespace curator
