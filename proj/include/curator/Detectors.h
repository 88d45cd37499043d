#pragma once

#include <set>
#include <string>
#include <vector>

#include "curator/Dataset.h"

namespace curator {

// Cells flagged erroneous by one detector (or by the ensemble).
struct DetectionSet {
    std::string detectorId;
    std::set<CellRef> cells;

    bool contains(const CellRef& ref) const { return cells.count(ref) > 0; }
};

// Functional dependency lhs -> rhs: rows agreeing on lhs must agree on rhs.
struct FdRule {
    std::vector<std::string> lhs;
    std::string rhs;

    std::string describe() const;
};

enum class OutlierMethod { Sd, Iqr };

// Exactly the cells whose value is missing.
DetectionSet detectMissing(const Dataset& ds);

// Numeric columns only; missing cells are never flagged.
// Sd: |x - mean| > param * population stddev (a zero stddev flags nothing).
// Iqr: x outside [Q1 - param*IQR, Q3 + param*IQR] with quantiles by
// linear interpolation at p*(n-1) over sorted non-missing values.
DetectionSet detectOutliers(const Dataset& ds, OutlierMethod method, double param);

// Rows compared as full tuples (missing equals missing); every cell of
// each repeat beyond a row's first occurrence is flagged.
DetectionSet detectDuplicates(const Dataset& ds);

// For every lhs-value group carrying two or more distinct non-missing
// rhs values, the rhs cell of each row in the group is flagged. Rows
// with a missing lhs cell stay out of their group.
DetectionSet detectFdViolations(const Dataset& ds, const std::vector<FdRule>& rules);

// Categorical cells whose value is rarer than minSupport and within
// Levenshtein distance maxEdit of a value at or above minSupport.
DetectionSet detectRareTypos(const Dataset& ds, double minSupport, int maxEdit);

enum class DetectorKind { Missing, OutlierSd, OutlierIqr, Duplicates, Fd, RareTypo, External };

struct DetectorSpec {
    DetectorKind kind = DetectorKind::Missing;
    std::string id;                 // defaults from the kind
    double param = 0.0;             // sd default 3.0, iqr default 1.5
    double minSupport = 0.01;
    int maxEdit = 1;
    std::vector<FdRule> rules;      // fd only
    std::string path;               // external only: detections CSV

    static DetectorSpec missing();
    static DetectorSpec outlierSd(double param = 3.0);
    static DetectorSpec outlierIqr(double param = 1.5);
    static DetectorSpec duplicates();
    static DetectorSpec fd(std::vector<FdRule> rules);
    static DetectorSpec rareTypo(double minSupport = 0.01, int maxEdit = 1);
    static DetectorSpec external(std::string id, std::string path);

    std::string effectiveId() const;
};

// One DetectionSet per registry entry, in registry order. A detector
// with nothing it can act on returns an empty set rather than failing.
std::vector<DetectionSet> runAll(const Dataset& ds, const std::vector<DetectorSpec>& registry);

// Detections CSV: header detector_id,row,col (external files may omit
// the detector_id column).
DetectionSet readDetectionsCsv(const std::string& path, const std::string& id, const Dataset& ds);
void writeDetectionsCsv(const DetectionSet& detections, const std::string& path);

// Levenshtein distance capped at `cap` (returns cap+1 when exceeded).
int boundedEditDistance(const std::string& a, const std::string& b, int cap);

}  // namespace curator
