#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "curator/Dataset.h"
#include "curator/Detectors.h"
#include "curator/Errors.h"

namespace curator {

// Number of distinct detectors flagging each cell.
struct CellCounter {
    std::map<CellRef, int> counts;
};

struct IterationRecord {
    int iteration = 0;
    int kAttr = 0;
    int kClass = 0;
    std::set<std::string> lMissUsed;   // missing-class list applied during voting
    std::set<std::string> lMissAfter;  // list after the verdict was handled
    size_t flagged = 0;                // |R_ensemble|
    size_t cleanRows = 0;              // |D_clean|
    std::string verdict;               // none | attribute_level | class_level
};

struct VoteState {
    int kInit = 2;
    int alphaU = 1;
    int kAttr = 2;
    int kClass = 2;
    std::set<std::string> lMiss;
    int iteration = 0;
    std::vector<IterationRecord> trace;
};

struct ExclusionStatus {
    enum class Verdict { None, AttributeLevel, ClassLevel };
    Verdict verdict = Verdict::None;
    std::set<std::string> missing;  // non-empty iff class level

    std::string name() const;
};

struct CleanFraction {
    Dataset data;
    std::vector<size_t> rows;  // indices into the source dataset
};

// Raised when the adaptive loop exceeds its iteration cap; carries the
// trace gathered so far.
class AdaptiveLoopError : public InternalError {
public:
    AdaptiveLoopError(const std::string& msg, VoteState state)
        : InternalError(msg), state_(std::move(state)) {}
    const VoteState& state() const { return state_; }

private:
    VoteState state_;
};

CellCounter tally(const std::vector<DetectionSet>& detections);

// Min-K decision per counted cell: the threshold is kClass for cells in
// rows whose label belongs to lMiss (classification only), kAttr
// otherwise; a cell is flagged when its count reaches the threshold.
DetectionSet vote(const CellCounter& counter, const Dataset& ds, const VoteState& state);

// Rows with no flagged cell and no missing cell in any column.
CleanFraction extractClean(const Dataset& ds, const DetectionSet& flagged);

ExclusionStatus checkExclusion(const Dataset& clean, const Dataset& dirty);

struct AdaptiveResult {
    DetectionSet flagged;   // final R_ensemble
    CleanFraction clean;    // final D_clean
    VoteState state;
};

// The adaptive loop: vote, extract, check exclusion, relax thresholds
// until no exclusion problem remains. kInit must be at least 2 and
// alphaU at least 1. iterationCap <= 0 selects the default 4*m.
// regressionBins > 0 runs the class-level check over quantile bins of
// a regression label (off by default; regression otherwise sees only
// the attribute-level check).
AdaptiveResult adaptiveDetect(const Dataset& ds, const std::vector<DetectionSet>& detections, int kInit,
                              int alphaU, int iterationCap = 0, int regressionBins = 0);

// Classic fixed-threshold Min-K: one voting pass, no adaptation.
AdaptiveResult minKDetect(const Dataset& ds, const std::vector<DetectionSet>& detections, int k);

// Proven worst-case iteration count for the adaptive loop.
int adaptiveIterationBound(size_t detectorCount, int kInit, int alphaU);

// One JSON object per iteration, newline separated.
std::string voteTraceJsonl(const VoteState& state);

}  // namespace curator
