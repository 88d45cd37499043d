#include "curator/Voting.h"

#include <algorithm>
#include <cmath>
#include <optional>

#include <json.hpp>

namespace curator {

std::string ExclusionStatus::name() const {
    switch (verdict) {
        case Verdict::None: return "none";
        case Verdict::AttributeLevel: return "attribute_level";
        case Verdict::ClassLevel: return "class_level";
    }
    return "unknown";
}

CellCounter tally(const std::vector<DetectionSet>& detections) {
    CellCounter counter;
    for (const auto& detection : detections) {
        for (const auto& ref : detection.cells) counter.counts[ref] += 1;
    }
    return counter;
}

namespace {

using RowKeys = std::vector<std::optional<std::string>>;

// Per-row class key: the label for classification, a quantile bin of
// the label for regression when binning is enabled, nothing otherwise.
RowKeys rowClassKeys(const Dataset& ds, int regressionBins) {
    RowKeys keys(ds.rowCount());
    if (ds.task() == Task::Classification) {
        for (size_t r = 0; r < ds.rowCount(); ++r) keys[r] = ds.labelAt(r);
        return keys;
    }
    if (ds.task() == Task::Regression && regressionBins > 0) {
        const size_t lc = static_cast<size_t>(ds.labelCol());
        std::vector<double> values;
        for (size_t r = 0; r < ds.rowCount(); ++r) {
            if (!ds.isMissing(r, lc)) values.push_back(ds.numberAt(r, lc));
        }
        if (values.empty()) return keys;
        std::sort(values.begin(), values.end());
        std::vector<double> edges;
        for (int b = 1; b < regressionBins; ++b) {
            const double pos = static_cast<double>(b) / regressionBins * static_cast<double>(values.size() - 1);
            const size_t lo = static_cast<size_t>(pos);
            const double frac = pos - static_cast<double>(lo);
            const double hi = lo + 1 < values.size() ? values[lo + 1] : values[lo];
            edges.push_back(values[lo] + frac * (hi - values[lo]));
        }
        for (size_t r = 0; r < ds.rowCount(); ++r) {
            if (ds.isMissing(r, lc)) continue;
            const double v = ds.numberAt(r, lc);
            int bin = 0;
            while (bin < static_cast<int>(edges.size()) && v > edges[static_cast<size_t>(bin)]) ++bin;
            keys[r] = "bin" + std::to_string(bin);
        }
    }
    return keys;
}

DetectionSet voteWithKeys(const CellCounter& counter, const RowKeys& keys, const VoteState& state) {
    DetectionSet out;
    out.detectorId = "ensemble";
    const bool relaxed = !state.lMiss.empty();
    for (const auto& [ref, count] : counter.counts) {
        int threshold = state.kAttr;
        if (relaxed && ref.row < keys.size()) {
            const auto& key = keys[ref.row];
            if (key.has_value() && state.lMiss.count(*key)) threshold = state.kClass;
        }
        if (count >= threshold) out.cells.insert(ref);
    }
    return out;
}

std::set<std::string> presentKeys(const RowKeys& keys, const std::vector<size_t>& rows) {
    std::set<std::string> out;
    for (size_t r : rows) {
        if (keys[r].has_value()) out.insert(*keys[r]);
    }
    return out;
}

}  // namespace

DetectionSet vote(const CellCounter& counter, const Dataset& ds, const VoteState& state) {
    return voteWithKeys(counter, rowClassKeys(ds, 0), state);
}

CleanFraction extractClean(const Dataset& ds, const DetectionSet& flagged) {
    std::vector<uint8_t> keep(ds.rowCount(), 1);
    for (const auto& ref : flagged.cells) {
        if (ref.row < keep.size()) keep[ref.row] = 0;
    }
    CleanFraction out;
    for (size_t r = 0; r < ds.rowCount(); ++r) {
        if (keep[r] && ds.rowComplete(r)) out.rows.push_back(r);
    }
    out.data = ds.selectRows(out.rows);
    return out;
}

ExclusionStatus checkExclusion(const Dataset& clean, const Dataset& dirty) {
    ExclusionStatus status;
    if (clean.rowCount() == 0) {
        status.verdict = ExclusionStatus::Verdict::AttributeLevel;
        return status;
    }
    if (dirty.task() == Task::Classification) {
        const auto dirtyClasses = labelClasses(dirty);
        const auto cleanClasses = labelClasses(clean);
        std::set<std::string> missing;
        std::set_difference(dirtyClasses.begin(), dirtyClasses.end(), cleanClasses.begin(), cleanClasses.end(),
                            std::inserter(missing, missing.begin()));
        if (!missing.empty()) {
            status.verdict = ExclusionStatus::Verdict::ClassLevel;
            status.missing = std::move(missing);
            return status;
        }
    }
    status.verdict = ExclusionStatus::Verdict::None;
    return status;
}

namespace {

AdaptiveResult finishResult(DetectionSet flagged, CleanFraction clean, VoteState state) {
    AdaptiveResult out;
    out.flagged = std::move(flagged);
    out.clean = std::move(clean);
    out.state = std::move(state);
    return out;
}

}  // namespace

AdaptiveResult adaptiveDetect(const Dataset& ds, const std::vector<DetectionSet>& detections, int kInit,
                              int alphaU, int iterationCap, int regressionBins) {
    if (kInit < 2) throw ConfigError("k_init must be at least 2");
    if (alphaU < 1) throw ConfigError("update rate alpha_u must be at least 1");
    if (detections.empty()) throw ConfigError("adaptive detection needs at least one detector output");

    const int m = static_cast<int>(detections.size());
    const int cap = iterationCap > 0 ? iterationCap : std::max(4 * m, adaptiveIterationBound(detections.size(), kInit, alphaU));

    const CellCounter counter = tally(detections);
    const RowKeys keys = rowClassKeys(ds, regressionBins);
    std::set<std::string> allKeys;
    for (const auto& key : keys) {
        if (key.has_value()) allKeys.insert(*key);
    }

    VoteState state;
    state.kInit = kInit;
    state.alphaU = alphaU;
    state.kAttr = kInit;
    state.kClass = kInit;

    while (true) {
        state.iteration += 1;
        IterationRecord record;
        record.iteration = state.iteration;
        record.kAttr = state.kAttr;
        record.kClass = state.kClass;
        record.lMissUsed = state.lMiss;

        DetectionSet flagged = voteWithKeys(counter, keys, state);
        CleanFraction clean = extractClean(ds, flagged);
        ExclusionStatus status;
        if (clean.rows.empty()) {
            status.verdict = ExclusionStatus::Verdict::AttributeLevel;
        } else {
            std::set<std::string> missing;
            const std::set<std::string> cleanKeys = presentKeys(keys, clean.rows);
            std::set_difference(allKeys.begin(), allKeys.end(), cleanKeys.begin(), cleanKeys.end(),
                                std::inserter(missing, missing.begin()));
            if (!missing.empty()) {
                status.verdict = ExclusionStatus::Verdict::ClassLevel;
                status.missing = std::move(missing);
            }
        }

        record.flagged = flagged.cells.size();
        record.cleanRows = clean.rows.size();
        record.verdict = status.name();

        switch (status.verdict) {
            case ExclusionStatus::Verdict::AttributeLevel:
                state.kAttr += alphaU;
                // Keeps the relaxed threshold relaxed: cells of missing
                // classes must never face a stricter bar than the rest.
                if (state.kClass < state.kAttr) state.kClass = state.kAttr;
                break;
            case ExclusionStatus::Verdict::ClassLevel:
                state.lMiss = status.missing;
                state.kClass += alphaU;
                if (state.kClass - state.kAttr >= 2 * alphaU) state.kAttr += alphaU;
                break;
            case ExclusionStatus::Verdict::None:
                record.lMissAfter = state.lMiss;
                state.trace.push_back(std::move(record));
                return finishResult(std::move(flagged), std::move(clean), std::move(state));
        }
        record.lMissAfter = state.lMiss;
        state.trace.push_back(std::move(record));

        if (state.iteration >= cap) {
            throw AdaptiveLoopError("adaptive voting exceeded its iteration cap of " + std::to_string(cap) +
                                        " without resolving data exclusion",
                                    state);
        }
    }
}

AdaptiveResult minKDetect(const Dataset& ds, const std::vector<DetectionSet>& detections, int k) {
    if (k < 1) throw ConfigError("min-k threshold must be at least 1");
    const CellCounter counter = tally(detections);

    VoteState state;
    state.kInit = k;
    state.alphaU = 0;
    state.kAttr = k;
    state.kClass = k;
    state.iteration = 1;

    DetectionSet flagged = vote(counter, ds, state);
    CleanFraction clean = extractClean(ds, flagged);
    const ExclusionStatus status = checkExclusion(clean.data, ds);

    IterationRecord record;
    record.iteration = 1;
    record.kAttr = k;
    record.kClass = k;
    record.flagged = flagged.cells.size();
    record.cleanRows = clean.rows.size();
    record.verdict = status.name();
    state.trace.push_back(std::move(record));

    return finishResult(std::move(flagged), std::move(clean), std::move(state));
}

int adaptiveIterationBound(size_t detectorCount, int kInit, int alphaU) {
    const double steps = std::ceil(static_cast<double>(static_cast<int>(detectorCount) + 1 - kInit) /
                                   static_cast<double>(alphaU));
    return 2 * static_cast<int>(std::max(0.0, steps)) + 2;
}

std::string voteTraceJsonl(const VoteState& state) {
    std::string out;
    for (const auto& record : state.trace) {
        nlohmann::ordered_json entry;
        entry["iteration"] = record.iteration;
        entry["k_attr"] = record.kAttr;
        entry["k_class"] = record.kClass;
        entry["l_miss_used"] = record.lMissUsed;
        entry["l_miss_after"] = record.lMissAfter;
        entry["flagged"] = record.flagged;
        entry["clean_rows"] = record.cleanRows;
        entry["verdict"] = record.verdict;
        out += entry.dump();
        out += '\n';
    }
    return out;
}

}  // namespace curator
