#include "curator/Detectors.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "curator/Csv.h"
#include "curator/Errors.h"

namespace curator {

std::string FdRule::describe() const {
    std::string out;
    for (size_t i = 0; i < lhs.size(); ++i) {
        if (i) out += ",";
        out += lhs[i];
    }
    out += " -> " + rhs;
    return out;
}

DetectionSet detectMissing(const Dataset& ds) {
    DetectionSet out;
    out.detectorId = "mv";
    for (size_t c = 0; c < ds.colCount(); ++c) {
        const Column& col = ds.columns()[c];
        for (size_t r = 0; r < ds.rowCount(); ++r) {
            if (!col.present[r]) out.cells.insert({r, c});
        }
    }
    return out;
}

namespace {

double interpolatedQuantile(const std::vector<double>& sorted, double p) {
    const size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = p * static_cast<double>(n - 1);
    const size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

DetectionSet detectOutliers(const Dataset& ds, OutlierMethod method, double param) {
    if (!(param > 0.0)) throw ConfigError("outlier detector parameter must be positive");
    DetectionSet out;
    out.detectorId = method == OutlierMethod::Sd ? "sd" : "iqr";
    for (size_t c = 0; c < ds.colCount(); ++c) {
        const Column& col = ds.columns()[c];
        if (col.kind != ColumnKind::Numeric) continue;
        std::vector<double> values;
        values.reserve(ds.rowCount());
        for (size_t r = 0; r < ds.rowCount(); ++r) {
            if (col.present[r]) values.push_back(col.numeric[r]);
        }
        if (values.empty()) continue;

        double lowFence = 0.0, highFence = 0.0;
        if (method == OutlierMethod::Sd) {
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= static_cast<double>(values.size());
            double var = 0.0;
            for (double v : values) var += (v - mean) * (v - mean);
            var /= static_cast<double>(values.size());
            const double sigma = std::sqrt(var);
            if (sigma <= 0.0) continue;
            lowFence = mean - param * sigma;
            highFence = mean + param * sigma;
        } else {
            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            const double q1 = interpolatedQuantile(sorted, 0.25);
            const double q3 = interpolatedQuantile(sorted, 0.75);
            const double iqr = q3 - q1;
            lowFence = q1 - param * iqr;
            highFence = q3 + param * iqr;
        }
        for (size_t r = 0; r < ds.rowCount(); ++r) {
            if (!col.present[r]) continue;
            const double v = col.numeric[r];
            if (v < lowFence || v > highFence) out.cells.insert({r, c});
        }
    }
    return out;
}

DetectionSet detectDuplicates(const Dataset& ds) {
    DetectionSet out;
    out.detectorId = "dup";
    std::unordered_map<std::string, size_t> firstSeen;
    std::string key;
    for (size_t r = 0; r < ds.rowCount(); ++r) {
        key.clear();
        for (size_t c = 0; c < ds.colCount(); ++c) {
            if (ds.isMissing(r, c)) {
                key += '\x02';
            } else {
                key += ds.cellText(r, c);
            }
            key += '\x1f';
        }
        const auto [it, inserted] = firstSeen.emplace(key, r);
        if (!inserted) {
            for (size_t c = 0; c < ds.colCount(); ++c) out.cells.insert({r, c});
        }
    }
    return out;
}

DetectionSet detectFdViolations(const Dataset& ds, const std::vector<FdRule>& rules) {
    DetectionSet out;
    out.detectorId = "fd";
    for (const auto& rule : rules) {
        if (rule.lhs.empty()) throw ConfigError("invalid FD rule (empty lhs): " + rule.describe());
        std::vector<size_t> lhsCols;
        for (const auto& name : rule.lhs) {
            const int idx = ds.findColumn(name);
            if (idx < 0) throw ConfigError("invalid FD rule (unknown column " + name + "): " + rule.describe());
            lhsCols.push_back(static_cast<size_t>(idx));
            if (name == rule.rhs) throw ConfigError("invalid FD rule (rhs inside lhs): " + rule.describe());
        }
        const int rhsIdx = ds.findColumn(rule.rhs);
        if (rhsIdx < 0) throw ConfigError("invalid FD rule (unknown column " + rule.rhs + "): " + rule.describe());
        const size_t rhsCol = static_cast<size_t>(rhsIdx);

        struct Group {
            std::vector<size_t> rows;
            std::set<std::string> rhsValues;
        };
        std::unordered_map<std::string, Group> groups;
        std::string key;
        for (size_t r = 0; r < ds.rowCount(); ++r) {
            bool lhsComplete = true;
            key.clear();
            for (size_t c : lhsCols) {
                if (ds.isMissing(r, c)) {
                    lhsComplete = false;
                    break;
                }
                key += ds.cellText(r, c);
                key += '\x1f';
            }
            if (!lhsComplete) continue;
            Group& group = groups[key];
            group.rows.push_back(r);
            if (!ds.isMissing(r, rhsCol)) group.rhsValues.insert(ds.cellText(r, rhsCol));
        }
        for (const auto& [groupKey, group] : groups) {
            if (group.rhsValues.size() < 2) continue;
            for (size_t r : group.rows) out.cells.insert({r, rhsCol});
        }
    }
    return out;
}

int boundedEditDistance(const std::string& a, const std::string& b, int cap) {
    const int la = static_cast<int>(a.size());
    const int lb = static_cast<int>(b.size());
    if (std::abs(la - lb) > cap) return cap + 1;
    std::vector<int> prev(static_cast<size_t>(lb) + 1), cur(static_cast<size_t>(lb) + 1);
    for (int j = 0; j <= lb; ++j) prev[static_cast<size_t>(j)] = j;
    for (int i = 1; i <= la; ++i) {
        cur[0] = i;
        int rowMin = cur[0];
        for (int j = 1; j <= lb; ++j) {
            const int sub = prev[static_cast<size_t>(j - 1)] + (a[static_cast<size_t>(i - 1)] == b[static_cast<size_t>(j - 1)] ? 0 : 1);
            cur[static_cast<size_t>(j)] = std::min({prev[static_cast<size_t>(j)] + 1, cur[static_cast<size_t>(j - 1)] + 1, sub});
            rowMin = std::min(rowMin, cur[static_cast<size_t>(j)]);
        }
        if (rowMin > cap) return cap + 1;
        std::swap(prev, cur);
    }
    return std::min(prev[static_cast<size_t>(lb)], cap + 1);
}

DetectionSet detectRareTypos(const Dataset& ds, double minSupport, int maxEdit) {
    if (!(minSupport > 0.0 && minSupport < 1.0)) throw ConfigError("typo detector min_support must lie in (0,1)");
    if (maxEdit < 1) throw ConfigError("typo detector max_edit must be >= 1");
    DetectionSet out;
    out.detectorId = "typo";
    for (size_t c = 0; c < ds.colCount(); ++c) {
        const Column& col = ds.columns()[c];
        if (col.kind != ColumnKind::Categorical) continue;
        std::unordered_map<std::string, size_t> counts;
        size_t total = 0;
        for (size_t r = 0; r < ds.rowCount(); ++r) {
            if (!col.present[r]) continue;
            counts[col.text[r]]++;
            ++total;
        }
        if (total == 0) continue;
        std::vector<const std::string*> frequent;
        for (const auto& [value, count] : counts) {
            if (static_cast<double>(count) / static_cast<double>(total) >= minSupport) {
                frequent.push_back(&value);
            }
        }
        if (frequent.empty()) continue;
        std::unordered_map<std::string, bool> isTypo;
        for (const auto& [value, count] : counts) {
            if (static_cast<double>(count) / static_cast<double>(total) >= minSupport) continue;
            bool near = false;
            for (const std::string* freq : frequent) {
                if (boundedEditDistance(value, *freq, maxEdit) <= maxEdit) {
                    near = true;
                    break;
                }
            }
            isTypo[value] = near;
        }
        if (isTypo.empty()) continue;
        for (size_t r = 0; r < ds.rowCount(); ++r) {
            if (!col.present[r]) continue;
            const auto it = isTypo.find(col.text[r]);
            if (it != isTypo.end() && it->second) out.cells.insert({r, c});
        }
    }
    return out;
}

DetectorSpec DetectorSpec::missing() { return DetectorSpec{DetectorKind::Missing, "", 0, 0.01, 1, {}, ""}; }
DetectorSpec DetectorSpec::outlierSd(double param) { return DetectorSpec{DetectorKind::OutlierSd, "", param, 0.01, 1, {}, ""}; }
DetectorSpec DetectorSpec::outlierIqr(double param) { return DetectorSpec{DetectorKind::OutlierIqr, "", param, 0.01, 1, {}, ""}; }
DetectorSpec DetectorSpec::duplicates() { return DetectorSpec{DetectorKind::Duplicates, "", 0, 0.01, 1, {}, ""}; }
DetectorSpec DetectorSpec::fd(std::vector<FdRule> rules) {
    return DetectorSpec{DetectorKind::Fd, "", 0, 0.01, 1, std::move(rules), ""};
}
DetectorSpec DetectorSpec::rareTypo(double minSupport, int maxEdit) {
    return DetectorSpec{DetectorKind::RareTypo, "", 0, minSupport, maxEdit, {}, ""};
}
DetectorSpec DetectorSpec::external(std::string id, std::string path) {
    return DetectorSpec{DetectorKind::External, std::move(id), 0, 0.01, 1, {}, std::move(path)};
}

std::string DetectorSpec::effectiveId() const {
    if (!id.empty()) return id;
    switch (kind) {
        case DetectorKind::Missing: return "mv";
        case DetectorKind::OutlierSd: return "sd";
        case DetectorKind::OutlierIqr: return "iqr";
        case DetectorKind::Duplicates: return "dup";
        case DetectorKind::Fd: return "fd";
        case DetectorKind::RareTypo: return "typo";
        case DetectorKind::External: return "external";
    }
    return "detector";
}

std::vector<DetectionSet> runAll(const Dataset& ds, const std::vector<DetectorSpec>& registry) {
    if (registry.empty()) throw ConfigError("detector registry must not be empty");
    std::vector<DetectionSet> out;
    out.reserve(registry.size());
    for (const auto& spec : registry) {
        DetectionSet detections;
        switch (spec.kind) {
            case DetectorKind::Missing:
                detections = detectMissing(ds);
                break;
            case DetectorKind::OutlierSd:
                detections = detectOutliers(ds, OutlierMethod::Sd, spec.param > 0 ? spec.param : 3.0);
                break;
            case DetectorKind::OutlierIqr:
                detections = detectOutliers(ds, OutlierMethod::Iqr, spec.param > 0 ? spec.param : 1.5);
                break;
            case DetectorKind::Duplicates:
                detections = detectDuplicates(ds);
                break;
            case DetectorKind::Fd:
                detections = detectFdViolations(ds, spec.rules);
                break;
            case DetectorKind::RareTypo:
                detections = detectRareTypos(ds, spec.minSupport, spec.maxEdit);
                break;
            case DetectorKind::External:
                detections = readDetectionsCsv(spec.path, spec.effectiveId(), ds);
                break;
        }
        detections.detectorId = spec.effectiveId();
        out.push_back(std::move(detections));
    }
    return out;
}

DetectionSet readDetectionsCsv(const std::string& path, const std::string& id, const Dataset& ds) {
    CsvReadOptions opts;
    opts.missingTokens = {""};
    const Dataset table = loadCsv(path, opts);
    const int rowCol = table.findColumn("row");
    const int colCol = table.findColumn("col");
    if (rowCol < 0 || colCol < 0) {
        throw ConfigError("detections file needs 'row' and 'col' columns: " + path);
    }
    DetectionSet out;
    out.detectorId = id;
    for (size_t r = 0; r < table.rowCount(); ++r) {
        if (table.isMissing(r, static_cast<size_t>(rowCol)) || table.isMissing(r, static_cast<size_t>(colCol))) {
            throw DataError("detections file has a blank index at data row " + std::to_string(r + 1) + ": " + path);
        }
        CellRef ref{static_cast<size_t>(table.numberAt(r, static_cast<size_t>(rowCol))),
                    static_cast<size_t>(table.numberAt(r, static_cast<size_t>(colCol)))};
        ds.checkRef(ref);
        out.cells.insert(ref);
    }
    return out;
}

void writeDetectionsCsv(const DetectionSet& detections, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write detections file: " + path);
    out << "detector_id,row,col\n";
    for (const auto& ref : detections.cells) {
        out << detections.detectorId << ',' << ref.row << ',' << ref.col << '\n';
    }
}

}  // namespace curator
