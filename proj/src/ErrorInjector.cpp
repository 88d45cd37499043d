#include "curator/ErrorInjector.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "curator/Csv.h"
#include "curator/Errors.h"
#include "curator/Rng.h"

namespace curator {

std::string errorTypeName(ErrorType t) {
    switch (t) {
        case ErrorType::MV: return "MV";
        case ErrorType::OT: return "OT";
        case ErrorType::TP: return "TP";
        case ErrorType::RV: return "RV";
    }
    return "MV";
}

ErrorType errorTypeFromName(const std::string& name) {
    if (name == "MV") return ErrorType::MV;
    if (name == "OT") return ErrorType::OT;
    if (name == "TP") return ErrorType::TP;
    if (name == "RV") return ErrorType::RV;
    throw DataError("unknown error type: " + name);
}

bool ErrorMask::containsCell(const CellRef& ref) const {
    const auto it = std::lower_bound(entries.begin(), entries.end(), ref,
                                     [](const MaskEntry& e, const CellRef& r) { return e.cell < r; });
    return it != entries.end() && it->cell == ref;
}

void InjectionPlan::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("error rate gamma must lie in (0,1)");
    const double weights[] = {mixMv, mixOt, mixTp, mixRv};
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ConfigError("injection type weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("injection type weights must sum to 1");
    if (mixRv > 0.0 && fdRules.empty()) throw ConfigError("RV injection requires FD rules");
    if (!(outlierScale > 0.0)) throw ConfigError("outlier scale must be positive");
}

size_t targetableCells(const Dataset& ds) {
    const size_t cols = ds.colCount() - (ds.labelCol() >= 0 ? 1 : 0);
    return ds.rowCount() * cols;
}

namespace {

constexpr char kTypoAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";

struct ColumnProfile {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> distinctNumeric;
    std::vector<std::string> distinctText;
    std::unordered_set<std::string> vocab;
};

}  // namespace

InjectionResult inject(const Dataset& clean, const InjectionPlan& plan) {
    plan.validate();
    for (size_t r = 0; r < clean.rowCount(); ++r) {
        if (!clean.rowComplete(r)) {
            throw DataError("inject requires a complete dataset; row " + std::to_string(r) + " has missing cells");
        }
    }

    const size_t targetable = targetableCells(clean);
    const size_t total = static_cast<size_t>(std::floor(plan.gamma * static_cast<double>(targetable)));
    if (total < 1) throw ConfigError("error rate too small: gamma * targetable cells is below 1");

    const int labelCol = clean.labelCol();

    // Largest-remainder quotas over the fixed type order MV, OT, TP, RV.
    const double weights[] = {plan.mixMv, plan.mixOt, plan.mixTp, plan.mixRv};
    size_t quotas[4];
    double remainders[4];
    size_t assigned = 0;
    for (int t = 0; t < 4; ++t) {
        const double exact = weights[t] * static_cast<double>(total);
        quotas[t] = static_cast<size_t>(std::floor(exact));
        remainders[t] = exact - std::floor(exact);
        assigned += quotas[t];
    }
    while (assigned < total) {
        int best = -1;
        for (int t = 0; t < 4; ++t) {
            if (weights[t] <= 0.0) continue;
            if (best < 0 || remainders[t] > remainders[best]) best = t;
        }
        quotas[best] += 1;
        remainders[best] = -1.0;
        ++assigned;
    }

    // Column profiles from the clean data; OT shifts use these, not the
    // post-injection statistics.
    std::vector<ColumnProfile> profile(clean.colCount());
    for (size_t c = 0; c < clean.colCount(); ++c) {
        const Column& col = clean.columns()[c];
        if (col.kind == ColumnKind::Numeric) {
            double mean = 0.0;
            for (double v : col.numeric) mean += v;
            mean /= static_cast<double>(clean.rowCount());
            double var = 0.0;
            for (double v : col.numeric) var += (v - mean) * (v - mean);
            var /= static_cast<double>(clean.rowCount());
            profile[c].mean = mean;
            profile[c].stddev = std::sqrt(var);
            std::set<double> distinct(col.numeric.begin(), col.numeric.end());
            profile[c].distinctNumeric.assign(distinct.begin(), distinct.end());
        } else {
            std::set<std::string> distinct(col.text.begin(), col.text.end());
            profile[c].distinctText.assign(distinct.begin(), distinct.end());
            profile[c].vocab.insert(distinct.begin(), distinct.end());
        }
    }

    // RV eligibility: rhs cell of some rule whose lhs group has >= 2
    // rows, in a column with a second value to swap in.
    std::unordered_set<uint64_t> rvEligible;
    for (const FdRule& rule : plan.fdRules) {
        std::vector<size_t> lhsCols;
        for (const auto& name : rule.lhs) {
            const int idx = clean.findColumn(name);
            if (idx < 0) throw ConfigError("injection FD rule references unknown column: " + rule.describe());
            lhsCols.push_back(static_cast<size_t>(idx));
        }
        const int rhsIdx = clean.findColumn(rule.rhs);
        if (rhsIdx < 0) throw ConfigError("injection FD rule references unknown column: " + rule.describe());
        const size_t rhsCol = static_cast<size_t>(rhsIdx);
        if (static_cast<int>(rhsCol) == labelCol) continue;
        const bool replaceable = clean.columns()[rhsCol].kind == ColumnKind::Numeric
                                     ? profile[rhsCol].distinctNumeric.size() >= 2
                                     : profile[rhsCol].distinctText.size() >= 2;
        if (!replaceable) continue;

        std::unordered_map<std::string, std::vector<size_t>> groups;
        std::string key;
        for (size_t r = 0; r < clean.rowCount(); ++r) {
            key.clear();
            for (size_t c : lhsCols) {
                key += clean.cellText(r, c);
                key += '\x1f';
            }
            groups[key].push_back(r);
        }
        for (const auto& [groupKey, rows] : groups) {
            if (rows.size() < 2) continue;
            for (size_t r : rows) rvEligible.insert(r * clean.colCount() + rhsCol);
        }
    }

    std::vector<CellRef> poolMv, poolOt, poolTp, poolRv;
    for (size_t r = 0; r < clean.rowCount(); ++r) {
        for (size_t c = 0; c < clean.colCount(); ++c) {
            if (static_cast<int>(c) == labelCol) continue;
            const CellRef ref{r, c};
            poolMv.push_back(ref);
            const Column& col = clean.columns()[c];
            if (col.kind == ColumnKind::Numeric && profile[c].stddev > 0.0) poolOt.push_back(ref);
            if (col.kind == ColumnKind::Categorical) poolTp.push_back(ref);
            if (rvEligible.count(r * clean.colCount() + c)) poolRv.push_back(ref);
        }
    }
    if (quotas[3] > 0 && poolRv.empty()) {
        throw ConfigError("RV injection requested but no FD rule yields an eligible cell");
    }

    Rng rng(plan.seed);
    std::set<CellRef> taken;
    std::vector<std::pair<CellRef, ErrorType>> picks;
    picks.reserve(total);

    auto drawQuota = [&](const std::vector<CellRef>& pool, size_t quota, ErrorType type, const char* name) {
        if (quota == 0) return;
        std::vector<CellRef> candidates;
        candidates.reserve(pool.size());
        for (const auto& ref : pool) {
            if (!taken.count(ref)) candidates.push_back(ref);
        }
        if (candidates.size() < quota) {
            throw ConfigError(std::string("injection plan infeasible: need ") + std::to_string(quota) + " " + name +
                              " cells but only " + std::to_string(candidates.size()) + " compatible cells remain");
        }
        for (size_t i = 0; i < quota; ++i) {
            const size_t j = i + rng.uniformIndex(candidates.size() - i);
            std::swap(candidates[i], candidates[j]);
            taken.insert(candidates[i]);
            picks.emplace_back(candidates[i], type);
        }
    };

    drawQuota(poolMv, quotas[0], ErrorType::MV, "MV");
    drawQuota(poolOt, quotas[1], ErrorType::OT, "OT");
    drawQuota(poolTp, quotas[2], ErrorType::TP, "TP");
    drawQuota(poolRv, quotas[3], ErrorType::RV, "RV");

    std::sort(picks.begin(), picks.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    InjectionResult result;
    result.dirty = clean;

    for (const auto& [ref, type] : picks) {
        MaskEntry entry;
        entry.cell = ref;
        entry.type = type;
        entry.original = clean.cell(ref.row, ref.col);
        const ColumnProfile& prof = profile[ref.col];

        switch (type) {
            case ErrorType::MV:
                result.dirty.setMissing(ref.row, ref.col);
                break;
            case ErrorType::OT: {
                const double value = prof.mean + plan.outlierScale * prof.stddev * rng.sign();
                result.dirty.setCell(ref.row, ref.col, CellValue::ofNumber(value));
                break;
            }
            case ErrorType::TP: {
                const std::string& originalText = clean.textAt(ref.row, ref.col);
                std::string candidate;
                bool found = false;
                for (int attempt = 0; attempt < 128 && !found; ++attempt) {
                    candidate = originalText;
                    const size_t pos = rng.uniformIndex(candidate.size());
                    const char replacement = kTypoAlphabet[rng.uniformIndex(sizeof(kTypoAlphabet) - 1)];
                    if (replacement == candidate[pos]) continue;
                    candidate[pos] = replacement;
                    if (prof.vocab.count(candidate)) continue;
                    found = true;
                }
                if (!found) {
                    throw ConfigError("typo injection could not build an out-of-vocabulary value for column " +
                                      clean.columns()[ref.col].name);
                }
                result.dirty.setCell(ref.row, ref.col, CellValue::ofText(candidate));
                break;
            }
            case ErrorType::RV: {
                if (clean.columns()[ref.col].kind == ColumnKind::Categorical) {
                    const std::string& originalText = clean.textAt(ref.row, ref.col);
                    std::string replacement;
                    do {
                        replacement = prof.distinctText[rng.uniformIndex(prof.distinctText.size())];
                    } while (replacement == originalText);
                    result.dirty.setCell(ref.row, ref.col, CellValue::ofText(replacement));
                } else {
                    const double original = clean.numberAt(ref.row, ref.col);
                    double replacement = original;
                    do {
                        replacement = prof.distinctNumeric[rng.uniformIndex(prof.distinctNumeric.size())];
                    } while (replacement == original);
                    result.dirty.setCell(ref.row, ref.col, CellValue::ofNumber(replacement));
                }
                break;
            }
        }
        result.mask.entries.push_back(std::move(entry));
    }
    return result;
}

double realizedRate(const ErrorMask& mask, const Dataset& ds) {
    const size_t targetable = targetableCells(ds);
    if (targetable == 0) return 0.0;
    return static_cast<double>(mask.entries.size()) / static_cast<double>(targetable);
}

Dataset restore(const Dataset& dirty, const ErrorMask& mask) {
    Dataset out = dirty;
    for (const auto& entry : mask.entries) {
        out.checkRef(entry.cell);
        out.setCell(entry.cell.row, entry.cell.col, entry.original);
    }
    return out;
}

void writeMaskCsv(const ErrorMask& mask, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write mask file: " + path);
    out << "row,col,error_type,original_value\n";
    for (const auto& entry : mask.entries) {
        // Originals are never missing; numeric cells carry an empty text.
        const std::string value =
            entry.original.text.empty() ? formatNumber(entry.original.num) : entry.original.text;
        out << entry.cell.row << ',' << entry.cell.col << ',' << errorTypeName(entry.type) << ','
            << csvField(value) << '\n';
    }
}

ErrorMask readMaskCsv(const std::string& path, const Dataset& like) {
    CsvReadOptions opts;
    opts.missingTokens = {};
    opts.schemaHint["original_value"] = ColumnKind::Categorical;
    const Dataset table = loadCsv(path, opts);
    const int rowCol = table.findColumn("row");
    const int colCol = table.findColumn("col");
    const int typeCol = table.findColumn("error_type");
    const int valueCol = table.findColumn("original_value");
    if (rowCol < 0 || colCol < 0 || typeCol < 0 || valueCol < 0) {
        throw DataError("mask file needs row,col,error_type,original_value columns: " + path);
    }
    ErrorMask mask;
    for (size_t r = 0; r < table.rowCount(); ++r) {
        MaskEntry entry;
        entry.cell.row = static_cast<size_t>(table.numberAt(r, static_cast<size_t>(rowCol)));
        entry.cell.col = static_cast<size_t>(table.numberAt(r, static_cast<size_t>(colCol)));
        like.checkRef(entry.cell);
        entry.type = errorTypeFromName(table.textAt(r, static_cast<size_t>(typeCol)));
        const std::string& raw = table.textAt(r, static_cast<size_t>(valueCol));
        if (like.columns()[entry.cell.col].kind == ColumnKind::Numeric) {
            const auto parsed = parseNumber(raw);
            if (!parsed) throw DataError("mask file original is not numeric at data row " + std::to_string(r + 1));
            entry.original = CellValue::ofNumber(*parsed);
        } else {
            entry.original = CellValue::ofText(raw);
        }
        mask.entries.push_back(std::move(entry));
    }
    std::sort(mask.entries.begin(), mask.entries.end(),
              [](const auto& a, const auto& b) { return a.cell < b.cell; });
    return mask;
}

}  // namespace curator
