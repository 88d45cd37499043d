#include "curator/Encoding.h"

#include <algorithm>
#include <set>

#include "curator/Errors.h"

namespace curator {

int ColumnEncoding::vocabIndex(const std::string& value) const {
    const auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), value);
    if (it != vocabulary.end() && *it == value) return static_cast<int>(it - vocabulary.begin());
    return -1;
}

EncodingSchema buildEncoding(const Dataset& ds) {
    if (ds.rowCount() == 0) throw DataError("cannot build encoding for an empty dataset");

    EncodingSchema schema;
    schema.task = ds.task();

    auto makeBlock = [&](size_t c) {
        const Column& col = ds.columns()[c];
        ColumnEncoding block;
        block.column = c;
        block.kind = col.kind;
        if (col.kind == ColumnKind::Numeric) {
            bool any = false;
            double lo = 0.0, hi = 0.0;
            for (size_t r = 0; r < ds.rowCount(); ++r) {
                if (!col.present[r]) continue;
                const double v = col.numeric[r];
                if (!any) {
                    lo = hi = v;
                    any = true;
                } else {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            if (!any) throw DataError("column has no observed values: " + col.name);
            block.min = lo;
            block.max = hi;
            block.width = 1;
        } else {
            std::set<std::string> vocab;
            for (size_t r = 0; r < ds.rowCount(); ++r) {
                if (col.present[r]) vocab.insert(col.text[r]);
            }
            if (vocab.empty()) throw DataError("column has no observed values: " + col.name);
            block.vocabulary.assign(vocab.begin(), vocab.end());
            block.width = block.vocabulary.size();
        }
        return block;
    };

    const int labelCol = ds.labelCol();
    for (size_t c = 0; c < ds.colCount(); ++c) {
        if (static_cast<int>(c) == labelCol) continue;
        schema.blocks.push_back(makeBlock(c));
    }
    if (labelCol >= 0) {
        schema.blocks.push_back(makeBlock(static_cast<size_t>(labelCol)));
        schema.labelBlock = static_cast<int>(schema.blocks.size()) - 1;
    }

    size_t offset = 0;
    for (auto& block : schema.blocks) {
        block.offset = offset;
        offset += block.width;
    }
    schema.encodedWidth = offset;
    return schema;
}

namespace {

void encodeInto(const Dataset& ds, const EncodingSchema& schema, size_t row, double* out) {
    for (const auto& block : schema.blocks) {
        if (ds.isMissing(row, block.column)) {
            throw DataError("cannot encode missing cell at (" + std::to_string(row) + "," +
                            std::to_string(block.column) + ")");
        }
        if (block.kind == ColumnKind::Numeric) {
            const double range = block.max - block.min;
            double scaled = range > 0.0 ? (ds.numberAt(row, block.column) - block.min) / range : 0.0;
            scaled = std::clamp(scaled, 0.0, 1.0);
            out[block.offset] = scaled;
        } else {
            for (size_t j = 0; j < block.width; ++j) out[block.offset + j] = 0.0;
            const int idx = block.vocabIndex(ds.textAt(row, block.column));
            if (idx >= 0) out[block.offset + static_cast<size_t>(idx)] = 1.0;
        }
    }
}

}  // namespace

Matrix encodeRows(const Dataset& ds, const EncodingSchema& schema, const std::vector<size_t>& rows) {
    Matrix out(rows.size(), schema.encodedWidth);
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= ds.rowCount()) throw DataError("encode: row index out of range");
        encodeInto(ds, schema, rows[i], out.rowPtr(i));
    }
    return out;
}

Matrix encodeAllRows(const Dataset& ds, const EncodingSchema& schema) {
    std::vector<size_t> rows(ds.rowCount());
    for (size_t r = 0; r < rows.size(); ++r) rows[r] = r;
    return encodeRows(ds, schema, rows);
}

std::vector<CellValue> decodeRow(const std::vector<double>& v, const EncodingSchema& schema) {
    if (v.size() != schema.encodedWidth) {
        throw DataError("decode: expected vector of length " + std::to_string(schema.encodedWidth) +
                        ", got " + std::to_string(v.size()));
    }
    size_t nCols = 0;
    for (const auto& block : schema.blocks) nCols = std::max(nCols, block.column + 1);
    std::vector<CellValue> cells(nCols);
    for (const auto& block : schema.blocks) {
        if (block.kind == ColumnKind::Numeric) {
            const double scaled = std::clamp(v[block.offset], 0.0, 1.0);
            cells[block.column] = CellValue::ofNumber(block.min + scaled * (block.max - block.min));
        } else {
            size_t best = 0;
            for (size_t j = 1; j < block.width; ++j) {
                if (v[block.offset + j] > v[block.offset + best]) best = j;
            }
            cells[block.column] = CellValue::ofText(block.vocabulary[best]);
        }
    }
    return cells;
}

}  // namespace curator
