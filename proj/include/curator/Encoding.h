#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "curator/Dataset.h"
#include "curator/Matrix.h"

namespace curator {

// How one dataset column maps into the encoded vector. Numeric columns
// take one min-max-scaled slot, categorical columns a one-hot block
// over a lexicographically sorted vocabulary. The label column's block
// always sits last.
struct ColumnEncoding {
    size_t column = 0;               // index into the source dataset
    ColumnKind kind = ColumnKind::Numeric;
    size_t offset = 0;               // first slot in the encoded vector
    size_t width = 1;
    double min = 0.0;                // numeric scaling range
    double max = 0.0;
    std::vector<std::string> vocabulary;

    int vocabIndex(const std::string& value) const;
};

struct EncodingSchema {
    std::vector<ColumnEncoding> blocks;  // feature blocks in column order, label block last
    size_t encodedWidth = 0;
    int labelBlock = -1;                 // index into blocks, -1 when no label
    Task task = Task::None;

    const ColumnEncoding& label() const { return blocks[static_cast<size_t>(labelBlock)]; }
    size_t featureWidth() const { return labelBlock < 0 ? encodedWidth : encodedWidth - label().width; }
};

// Ranges and vocabularies are computed over non-missing cells only.
// A column with no observed values is a schema error.
EncodingSchema buildEncoding(const Dataset& ds);

// Rows must be complete. Numeric cells scale to [0,1] with clamping,
// categorical cells one-hot over the schema vocabulary (all-zero block
// for values outside it).
Matrix encodeRows(const Dataset& ds, const EncodingSchema& schema, const std::vector<size_t>& rows);
Matrix encodeAllRows(const Dataset& ds, const EncodingSchema& schema);

// Inverse map for one encoded vector. Numeric slots unscale with
// clamping, one-hot blocks take the argmax with ties resolved to the
// lowest vocabulary index.
std::vector<CellValue> decodeRow(const std::vector<double>& v, const EncodingSchema& schema);

}  // namespace curator
