#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "depstat/matrix.hpp"

namespace depstat {

/// Problems with input files or block layouts. The CLI maps these to exit
/// code 2, as opposed to flag errors (exit 3).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordered partition of columns into d blocks (the random vectors Z_1..Z_d).
/// Blocks must be disjoint, non-empty, and there can be at most 16 of them:
/// subset enumeration elsewhere uses bitmasks over 2^d.
struct BlockSpec {
    std::vector<std::vector<int>> blocks;

    int count() const { return static_cast<int>(blocks.size()); }

    /// Checks disjointness, emptiness and column range against a matrix with
    /// `ncols` columns. Throws DataError.
    void validate(int ncols) const;
};

/// Parse a block layout descriptor. Grammar: blocks are separated by ';',
/// each block is a comma list of single 0-based column indices or half-open
/// ranges "a:b". Example: "0:2;2,5;7" is three blocks {0,1}, {2,5}, {7}.
BlockSpec parse_block_spec(std::string_view text);

/// Throws std::invalid_argument unless m has n >= 2 rows, p >= 1 columns and
/// only finite entries.
void validate_data_matrix(const Matrix& m);

/// n observations split into d column blocks. Immutable after construction.
class BlockSample {
public:
    BlockSample(Matrix data, BlockSpec spec);

    const Matrix& data() const { return data_; }
    const BlockSpec& spec() const { return spec_; }
    int n() const { return data_.rows; }
    int block_count() const { return spec_.count(); }

    /// Copy of the columns belonging to block k, in descriptor order.
    Matrix block(int k) const;

    /// Same block structure over the column-wise normalized ranks of the data.
    BlockSample ranked() const;

private:
    Matrix data_;
    BlockSpec spec_;
};

/// Column-wise normalized ranks: entry = rank / n, ties get mid-ranks
/// (average of the tied positions). Every entry lies in (0, 1]; the transform
/// is order-preserving per column, so it is invariant under strictly
/// increasing marginal maps and equivariant under row permutation.
Matrix to_ranks(const Matrix& data);

struct CsvData {
    Matrix values;
    std::vector<std::string> header;  // empty when the file has no header row
};

/// Read a numeric CSV ("," delimiter, "." decimal point). A single header row
/// is auto-detected when the first row has any non-numeric cell. Errors name
/// the 1-based file line and the column (by header name when available).
CsvData read_csv(const std::string& path);

/// read_csv + block binding + data validation.
BlockSample load_csv(const std::string& path, const BlockSpec& spec);

/// Write a matrix as CSV with 17-significant-digit values, so that a
/// read_csv round trip reproduces every double bit-exactly.
void write_csv(const Matrix& m, const std::string& path, std::span<const std::string> header = {});

}  // namespace depstat
