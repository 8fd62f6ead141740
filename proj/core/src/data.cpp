#include "depstat/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "depstat/json_writer.hpp"

namespace depstat {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view cell, double& out) {
    cell = trim(cell);
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);  // from_chars rejects a leading '+'
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

bool parse_int(std::string_view cell, int& out) {
    cell = trim(cell);
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::string column_label(const std::vector<std::string>& header, int col) {
    if (col < static_cast<int>(header.size())) return "\"" + header[col] + "\"";
    return std::to_string(col + 1);
}

}  // namespace

void BlockSpec::validate(int ncols) const {
    if (blocks.empty()) throw DataError("block spec: no blocks given");
    if (count() > 16) throw DataError("block spec: at most 16 blocks supported");
    std::vector<char> seen(static_cast<std::size_t>(ncols), 0);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].empty())
            throw DataError("block spec: block " + std::to_string(b + 1) + " is empty");
        for (int c : blocks[b]) {
            if (c < 0 || c >= ncols)
                throw DataError("block spec: column " + std::to_string(c) +
                                " out of range (data has " + std::to_string(ncols) + " columns)");
            if (seen[static_cast<std::size_t>(c)])
                throw DataError("block spec: blocks overlap on column " + std::to_string(c));
            seen[static_cast<std::size_t>(c)] = 1;
        }
    }
}

BlockSpec parse_block_spec(std::string_view text) {
    BlockSpec spec;
    if (trim(text).empty()) throw DataError("block spec: empty descriptor");
    for (std::string_view block_text : split(text, ';')) {
        std::vector<int> cols;
        for (std::string_view item : split(block_text, ',')) {
            item = trim(item);
            std::size_t colon = item.find(':');
            if (colon == std::string_view::npos) {
                int c;
                if (!parse_int(item, c) || c < 0)
                    throw DataError("block spec: bad column index '" + std::string(item) + "'");
                cols.push_back(c);
            } else {
                int a, b;
                if (!parse_int(item.substr(0, colon), a) || !parse_int(item.substr(colon + 1), b) ||
                    a < 0 || b <= a)
                    throw DataError("block spec: bad range '" + std::string(item) +
                                    "' (expected a:b with a < b)");
                for (int c = a; c < b; ++c) cols.push_back(c);
            }
        }
        if (cols.empty()) throw DataError("block spec: empty block in descriptor");
        spec.blocks.push_back(std::move(cols));
    }
    // Range/overlap checks need the column count and run again at bind time;
    // duplicates inside the descriptor itself can be caught immediately.
    std::vector<int> all;
    for (const auto& b : spec.blocks) all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    auto dup = std::adjacent_find(all.begin(), all.end());
    if (dup != all.end())
        throw DataError("block spec: blocks overlap on column " + std::to_string(*dup));
    return spec;
}

void validate_data_matrix(const Matrix& m) {
    if (m.rows < 2) throw std::invalid_argument("data matrix: need at least 2 rows");
    if (m.cols < 1) throw std::invalid_argument("data matrix: need at least 1 column");
    for (double x : m.v) {
        if (!std::isfinite(x)) throw std::invalid_argument("data matrix: non-finite entry");
    }
}

BlockSample::BlockSample(Matrix data, BlockSpec spec) : data_(std::move(data)), spec_(std::move(spec)) {
    validate_data_matrix(data_);
    spec_.validate(data_.cols);
}

Matrix BlockSample::block(int k) const {
    const auto& cols = spec_.blocks.at(static_cast<std::size_t>(k));
    Matrix out(data_.rows, static_cast<int>(cols.size()));
    for (int i = 0; i < data_.rows; ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(i, static_cast<int>(j)) = data_(i, cols[j]);
        }
    }
    return out;
}

BlockSample BlockSample::ranked() const { return BlockSample(to_ranks(data_), spec_); }

Matrix to_ranks(const Matrix& data) {
    validate_data_matrix(data);
    const int n = data.rows;
    Matrix out(n, data.cols);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int j = 0; j < data.cols; ++j) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return data(a, j) < data(b, j); });
        int i = 0;
        while (i < n) {
            int run_end = i;
            while (run_end + 1 < n && data(order[run_end + 1], j) == data(order[i], j)) ++run_end;
            // 1-based positions i+1 .. run_end+1 share the mid-rank
            double mid = (static_cast<double>(i + 1) + static_cast<double>(run_end + 1)) / 2.0;
            double r = mid / static_cast<double>(n);
            for (int k = i; k <= run_end; ++k) out(order[k], j) = r;
            i = run_end + 1;
        }
    }
    return out;
}

CsvData read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw DataError(path + ": file is empty");

    CsvData out;
    auto first_cells = split(lines[0], ',');
    const int ncols = static_cast<int>(first_cells.size());
    bool has_header = false;
    for (auto cell : first_cells) {
        double unused;
        if (!parse_double(cell, unused)) {
            has_header = true;
            break;
        }
    }
    if (has_header) {
        for (auto cell : first_cells) out.header.emplace_back(trim(cell));
    }

    const std::size_t first_data = has_header ? 1 : 0;
    const int nrows = static_cast<int>(lines.size() - first_data);
    if (nrows <= 0) throw DataError(path + ": no data rows");
    out.values = Matrix(nrows, ncols);
    for (std::size_t li = first_data; li < lines.size(); ++li) {
        auto cells = split(lines[li], ',');
        const int file_line = static_cast<int>(li) + 1;
        if (static_cast<int>(cells.size()) != ncols)
            throw DataError(path + ": row " + std::to_string(file_line) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(ncols));
        for (int j = 0; j < ncols; ++j) {
            double x;
            if (!parse_double(cells[static_cast<std::size_t>(j)], x) || !std::isfinite(x))
                throw DataError(path + ": non-numeric cell '" +
                                std::string(trim(cells[static_cast<std::size_t>(j)])) + "' at row " +
                                std::to_string(file_line) + ", column " +
                                column_label(out.header, j));
            out.values(static_cast<int>(li - first_data), j) = x;
        }
    }
    return out;
}

BlockSample load_csv(const std::string& path, const BlockSpec& spec) {
    CsvData csv = read_csv(path);
    try {
        return BlockSample(std::move(csv.values), spec);
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_csv(const Matrix& m, const std::string& path, std::span<const std::string> header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j) out << ',';
            out << header[j];
        }
        out << '\n';
    }
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) {
            if (j) out << ',';
            out << JsonWriter::format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

}  // namespace depstat
