#include "tre/grid.hpp"

#include "tre/error.hpp"

#include <json.hpp>

#include <format>

namespace tre {

RawGrid RawGrid::from_cells(int n_rows, int n_cols, std::vector<GridCell> cells) {
    if (n_rows < 0 || n_cols < 0) {
        raise(Errc::malformed_document, "negative grid dimensions");
    }
    RawGrid grid;
    grid.n_rows_ = n_rows;
    grid.n_cols_ = n_cols;
    grid.cells_ = std::move(cells);
    grid.owner_.assign(static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols), -1);
    for (std::size_t i = 0; i < grid.cells_.size(); ++i) {
        const GridCell& cell = grid.cells_[i];
        if (cell.row_span < 1 || cell.col_span < 1) {
            raise(Errc::malformed_document,
                  std::format("cell ({},{}) has empty span", cell.row, cell.col));
        }
        if (cell.row < 0 || cell.col < 0 || cell.row + cell.row_span > n_rows ||
            cell.col + cell.col_span > n_cols) {
            raise(Errc::out_of_bounds,
                  std::format("cell ({},{}) span {}x{} exceeds {}x{} grid", cell.row, cell.col,
                              cell.row_span, cell.col_span, n_rows, n_cols));
        }
        for (int r = cell.row; r < cell.row + cell.row_span; ++r) {
            for (int c = cell.col; c < cell.col + cell.col_span; ++c) {
                int& slot = grid.owner_[static_cast<std::size_t>(r) * n_cols + c];
                if (slot != -1) {
                    raise(Errc::overlapping_spans,
                          std::format("position ({},{}) covered twice", r, c));
                }
                slot = static_cast<int>(i);
            }
        }
    }
    return grid;
}

GridCell RawGrid::resolve(int row, int col) const {
    if (row < 0 || row >= n_rows_ || col < 0 || col >= n_cols_) {
        raise(Errc::out_of_bounds, std::format("({},{}) outside {}x{}", row, col, n_rows_, n_cols_));
    }
    int idx = owner_[static_cast<std::size_t>(row) * n_cols_ + col];
    if (idx < 0) {
        GridCell implicit;
        implicit.row = row;
        implicit.col = col;
        return implicit;
    }
    return cells_[static_cast<std::size_t>(idx)];
}

bool RawGrid::has_explicit_cell(int row, int col) const {
    if (row < 0 || row >= n_rows_ || col < 0 || col >= n_cols_) {
        return false;
    }
    return owner_[static_cast<std::size_t>(row) * n_cols_ + col] >= 0;
}

GridCell resolve_cell(const RawGrid& grid, int row, int col) {
    return grid.resolve(row, col);
}

RawGrid ingest_grid(std::string_view document) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(document);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::malformed_document, e.what());
    }
    try {
        if (!doc.is_object() || !doc.contains("n_rows") || !doc.contains("n_cols")) {
            raise(Errc::malformed_document, "missing n_rows/n_cols");
        }
        int n_rows = doc.at("n_rows").get<int>();
        int n_cols = doc.at("n_cols").get<int>();
        std::vector<GridCell> cells;
        for (const auto& entry : doc.value("cells", nlohmann::json::array())) {
            GridCell cell;
            cell.row = entry.at("r").get<int>();
            cell.col = entry.at("c").get<int>();
            cell.row_span = entry.value("rs", 1);
            cell.col_span = entry.value("cs", 1);
            cell.value = infer_value(entry.at("v").get<std::string>());
            cell.emphasis = entry.value("emph", false);
            cells.push_back(std::move(cell));
        }
        return RawGrid::from_cells(n_rows, n_cols, std::move(cells));
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::malformed_document, e.what());
    }
}

namespace {

bool valid_utf8(std::string_view bytes) {
    std::size_t i = 0;
    while (i < bytes.size()) {
        unsigned char b = static_cast<unsigned char>(bytes[i]);
        std::size_t extra = 0;
        if (b < 0x80) {
            extra = 0;
        } else if ((b & 0xE0) == 0xC0) {
            extra = 1;
        } else if ((b & 0xF0) == 0xE0) {
            extra = 2;
        } else if ((b & 0xF8) == 0xF0) {
            extra = 3;
        } else {
            return false;
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            if (i + k >= bytes.size() ||
                (static_cast<unsigned char>(bytes[i + k]) & 0xC0) != 0x80) {
                return false;
            }
        }
        i += extra + 1;
    }
    return true;
}

std::vector<std::string> split_record(std::string_view line, char delimiter) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"' && current.empty()) {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

} // namespace

RawGrid ingest_csv(std::string_view document, const CsvOptions& options) {
    if (trim(document).empty()) {
        raise(Errc::empty_document, "no CSV content");
    }
    if (document.find('\0') != std::string_view::npos || !valid_utf8(document)) {
        raise(Errc::unreadable_encoding, "document is not valid UTF-8");
    }
    std::vector<std::vector<std::string>> rows;
    std::size_t start = 0;
    while (start < document.size()) {
        std::size_t end = document.find('\n', start);
        std::string_view line = end == std::string_view::npos
                                    ? document.substr(start)
                                    : document.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        rows.push_back(split_record(line, options.delimiter));
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    if (rows.empty()) {
        raise(Errc::empty_document, "no CSV rows");
    }
    std::size_t width = 0;
    for (const auto& row : rows) {
        width = std::max(width, row.size());
    }
    std::vector<GridCell> cells;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            GridCell cell;
            cell.row = static_cast<int>(r);
            cell.col = static_cast<int>(c);
            cell.value = c < rows[r].size() ? infer_value(rows[r][c]) : CellValue::null();
            cell.emphasis = static_cast<int>(r) < options.header_rows;
            cells.push_back(std::move(cell));
        }
    }
    return RawGrid::from_cells(static_cast<int>(rows.size()), static_cast<int>(width),
                               std::move(cells));
}

std::string render_csv(const RawGrid& grid, char delimiter) {
    for (const auto& cell : grid.cells()) {
        if (cell.row_span != 1 || cell.col_span != 1) {
            raise(Errc::invalid_argument, "render_csv requires all-1x1 spans");
        }
    }
    std::string out;
    for (int r = 0; r < grid.rows(); ++r) {
        for (int c = 0; c < grid.cols(); ++c) {
            if (c > 0) {
                out += delimiter;
            }
            std::string field = grid.resolve(r, c).value.to_text();
            if (field.find(delimiter) != std::string::npos ||
                field.find('"') != std::string::npos || field.find('\n') != std::string::npos) {
                std::string quoted = "\"";
                for (char ch : field) {
                    if (ch == '"') {
                        quoted += "\"\"";
                    } else {
                        quoted += ch;
                    }
                }
                quoted += '"';
                field = std::move(quoted);
            }
            out += field;
        }
        out += '\n';
    }
    return out;
}

} // namespace tre
