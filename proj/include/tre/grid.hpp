#pragma once

#include "tre/cell_value.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace tre {

/// One spreadsheet cell. (row, col) anchors the span; spans never overlap.
struct GridCell {
    int row = 0;
    int col = 0;
    int row_span = 1;
    int col_span = 1;
    CellValue value;
    bool emphasis = false;

    bool covers(int r, int c) const {
        return r >= row && r < row + row_span && c >= col && c < col + col_span;
    }
};

/// Immutable merged-cell grid. Every position is covered by exactly one span;
/// positions without an explicit cell resolve to synthetic Null anchors.
class RawGrid {
  public:
    static RawGrid from_cells(int n_rows, int n_cols, std::vector<GridCell> cells);

    int rows() const { return n_rows_; }
    int cols() const { return n_cols_; }
    const std::vector<GridCell>& cells() const { return cells_; }

    /// Unique cell whose span covers (row, col); synthetic Null anchor when
    /// no explicit cell does. Throws out_of_bounds outside the grid.
    GridCell resolve(int row, int col) const;

    bool has_explicit_cell(int row, int col) const;

  private:
    RawGrid() = default;

    int n_rows_ = 0;
    int n_cols_ = 0;
    std::vector<GridCell> cells_;
    std::vector<int> owner_; // row-major position -> cell index, -1 for implicit Null
};

/// Parses the JSON grid-document format:
///   {"n_rows": int, "n_cols": int,
///    "cells": [{"r": int, "c": int, "rs": int, "cs": int, "v": string, "emph": bool}]}
/// Values pass through infer_value; anchors are preserved bit-exactly.
RawGrid ingest_grid(std::string_view document);

struct CsvOptions {
    char delimiter = ',';
    int header_rows = 1; // marked with the emphasis bit
};

/// Character-separated ingestion: all spans 1x1, ragged rows padded with Null,
/// values typed by infer_value.
RawGrid ingest_csv(std::string_view document, const CsvOptions& options = {});

/// Canonical CSV rendering for all-1x1 grids (quotes fields containing the
/// delimiter, quotes, or newlines).
std::string render_csv(const RawGrid& grid, char delimiter = ',');

GridCell resolve_cell(const RawGrid& grid, int row, int col);

} // namespace tre
