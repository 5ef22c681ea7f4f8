#pragma once

#include "tre/grid.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tre {

enum class Axis { row, col };

/// Header-tree node. `span` is a half-open index interval on the axis the
/// header describes (columns for col-axis nodes, rows for row-axis nodes).
struct HeaderNode {
    int id = -1;
    Axis axis = Axis::col;
    std::string label;
    int span_begin = 0;
    int span_end = 0;
    int depth = 0;
    std::optional<int> parent;
    std::vector<int> children;
    int anchor_row = 0;
    int anchor_col = 0;
};

/// Result of bidirectional header identification: the column-header band
/// occupies rows [0, col_band_depth), the row-header band columns
/// [0, row_band_width), and the data region is what remains.
struct HeaderLayout {
    int col_band_depth = 1; // d_c
    int row_band_width = 0; // d_r
    std::vector<HeaderNode> nodes; // ids are indices into this vector

    std::vector<int> roots(Axis axis) const;
    /// Deepest node of `axis` whose span contains `index`; -1 when uncovered.
    int leaf_for(Axis axis, int index) const;
    /// Root-to-leaf labels of node `id`.
    std::vector<int> path_to_root(int id) const;
};

struct MetaInfo {
    std::map<std::string, std::string> units; // column descriptor -> unit tag
    std::set<std::string> temporal_markers;
    std::set<int> aggregation_rows; // absolute grid row indices
    std::optional<std::string> title;
};

enum class EdgeKind { has_child, has_column_header, has_row_header, col_describes, row_describes };

std::string_view to_string(EdgeKind kind);

struct GraphNode {
    enum class Kind { root, header, data };
    int id = -1;
    Kind kind = Kind::data;
    std::string label;
    Axis axis = Axis::col; // headers only
    int row = -1;          // data cells only
    int col = -1;
    int header_id = -1; // layout node id; -1 for synthetic headers
};

struct GraphEdge {
    int from = -1;
    int to = -1;
    EdgeKind kind = EdgeKind::has_child;
};

/// Typed graph of header and data-cell nodes. has_child edges form a forest
/// per axis; every data cell has at least one col_describes and one
/// row_describes edge (bidirectional coverage).
struct MetaGraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    int root_id = 0;
    HeaderLayout layout;
    int n_rows = 0;
    int n_cols = 0;
};

struct Triple {
    std::string subject;
    std::string relation;
    std::string object;

    bool operator==(const Triple&) const = default;
};

/// "(subject, relation, object)" — the exact line format agents receive.
std::string render(const Triple& triple);

struct ViewRecord {
    std::vector<std::string> row_path; // leaf-to-root row header labels
    std::vector<CellValue> values;     // aligned with DataView::descriptors
};

/// Rectangular projection of the data region. Descriptors are root-to-leaf
/// header paths joined by "/" ("#k" suffixes disambiguate duplicates); the
/// first `row_descriptor_count` descriptors name the row-header band columns.
struct DataView {
    std::vector<std::string> descriptors;
    std::size_t row_descriptor_count = 0;
    std::vector<ViewRecord> records;

    std::optional<std::size_t> index_of(std::string_view descriptor) const;
    std::vector<std::string> col_descriptors() const; // data-region descriptors only
};

/// Smallest suffix of rows (then columns) that is value-typed in at least
/// half of its non-null cells becomes the data region; the bands above/left
/// become header forests via span alignment. d_c >= 1 always.
HeaderLayout detect_headers(const RawGrid& grid);

/// Units from "%"-tagged value columns and parenthesized header suffixes,
/// temporal markers from Temporal-typed header labels, aggregation rows from
/// a fixed case-insensitive lexicon, plus a whole-width title row when present.
MetaInfo extract_meta(const RawGrid& grid, const HeaderLayout& layout);

MetaGraph build_meta_graph(const RawGrid& grid, const HeaderLayout& layout);

/// Deterministic linearization: root triples first, then col-axis preorder,
/// then cross-axis containment (row-band column header -> its row headers),
/// then row-axis preorder. Data-cell triples only when requested.
std::vector<Triple> linearize_triples(const MetaGraph& graph, bool include_data_cells = false);

DataView project_view(const RawGrid& grid, const MetaGraph& graph);

/// Compact table digest handed to agents alongside queries.
std::string render_meta_digest(const MetaGraph& graph);

} // namespace tre
