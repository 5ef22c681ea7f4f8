#include "tre/structure.hpp"

#include "tre/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <format>

namespace tre {

std::string_view to_string(EdgeKind kind) {
    switch (kind) {
    case EdgeKind::has_child: return "has_child";
    case EdgeKind::has_column_header: return "has_column_header";
    case EdgeKind::has_row_header: return "has_row_header";
    case EdgeKind::col_describes: return "col_describes";
    case EdgeKind::row_describes: return "row_describes";
    }
    return "?";
}

std::string render(const Triple& triple) {
    return std::format("({}, {}, {})", triple.subject, triple.relation, triple.object);
}

std::vector<int> HeaderLayout::roots(Axis axis) const {
    std::vector<int> out;
    for (const HeaderNode& node : nodes) {
        if (node.axis == axis && !node.parent.has_value()) {
            out.push_back(node.id);
        }
    }
    return out;
}

int HeaderLayout::leaf_for(Axis axis, int index) const {
    int best = -1;
    int best_depth = -1;
    for (const HeaderNode& node : nodes) {
        if (node.axis != axis || index < node.span_begin || index >= node.span_end) {
            continue;
        }
        if (node.depth > best_depth) {
            best_depth = node.depth;
            best = node.id;
        }
    }
    return best;
}

std::vector<int> HeaderLayout::path_to_root(int id) const {
    std::vector<int> path;
    for (int cur = id; cur >= 0;) {
        path.push_back(cur);
        cur = nodes[static_cast<std::size_t>(cur)].parent.value_or(-1);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

namespace {

bool value_typed(const CellValue& v) {
    return v.kind() == ValueKind::integer || v.kind() == ValueKind::real ||
           v.kind() == ValueKind::temporal;
}

// >= 50% of non-null positions value-typed; vacuously true with none.
bool band_row_is_data(const RawGrid& grid, int row, int col_begin) {
    int non_null = 0;
    int typed = 0;
    for (int c = col_begin; c < grid.cols(); ++c) {
        CellValue v = grid.resolve(row, c).value;
        if (v.is_null()) {
            continue;
        }
        ++non_null;
        if (value_typed(v)) {
            ++typed;
        }
    }
    return non_null == 0 || typed * 2 >= non_null;
}

bool band_col_is_data(const RawGrid& grid, int col, int row_begin) {
    int non_null = 0;
    int typed = 0;
    for (int r = row_begin; r < grid.rows(); ++r) {
        CellValue v = grid.resolve(r, col).value;
        if (v.is_null()) {
            continue;
        }
        ++non_null;
        if (value_typed(v)) {
            ++typed;
        }
    }
    return non_null == 0 || typed * 2 >= non_null;
}

struct BandCell {
    GridCell cell;
    int level_begin; // anchor on the band axis
    int level_end;
    int span_begin; // interval on the perpendicular axis
    int span_end;
};

// Builds one axis's forest by span alignment: a cell's parent is the nearest
// cell above (or left) whose perpendicular interval contains its own.
void build_forest(std::vector<BandCell> cells, Axis axis, std::vector<HeaderNode>& nodes) {
    std::sort(cells.begin(), cells.end(), [](const BandCell& a, const BandCell& b) {
        if (a.level_begin != b.level_begin) {
            return a.level_begin < b.level_begin;
        }
        return a.span_begin < b.span_begin;
    });
    std::vector<int> ids(cells.size(), -1);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const BandCell& bc = cells[i];
        int parent = -1;
        int parent_end = -1;
        for (std::size_t j = 0; j < i; ++j) {
            const BandCell& cand = cells[j];
            if (cand.level_end <= bc.level_begin && cand.span_begin <= bc.span_begin &&
                cand.span_end >= bc.span_end && cand.level_end > parent_end) {
                parent_end = cand.level_end;
                parent = ids[j];
            }
        }
        HeaderNode node;
        node.id = static_cast<int>(nodes.size());
        node.axis = axis;
        node.label = bc.cell.value.to_text();
        node.span_begin = bc.span_begin;
        node.span_end = bc.span_end;
        node.anchor_row = bc.cell.row;
        node.anchor_col = bc.cell.col;
        if (parent >= 0) {
            node.parent = parent;
            node.depth = nodes[static_cast<std::size_t>(parent)].depth + 1;
            nodes[static_cast<std::size_t>(parent)].children.push_back(node.id);
        }
        ids[i] = node.id;
        nodes.push_back(std::move(node));
    }
}

std::vector<BandCell> collect_band_cells(const RawGrid& grid, Axis axis, int band_rows,
                                         int band_cols_begin, int band_cols_end,
                                         int band_rows_begin) {
    std::vector<BandCell> out;
    std::set<std::pair<int, int>> seen;
    auto consider = [&](int r, int c) {
        GridCell cell = grid.resolve(r, c);
        if (cell.value.is_null() || !seen.insert({cell.row, cell.col}).second) {
            return;
        }
        BandCell bc;
        bc.cell = cell;
        if (axis == Axis::col) {
            bc.level_begin = cell.row;
            bc.level_end = cell.row + cell.row_span;
            bc.span_begin = cell.col;
            bc.span_end = cell.col + cell.col_span;
        } else {
            bc.level_begin = cell.col;
            bc.level_end = cell.col + cell.col_span;
            bc.span_begin = cell.row;
            bc.span_end = cell.row + cell.row_span;
        }
        out.push_back(std::move(bc));
    };
    if (axis == Axis::col) {
        for (int r = 0; r < band_rows; ++r) {
            for (int c = 0; c < grid.cols(); ++c) {
                consider(r, c);
            }
        }
    } else {
        for (int c = band_cols_begin; c < band_cols_end; ++c) {
            for (int r = band_rows_begin; r < grid.rows(); ++r) {
                consider(r, c);
            }
        }
    }
    return out;
}

} // namespace

HeaderLayout detect_headers(const RawGrid& grid) {
    if (grid.rows() == 0 || grid.cols() == 0) {
        raise(Errc::no_data_region, "empty grid");
    }
    // Smallest d_c such that every row >= d_c reads as data.
    int d_c = grid.rows();
    for (int r = grid.rows() - 1; r >= 0; --r) {
        if (band_row_is_data(grid, r, 0)) {
            d_c = r;
        } else {
            break;
        }
    }
    d_c = std::max(d_c, 1); // at least one column-header row assumed
    if (d_c >= grid.rows()) {
        raise(Errc::no_data_region, "column-header band consumes the whole grid");
    }
    int d_r = grid.cols();
    for (int c = grid.cols() - 1; c >= 0; --c) {
        if (band_col_is_data(grid, c, d_c)) {
            d_r = c;
        } else {
            break;
        }
    }
    if (d_r >= grid.cols()) {
        raise(Errc::no_data_region, "row-header band consumes the whole grid");
    }

    HeaderLayout layout;
    layout.col_band_depth = d_c;
    layout.row_band_width = d_r;
    build_forest(collect_band_cells(grid, Axis::col, d_c, 0, 0, 0), Axis::col, layout.nodes);
    build_forest(collect_band_cells(grid, Axis::row, 0, 0, d_r, d_c), Axis::row, layout.nodes);
    return layout;
}

namespace {

const std::array<std::string_view, 6> kAggregateLexicon = {"total", "sum",     "avg",
                                                           "average", "overall", "合计"};

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string descriptor_path(const HeaderLayout& layout, int node_id) {
    std::string path;
    for (int id : layout.path_to_root(node_id)) {
        if (!path.empty()) {
            path += '/';
        }
        path += layout.nodes[static_cast<std::size_t>(id)].label;
    }
    return path;
}

std::string fallback_descriptor(int col) {
    return "col" + std::to_string(col);
}

std::string column_descriptor(const HeaderLayout& layout, int col) {
    int leaf = layout.leaf_for(Axis::col, col);
    return leaf >= 0 ? descriptor_path(layout, leaf) : fallback_descriptor(col);
}

} // namespace

MetaInfo extract_meta(const RawGrid& grid, const HeaderLayout& layout) {
    MetaInfo meta;
    for (const HeaderNode& node : layout.nodes) {
        if (infer_value(node.label).kind() == ValueKind::temporal) {
            meta.temporal_markers.insert(node.label);
        }
        // Parenthesized suffix like "Revenue (thousands)".
        if (node.axis == Axis::col && node.label.size() > 2 && node.label.back() == ')') {
            std::size_t open = node.label.rfind('(');
            if (open != std::string::npos && open > 0) {
                std::string unit(trim(std::string_view(node.label).substr(
                    open + 1, node.label.size() - open - 2)));
                if (!unit.empty()) {
                    meta.units[descriptor_path(layout, node.id)] = unit;
                }
            }
        }
    }
    // Columns whose non-null data values all carry "%" get the "%" unit.
    for (int c = layout.row_band_width; c < grid.cols(); ++c) {
        int seen = 0;
        bool all_percent = true;
        for (int r = layout.col_band_depth; r < grid.rows(); ++r) {
            CellValue v = grid.resolve(r, c).value;
            if (v.is_null()) {
                continue;
            }
            ++seen;
            if (!v.unit().has_value() || *v.unit() != "%") {
                all_percent = false;
                break;
            }
        }
        if (seen > 0 && all_percent) {
            meta.units[column_descriptor(layout, c)] = "%";
        }
    }
    // Aggregation rows by row-band label.
    if (layout.row_band_width > 0) {
        for (int r = layout.col_band_depth; r < grid.rows(); ++r) {
            std::string label =
                to_lower(trim(grid.resolve(r, layout.row_band_width - 1).value.to_text()));
            for (std::string_view word : kAggregateLexicon) {
                if (label == word) {
                    meta.aggregation_rows.insert(r);
                    break;
                }
            }
        }
    }
    // A single non-null cell spanning the full first row is the title.
    int non_null_in_row0 = 0;
    for (const GridCell& cell : grid.cells()) {
        if (cell.row == 0 && !cell.value.is_null()) {
            ++non_null_in_row0;
            if (cell.col == 0 && cell.col_span == grid.cols()) {
                meta.title = cell.value.to_text();
            }
        }
    }
    if (non_null_in_row0 != 1) {
        meta.title.reset();
    }
    return meta;
}

MetaGraph build_meta_graph(const RawGrid& grid, const HeaderLayout& layout) {
    MetaGraph graph;
    graph.layout = layout;
    graph.n_rows = grid.rows();
    graph.n_cols = grid.cols();

    GraphNode root;
    root.id = 0;
    root.kind = GraphNode::Kind::root;
    root.label = "table";
    graph.nodes.push_back(root);
    graph.root_id = 0;

    std::map<int, int> layout_to_graph;
    for (const HeaderNode& node : layout.nodes) {
        GraphNode gn;
        gn.id = static_cast<int>(graph.nodes.size());
        gn.kind = GraphNode::Kind::header;
        gn.label = node.label;
        gn.axis = node.axis;
        gn.header_id = node.id;
        layout_to_graph[node.id] = gn.id;
        graph.nodes.push_back(std::move(gn));
    }
    for (const HeaderNode& node : layout.nodes) {
        if (node.parent.has_value()) {
            graph.edges.push_back(
                {layout_to_graph[*node.parent], layout_to_graph[node.id], EdgeKind::has_child});
        } else {
            EdgeKind kind = node.axis == Axis::col ? EdgeKind::has_column_header
                                                   : EdgeKind::has_row_header;
            graph.edges.push_back({graph.root_id, layout_to_graph[node.id], kind});
        }
    }

    // Synthetic headers cover what the bands left unlabeled: row ordinals when
    // the row band is absent, column ordinals for columns with no header.
    std::map<int, int> ordinal_row_nodes; // data row -> graph node
    if (layout.row_band_width == 0) {
        for (int r = layout.col_band_depth; r < grid.rows(); ++r) {
            GraphNode gn;
            gn.id = static_cast<int>(graph.nodes.size());
            gn.kind = GraphNode::Kind::header;
            gn.label = std::to_string(r - layout.col_band_depth);
            gn.axis = Axis::row;
            graph.nodes.push_back(gn);
            graph.edges.push_back({graph.root_id, gn.id, EdgeKind::has_row_header});
            ordinal_row_nodes[r] = gn.id;
        }
    }
    std::map<int, int> ordinal_col_nodes; // data col -> graph node
    for (int c = layout.row_band_width; c < grid.cols(); ++c) {
        if (layout.leaf_for(Axis::col, c) < 0) {
            GraphNode gn;
            gn.id = static_cast<int>(graph.nodes.size());
            gn.kind = GraphNode::Kind::header;
            gn.label = fallback_descriptor(c);
            gn.axis = Axis::col;
            graph.nodes.push_back(gn);
            graph.edges.push_back({graph.root_id, gn.id, EdgeKind::has_column_header});
            ordinal_col_nodes[c] = gn.id;
        }
    }

    for (int r = layout.col_band_depth; r < grid.rows(); ++r) {
        for (int c = layout.row_band_width; c < grid.cols(); ++c) {
            GraphNode gn;
            gn.id = static_cast<int>(graph.nodes.size());
            gn.kind = GraphNode::Kind::data;
            gn.label = grid.resolve(r, c).value.to_text();
            gn.row = r;
            gn.col = c;
            graph.nodes.push_back(gn);

            int col_leaf = layout.leaf_for(Axis::col, c);
            int col_node = col_leaf >= 0 ? layout_to_graph[col_leaf] : ordinal_col_nodes[c];
            graph.edges.push_back({col_node, gn.id, EdgeKind::col_describes});

            int row_node = -1;
            if (layout.row_band_width > 0) {
                int row_leaf = layout.leaf_for(Axis::row, r);
                if (row_leaf >= 0) {
                    row_node = layout_to_graph[row_leaf];
                }
            } else {
                row_node = ordinal_row_nodes[r];
            }
            if (row_node < 0) {
                // Row band exists but no header covers this row; fall back to
                // a per-row ordinal node so coverage stays bidirectional.
                auto it = ordinal_row_nodes.find(r);
                if (it == ordinal_row_nodes.end()) {
                    GraphNode syn;
                    syn.id = static_cast<int>(graph.nodes.size());
                    syn.kind = GraphNode::Kind::header;
                    syn.label = std::to_string(r - layout.col_band_depth);
                    syn.axis = Axis::row;
                    graph.nodes.push_back(syn);
                    graph.edges.push_back({graph.root_id, syn.id, EdgeKind::has_row_header});
                    it = ordinal_row_nodes.emplace(r, syn.id).first;
                }
                row_node = it->second;
            }
            graph.edges.push_back({row_node, gn.id, EdgeKind::row_describes});
        }
    }
    return graph;
}

namespace {

void preorder_triples(const MetaGraph& graph, Axis axis, std::vector<Triple>& out) {
    const HeaderLayout& layout = graph.layout;
    auto visit = [&](auto&& self, int id) -> void {
        const HeaderNode& node = layout.nodes[static_cast<std::size_t>(id)];
        for (int child : node.children) {
            out.push_back({node.label, std::string(to_string(EdgeKind::has_child)),
                           layout.nodes[static_cast<std::size_t>(child)].label});
            self(self, child);
        }
    };
    for (int root : layout.roots(axis)) {
        visit(visit, root);
    }
}

} // namespace

std::vector<Triple> linearize_triples(const MetaGraph& graph, bool include_data_cells) {
    std::vector<Triple> out;
    const HeaderLayout& layout = graph.layout;
    for (const GraphEdge& edge : graph.edges) {
        if (edge.kind == EdgeKind::has_column_header) {
            out.push_back({"table", std::string(to_string(edge.kind)),
                           graph.nodes[static_cast<std::size_t>(edge.to)].label});
        }
    }
    for (const GraphEdge& edge : graph.edges) {
        if (edge.kind == EdgeKind::has_row_header) {
            out.push_back({"table", std::string(to_string(edge.kind)),
                           graph.nodes[static_cast<std::size_t>(edge.to)].label});
        }
    }
    preorder_triples(graph, Axis::col, out);
    // Cross-axis containment: the column header over a row-band column also
    // parents the row headers anchored in it.
    for (int root : layout.roots(Axis::row)) {
        const HeaderNode& node = layout.nodes[static_cast<std::size_t>(root)];
        int col_leaf = layout.leaf_for(Axis::col, node.anchor_col);
        if (col_leaf >= 0) {
            out.push_back({layout.nodes[static_cast<std::size_t>(col_leaf)].label,
                           std::string(to_string(EdgeKind::has_child)), node.label});
        }
    }
    preorder_triples(graph, Axis::row, out);
    if (include_data_cells) {
        for (const GraphEdge& edge : graph.edges) {
            if (edge.kind == EdgeKind::col_describes || edge.kind == EdgeKind::row_describes) {
                out.push_back({graph.nodes[static_cast<std::size_t>(edge.from)].label,
                               std::string(to_string(edge.kind)),
                               graph.nodes[static_cast<std::size_t>(edge.to)].label});
            }
        }
    }
    return out;
}

std::optional<std::size_t> DataView::index_of(std::string_view descriptor) const {
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
        if (descriptors[i] == descriptor) {
            return i;
        }
    }
    return std::nullopt;
}

std::vector<std::string> DataView::col_descriptors() const {
    return {descriptors.begin() + static_cast<std::ptrdiff_t>(row_descriptor_count),
            descriptors.end()};
}

DataView project_view(const RawGrid& grid, const MetaGraph& graph) {
    const HeaderLayout& layout = graph.layout;
    int d_c = layout.col_band_depth;
    int d_r = layout.row_band_width;
    if (d_c >= grid.rows() || d_r >= grid.cols()) {
        raise(Errc::no_data_region, "no data region to project");
    }

    DataView view;
    view.row_descriptor_count = static_cast<std::size_t>(d_r);
    for (int c = 0; c < grid.cols(); ++c) {
        view.descriptors.push_back(column_descriptor(layout, c));
    }
    // Disambiguate duplicate paths with "#k" suffixes, left to right.
    std::map<std::string, int> totals;
    for (const std::string& d : view.descriptors) {
        ++totals[d];
    }
    std::map<std::string, int> counters;
    for (std::string& d : view.descriptors) {
        if (totals[d] > 1) {
            d += "#" + std::to_string(++counters[d]);
        }
    }

    for (int r = d_c; r < grid.rows(); ++r) {
        ViewRecord record;
        if (d_r > 0) {
            for (int c = d_r - 1; c >= 0; --c) {
                record.row_path.push_back(grid.resolve(r, c).value.to_text());
            }
        } else {
            record.row_path.push_back(std::to_string(r - d_c));
        }
        for (int c = 0; c < grid.cols(); ++c) {
            record.values.push_back(grid.resolve(r, c).value);
        }
        view.records.push_back(std::move(record));
    }
    return view;
}

std::string render_meta_digest(const MetaGraph& graph) {
    const HeaderLayout& layout = graph.layout;
    std::vector<std::string> leaves;
    std::vector<std::string> parents;
    std::vector<std::string> bands;
    std::vector<std::string> rowvals;
    for (const HeaderNode& node : layout.nodes) {
        if (node.axis == Axis::col) {
            bool in_band = node.span_end <= layout.row_band_width;
            if (in_band) {
                bands.push_back(node.label);
            } else if (node.children.empty()) {
                leaves.push_back(node.label);
            } else {
                parents.push_back(node.label);
            }
        } else if (!node.parent.has_value()) {
            rowvals.push_back(node.label);
        }
    }
    auto join = [](const std::vector<std::string>& items) {
        std::string out;
        for (const std::string& item : items) {
            if (!out.empty()) {
                out += '|';
            }
            out += item;
        }
        return out;
    };
    return std::format("groupable={}; leaves={}; parents={}; rowvals={}; d={}x{}", join(bands),
                       join(leaves), join(parents), join(rowvals), layout.col_band_depth,
                       layout.row_band_width);
}

} // namespace tre
