#pragma once

#include "tre/cell_value.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tre {

enum class OperatorKind { load, clean, filter, group, agg, join, sort, pivot, limit, derive, chart };

std::string_view to_string(OperatorKind kind);
OperatorKind operator_kind_from(std::string_view name);

enum class Comparator { eq, ne, lt, le, gt, ge, contains, not_null };
enum class CleanPolicy { drop_null_rows, fill_zero, coerce_numeric };
enum class AggFn { sum, mean, min, max, count };
enum class SortDir { asc, desc };
enum class ChartKind { pie, line, bar, scatter };

std::string_view to_string(Comparator cmp);
std::string_view to_string(CleanPolicy policy);
std::string_view to_string(AggFn fn);
std::string_view to_string(SortDir dir);
std::string_view to_string(ChartKind kind);

struct LoadParams {};
struct CleanParams {
    CleanPolicy policy = CleanPolicy::drop_null_rows;
};
struct FilterParams {
    std::string descriptor;
    Comparator cmp = Comparator::eq;
    CellValue literal;
};
struct GroupParams {
    std::vector<std::string> descriptors;
};
struct AggParams {
    AggFn fn = AggFn::sum;
    std::string measure;
};
struct JoinParams {
    std::string right_view; // name bound in the execution state
    std::string left_key;
    std::string right_key;
};
struct SortParams {
    std::string descriptor;
    SortDir dir = SortDir::desc;
};
struct PivotParams {
    std::string row_descriptor;
    std::string col_descriptor;
    std::string measure;
};
struct LimitParams {
    std::int64_t k = 1;
};
struct DeriveParams {
    std::string name;
    std::string expression; // arithmetic over `backtick-quoted` descriptors
};
struct ChartParams {
    ChartKind kind = ChartKind::bar;
    std::string x;
    std::vector<std::string> series;
};

/// One concrete operator with kind-specific parameters. Descriptor params
/// reference DataView descriptors by exact path string.
struct OperatorInstance {
    OperatorKind kind = OperatorKind::load;
    std::variant<LoadParams, CleanParams, FilterParams, GroupParams, AggParams, JoinParams,
                 SortParams, PivotParams, LimitParams, DeriveParams, ChartParams>
        params;

    std::string render() const;
    /// Every descriptor-valued parameter, mutable (for experience remaps).
    std::vector<std::string*> descriptor_params();
    std::vector<const std::string*> descriptor_params() const;
};

OperatorInstance make_load();

/// Dependency DAG over operator instances; topological orders are the
/// candidate paths.
struct OperationMap {
    std::vector<OperatorInstance> nodes;
    std::set<std::pair<int, int>> must_precede;
};

/// An ordered operator sequence with its canonical signature
/// ("LOAD→FILTER(Region=North)→…"); signatures are injective over op lists.
struct Path {
    std::vector<OperatorInstance> ops;
    std::string signature;

    static Path of(std::vector<OperatorInstance> ops);
};

std::string render_signature(const std::vector<OperatorInstance>& ops);

/// Machine-readable contract for one bank entry.
struct OperatorContract {
    OperatorKind kind;
    std::string input_shape;
    std::string output_shape;
    std::vector<std::string> prerequisites;
    bool initial = false;
    bool terminal = false;
};

/// The 11-kind seed operation bank.
std::vector<OperatorContract> seed_bank();

/// Fixed precedence rules: LOAD first, GROUP before AGG, AGG before LIMIT,
/// CHART last, CLEAN before AGG/DERIVE/SORT. FILTER stays unconstrained
/// relative to grouping and aggregation.
OperationMap build_operation_map(const std::vector<OperatorInstance>& instances);

/// Up to `max_candidates` full topological orders, deduplicated, orders with
/// adjacent duplicate kinds pruned, sorted lexicographically by signature.
std::vector<Path> enumerate_paths(const OperationMap& map, int max_candidates,
                                  int max_path_length);

/// True when `ops` is a topological order of `map` (matching by rendered op).
bool respects_map(const std::vector<OperatorInstance>& ops, const OperationMap& map);

} // namespace tre
