#include "tre/opbank.hpp"

#include "tre/error.hpp"

#include <algorithm>
#include <format>
#include <map>

namespace tre {

std::string_view to_string(OperatorKind kind) {
    switch (kind) {
    case OperatorKind::load: return "LOAD";
    case OperatorKind::clean: return "CLEAN";
    case OperatorKind::filter: return "FILTER";
    case OperatorKind::group: return "GROUP";
    case OperatorKind::agg: return "AGG";
    case OperatorKind::join: return "JOIN";
    case OperatorKind::sort: return "SORT";
    case OperatorKind::pivot: return "PIVOT";
    case OperatorKind::limit: return "LIMIT";
    case OperatorKind::derive: return "DERIVE";
    case OperatorKind::chart: return "CHART";
    }
    return "?";
}

OperatorKind operator_kind_from(std::string_view name) {
    static const std::map<std::string_view, OperatorKind> table = {
        {"LOAD", OperatorKind::load},   {"CLEAN", OperatorKind::clean},
        {"FILTER", OperatorKind::filter}, {"GROUP", OperatorKind::group},
        {"AGG", OperatorKind::agg},     {"JOIN", OperatorKind::join},
        {"SORT", OperatorKind::sort},   {"PIVOT", OperatorKind::pivot},
        {"LIMIT", OperatorKind::limit}, {"DERIVE", OperatorKind::derive},
        {"CHART", OperatorKind::chart},
    };
    auto it = table.find(name);
    if (it == table.end()) {
        raise(Errc::invalid_argument, std::format("unknown operator kind '{}'", name));
    }
    return it->second;
}

std::string_view to_string(Comparator cmp) {
    switch (cmp) {
    case Comparator::eq: return "=";
    case Comparator::ne: return "!=";
    case Comparator::lt: return "<";
    case Comparator::le: return "<=";
    case Comparator::gt: return ">";
    case Comparator::ge: return ">=";
    case Comparator::contains: return "~";
    case Comparator::not_null: return "!=null";
    }
    return "?";
}

std::string_view to_string(CleanPolicy policy) {
    switch (policy) {
    case CleanPolicy::drop_null_rows: return "drop_null_rows";
    case CleanPolicy::fill_zero: return "fill_zero";
    case CleanPolicy::coerce_numeric: return "coerce_numeric";
    }
    return "?";
}

std::string_view to_string(AggFn fn) {
    switch (fn) {
    case AggFn::sum: return "sum";
    case AggFn::mean: return "mean";
    case AggFn::min: return "min";
    case AggFn::max: return "max";
    case AggFn::count: return "count";
    }
    return "?";
}

std::string_view to_string(SortDir dir) {
    return dir == SortDir::asc ? "asc" : "desc";
}

std::string_view to_string(ChartKind kind) {
    switch (kind) {
    case ChartKind::pie: return "pie";
    case ChartKind::line: return "line";
    case ChartKind::bar: return "bar";
    case ChartKind::scatter: return "scatter";
    }
    return "?";
}

std::string OperatorInstance::render() const {
    switch (kind) {
    case OperatorKind::load:
        return "LOAD";
    case OperatorKind::clean:
        return std::format("CLEAN({})", to_string(std::get<CleanParams>(params).policy));
    case OperatorKind::filter: {
        const auto& p = std::get<FilterParams>(params);
        if (p.cmp == Comparator::not_null) {
            return std::format("FILTER({}!=null)", p.descriptor);
        }
        return std::format("FILTER({}{}{})", p.descriptor, to_string(p.cmp), p.literal.to_text());
    }
    case OperatorKind::group: {
        const auto& p = std::get<GroupParams>(params);
        std::string keys;
        for (const auto& d : p.descriptors) {
            if (!keys.empty()) {
                keys += ',';
            }
            keys += d;
        }
        return std::format("GROUP({})", keys);
    }
    case OperatorKind::agg: {
        const auto& p = std::get<AggParams>(params);
        return std::format("AGG({},{})", to_string(p.fn), p.measure);
    }
    case OperatorKind::join: {
        const auto& p = std::get<JoinParams>(params);
        return std::format("JOIN({},{}={})", p.right_view, p.left_key, p.right_key);
    }
    case OperatorKind::sort: {
        const auto& p = std::get<SortParams>(params);
        return std::format("SORT({},{})", p.descriptor, to_string(p.dir));
    }
    case OperatorKind::pivot: {
        const auto& p = std::get<PivotParams>(params);
        return std::format("PIVOT({},{},{})", p.row_descriptor, p.col_descriptor, p.measure);
    }
    case OperatorKind::limit:
        return std::format("LIMIT({})", std::get<LimitParams>(params).k);
    case OperatorKind::derive: {
        const auto& p = std::get<DeriveParams>(params);
        return std::format("DERIVE({}={})", p.name, p.expression);
    }
    case OperatorKind::chart: {
        const auto& p = std::get<ChartParams>(params);
        std::string series;
        for (const auto& s : p.series) {
            if (!series.empty()) {
                series += ',';
            }
            series += s;
        }
        return std::format("CHART({},x={},series={})", to_string(p.kind), p.x, series);
    }
    }
    return "?";
}

std::vector<std::string*> OperatorInstance::descriptor_params() {
    std::vector<std::string*> out;
    switch (kind) {
    case OperatorKind::filter:
        out.push_back(&std::get<FilterParams>(params).descriptor);
        break;
    case OperatorKind::group:
        for (auto& d : std::get<GroupParams>(params).descriptors) {
            out.push_back(&d);
        }
        break;
    case OperatorKind::agg:
        out.push_back(&std::get<AggParams>(params).measure);
        break;
    case OperatorKind::join: {
        auto& p = std::get<JoinParams>(params);
        out.push_back(&p.left_key);
        break;
    }
    case OperatorKind::sort:
        out.push_back(&std::get<SortParams>(params).descriptor);
        break;
    case OperatorKind::pivot: {
        auto& p = std::get<PivotParams>(params);
        out.push_back(&p.row_descriptor);
        out.push_back(&p.col_descriptor);
        out.push_back(&p.measure);
        break;
    }
    case OperatorKind::chart: {
        auto& p = std::get<ChartParams>(params);
        out.push_back(&p.x);
        for (auto& s : p.series) {
            out.push_back(&s);
        }
        break;
    }
    default:
        break;
    }
    return out;
}

std::vector<const std::string*> OperatorInstance::descriptor_params() const {
    auto mutable_view = const_cast<OperatorInstance*>(this)->descriptor_params();
    return {mutable_view.begin(), mutable_view.end()};
}

OperatorInstance make_load() {
    OperatorInstance op;
    op.kind = OperatorKind::load;
    op.params = LoadParams{};
    return op;
}

std::string render_signature(const std::vector<OperatorInstance>& ops) {
    std::string out;
    for (const OperatorInstance& op : ops) {
        if (!out.empty()) {
            out += "→"; // →
        }
        out += op.render();
    }
    return out;
}

Path Path::of(std::vector<OperatorInstance> ops) {
    Path path;
    path.signature = render_signature(ops);
    path.ops = std::move(ops);
    return path;
}

std::vector<OperatorContract> seed_bank() {
    std::vector<OperatorContract> bank;
    auto add = [&](OperatorKind kind, std::string in, std::string out,
                   std::vector<std::string> prereqs, bool initial, bool terminal) {
        bank.push_back({kind, std::move(in), std::move(out), std::move(prereqs), initial,
                        terminal});
    };
    add(OperatorKind::load, "table document", "record view", {}, true, false);
    add(OperatorKind::clean, "record view", "record view", {}, false, false);
    add(OperatorKind::filter, "record view", "record view (subset)", {}, false, false);
    add(OperatorKind::group, "record view", "grouped view", {}, false, false);
    add(OperatorKind::agg, "record view or grouped view", "scalar or grouped scalars",
        {"grouping scope in effect, or whole-view scope"}, false, false);
    add(OperatorKind::join, "record view", "record view", {"auxiliary view bound by name"},
        false, false);
    add(OperatorKind::sort, "record view", "record view (reordered)", {}, false, false);
    add(OperatorKind::pivot, "record view", "record view (reshaped)",
        {"unique (row, col) key pairs"}, false, false);
    add(OperatorKind::limit, "record view", "record view (prefix)", {}, false, false);
    add(OperatorKind::derive, "record view", "record view (extra column)", {}, false, false);
    add(OperatorKind::chart, "record view", "chart specification", {}, false, true);
    return bank;
}

OperationMap build_operation_map(const std::vector<OperatorInstance>& instances) {
    if (instances.empty()) {
        raise(Errc::invalid_argument, "no operator instances");
    }
    OperationMap map;
    map.nodes = instances;
    int n = static_cast<int>(instances.size());
    auto kind_of = [&](int i) { return instances[static_cast<std::size_t>(i)].kind; };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            OperatorKind a = kind_of(i);
            OperatorKind b = kind_of(j);
            bool edge = false;
            if (a == OperatorKind::load && b != OperatorKind::load) {
                edge = true;
            } else if (a == OperatorKind::group && b == OperatorKind::agg) {
                edge = true;
            } else if (a == OperatorKind::agg && b == OperatorKind::limit) {
                edge = true;
            } else if (b == OperatorKind::chart && a != OperatorKind::chart) {
                edge = true;
            } else if (a == OperatorKind::clean &&
                       (b == OperatorKind::agg || b == OperatorKind::derive ||
                        b == OperatorKind::sort)) {
                edge = true;
            }
            if (edge) {
                map.must_precede.insert({i, j});
            }
        }
    }
    // The fixed rule set cannot produce a cycle, but guard anyway.
    std::vector<int> indegree(static_cast<std::size_t>(n), 0);
    for (const auto& [from, to] : map.must_precede) {
        ++indegree[static_cast<std::size_t>(to)];
    }
    std::vector<int> queue;
    for (int i = 0; i < n; ++i) {
        if (indegree[static_cast<std::size_t>(i)] == 0) {
            queue.push_back(i);
        }
    }
    int seen = 0;
    while (!queue.empty()) {
        int cur = queue.back();
        queue.pop_back();
        ++seen;
        for (const auto& [from, to] : map.must_precede) {
            if (from == cur && --indegree[static_cast<std::size_t>(to)] == 0) {
                queue.push_back(to);
            }
        }
    }
    if (seen != n) {
        raise(Errc::cyclic_constraints, "operation map constraints are cyclic");
    }
    return map;
}

bool respects_map(const std::vector<OperatorInstance>& ops, const OperationMap& map) {
    if (ops.size() != map.nodes.size()) {
        return false;
    }
    // Match path positions back to map nodes by rendered text, consuming
    // duplicates left to right.
    std::vector<int> position(map.nodes.size(), -1);
    std::vector<bool> used(ops.size(), false);
    for (std::size_t node = 0; node < map.nodes.size(); ++node) {
        std::string rendered = map.nodes[node].render();
        bool found = false;
        for (std::size_t pos = 0; pos < ops.size(); ++pos) {
            if (!used[pos] && ops[pos].render() == rendered) {
                position[node] = static_cast<int>(pos);
                used[pos] = true;
                found = true;
                break;
            }
        }
        if (!found) {
            return false;
        }
    }
    for (const auto& [from, to] : map.must_precede) {
        if (position[static_cast<std::size_t>(from)] >= position[static_cast<std::size_t>(to)]) {
            return false;
        }
    }
    return true;
}

namespace {

void enumerate_orders(const OperationMap& map, std::vector<int>& order,
                      std::vector<bool>& used, std::vector<Path>& out) {
    std::size_t n = map.nodes.size();
    if (order.size() == n) {
        std::vector<OperatorInstance> ops;
        ops.reserve(n);
        for (int idx : order) {
            ops.push_back(map.nodes[static_cast<std::size_t>(idx)]);
        }
        out.push_back(Path::of(std::move(ops)));
        return;
    }
    for (int i = 0; i < static_cast<int>(n); ++i) {
        if (used[static_cast<std::size_t>(i)]) {
            continue;
        }
        bool ready = true;
        for (const auto& [from, to] : map.must_precede) {
            if (to == i && !used[static_cast<std::size_t>(from)]) {
                ready = false;
                break;
            }
        }
        if (!ready) {
            continue;
        }
        // Redundancy rule: adjacent duplicate kinds never help.
        if (!order.empty() &&
            map.nodes[static_cast<std::size_t>(order.back())].kind ==
                map.nodes[static_cast<std::size_t>(i)].kind) {
            continue;
        }
        used[static_cast<std::size_t>(i)] = true;
        order.push_back(i);
        enumerate_orders(map, order, used, out);
        order.pop_back();
        used[static_cast<std::size_t>(i)] = false;
    }
}

} // namespace

std::vector<Path> enumerate_paths(const OperationMap& map, int max_candidates,
                                  int max_path_length) {
    if (max_candidates < 1) {
        raise(Errc::invalid_argument, "max_candidates must be >= 1");
    }
    if (map.nodes.empty()) {
        raise(Errc::no_valid_order, "empty operation map");
    }
    if (static_cast<int>(map.nodes.size()) > max_path_length) {
        raise(Errc::invalid_argument,
              std::format("{} instances exceed max path length {}", map.nodes.size(),
                          max_path_length));
    }
    if (map.nodes.size() > 10) {
        raise(Errc::invalid_argument, "operation map too large to enumerate");
    }
    std::vector<Path> all;
    std::vector<int> order;
    std::vector<bool> used(map.nodes.size(), false);
    enumerate_orders(map, order, used, all);
    std::sort(all.begin(), all.end(),
              [](const Path& a, const Path& b) { return a.signature < b.signature; });
    all.erase(std::unique(all.begin(), all.end(),
                          [](const Path& a, const Path& b) { return a.signature == b.signature; }),
              all.end());
    if (all.empty()) {
        raise(Errc::no_valid_order, "all orders pruned");
    }
    if (static_cast<int>(all.size()) > max_candidates) {
        all.resize(static_cast<std::size_t>(max_candidates));
    }
    return all;
}

} // namespace tre
