#include "tre/select.hpp"

#include "tre/error.hpp"

#include <algorithm>
#include <format>
#include <map>
#include <set>

namespace tre {

TripleVocabulary TripleVocabulary::from(const std::vector<Triple>& triples) {
    TripleVocabulary vocab;
    std::set<std::string> row_labels;
    std::vector<std::string> col_roots;
    std::multimap<std::string, std::string> children;
    for (const Triple& t : triples) {
        if (t.relation == "has_row_header") {
            row_labels.insert(t.object);
        } else if (t.relation == "has_column_header") {
            col_roots.push_back(t.object);
        } else if (t.relation == "has_child") {
            children.emplace(t.subject, t.object);
        }
    }
    // Expand root-to-leaf paths; children that are row labels mark their
    // parent as a row-band descriptor instead of extending the path.
    auto expand = [&](auto&& self, const std::string& label, const std::string& prefix) -> void {
        std::string path = prefix.empty() ? label : prefix + "/" + label;
        auto [begin, end] = children.equal_range(label);
        bool has_col_child = false;
        for (auto it = begin; it != end; ++it) {
            if (row_labels.contains(it->second)) {
                vocab.band_descriptors.push_back(path);
                vocab.row_values.emplace_back(it->second, path);
            } else {
                has_col_child = true;
                self(self, it->second, path);
            }
        }
        if (!has_col_child) {
            vocab.paths.push_back(path);
        }
    };
    for (const std::string& root : col_roots) {
        expand(expand, root, "");
    }
    // Row labels without a covering column header still resolve, with an
    // empty band descriptor.
    for (const std::string& label : row_labels) {
        bool known = std::any_of(vocab.row_values.begin(), vocab.row_values.end(),
                                 [&](const auto& rv) { return rv.first == label; });
        if (!known) {
            vocab.row_values.emplace_back(label, "");
        }
    }
    return vocab;
}

std::string TripleVocabulary::resolve_column(std::string_view token) const {
    if (token.empty()) {
        return "";
    }
    for (const std::string& path : paths) {
        if (path == token) {
            return path;
        }
    }
    for (const std::string& band : band_descriptors) {
        if (band == token) {
            return band;
        }
    }
    // Unique match against the leaf label (the last path segment).
    std::string found;
    int hits = 0;
    auto try_pool = [&](const std::vector<std::string>& pool) {
        for (const std::string& path : pool) {
            std::size_t slash = path.rfind('/');
            std::string_view leaf =
                slash == std::string::npos ? std::string_view(path)
                                           : std::string_view(path).substr(slash + 1);
            if (label_token_match(leaf, token)) {
                ++hits;
                found = path;
            }
        }
    };
    try_pool(paths);
    if (hits == 0) {
        try_pool(band_descriptors);
    }
    return hits == 1 ? found : "";
}

std::optional<std::pair<std::string, std::string>> TripleVocabulary::resolve_row_value(
    std::string_view token) const {
    for (const auto& [label, band] : row_values) {
        if (label_token_match(label, token)) {
            return std::make_pair(band, label);
        }
    }
    return std::nullopt;
}

namespace {

std::optional<OperatorInstance> build_instance(const OpChoice& choice,
                                               const TripleVocabulary& vocab,
                                               std::string& problem) {
    OperatorInstance instance;
    instance.kind = choice.kind;
    switch (choice.kind) {
    case OperatorKind::load:
        instance.params = LoadParams{};
        return instance;
    case OperatorKind::clean: {
        CleanParams p;
        std::string policy = choice.param("policy").value_or("drop_null_rows");
        if (policy == "fill_zero") {
            p.policy = CleanPolicy::fill_zero;
        } else if (policy == "coerce_numeric") {
            p.policy = CleanPolicy::coerce_numeric;
        } else {
            p.policy = CleanPolicy::drop_null_rows;
        }
        instance.params = p;
        return instance;
    }
    case OperatorKind::filter: {
        FilterParams p;
        std::string token = choice.param("descriptor").value_or("");
        if (choice.param("mode").value_or("") == "scope") {
            p.descriptor = vocab.resolve_column(token);
            if (p.descriptor.empty()) {
                problem = std::format("filter scope '{}' not in vocabulary", token);
                return std::nullopt;
            }
            p.cmp = Comparator::not_null;
            instance.params = p;
            return instance;
        }
        std::string value = choice.param("value").value_or("");
        auto row = vocab.resolve_row_value(value);
        std::string column = vocab.resolve_column(token);
        if (row.has_value() && (column.empty() || !row->first.empty())) {
            p.descriptor = row->first.empty() ? column : row->first;
            if (p.descriptor.empty()) {
                problem = std::format("no band descriptor for row value '{}'", value);
                return std::nullopt;
            }
            p.literal = CellValue::text(row->second);
        } else if (!column.empty()) {
            p.descriptor = column;
            p.literal = infer_value(value);
        } else {
            problem = std::format("filter descriptor '{}' not in vocabulary", token);
            return std::nullopt;
        }
        std::string op = choice.param("op").value_or("eq");
        static const std::map<std::string, Comparator> cmps = {
            {"eq", Comparator::eq}, {"ne", Comparator::ne}, {"lt", Comparator::lt},
            {"le", Comparator::le}, {"gt", Comparator::gt}, {"ge", Comparator::ge},
            {"contains", Comparator::contains}};
        auto it = cmps.find(op);
        p.cmp = it == cmps.end() ? Comparator::eq : it->second;
        instance.params = p;
        return instance;
    }
    case OperatorKind::group: {
        GroupParams p;
        std::string token = choice.param("by").value_or("");
        std::string descriptor = vocab.resolve_column(token);
        if (descriptor.empty()) {
            problem = std::format("group key '{}' not in vocabulary", token);
            return std::nullopt;
        }
        p.descriptors = {descriptor};
        instance.params = p;
        return instance;
    }
    case OperatorKind::agg: {
        AggParams p;
        std::string fn = choice.param("fn").value_or("sum");
        if (fn == "mean") {
            p.fn = AggFn::mean;
        } else if (fn == "min") {
            p.fn = AggFn::min;
        } else if (fn == "max") {
            p.fn = AggFn::max;
        } else if (fn == "count") {
            p.fn = AggFn::count;
        } else {
            p.fn = AggFn::sum;
        }
        std::string token = choice.param("measure").value_or("");
        p.measure = vocab.resolve_column(token);
        if (p.measure.empty()) {
            problem = std::format("measure '{}' not in vocabulary", token);
            return std::nullopt;
        }
        instance.params = p;
        return instance;
    }
    case OperatorKind::sort: {
        SortParams p;
        p.dir = choice.param("dir").value_or("desc") == "asc" ? SortDir::asc : SortDir::desc;
        std::string token = choice.param("by").value_or("");
        if (token.empty()) {
            p.descriptor = vocab.paths.empty() ? "" : vocab.paths.front();
        } else {
            p.descriptor = vocab.resolve_column(token);
        }
        if (p.descriptor.empty()) {
            problem = std::format("sort key '{}' not in vocabulary", token);
            return std::nullopt;
        }
        instance.params = p;
        return instance;
    }
    case OperatorKind::limit: {
        LimitParams p;
        std::string k = choice.param("k").value_or("1");
        try {
            p.k = std::stoll(k);
        } catch (const std::exception&) {
            problem = std::format("bad limit '{}'", k);
            return std::nullopt;
        }
        if (p.k < 1) {
            problem = std::format("bad limit '{}'", k);
            return std::nullopt;
        }
        instance.params = p;
        return instance;
    }
    case OperatorKind::chart: {
        ChartParams p;
        std::string kind = choice.param("kind").value_or("bar");
        if (kind == "pie") {
            p.kind = ChartKind::pie;
        } else if (kind == "line") {
            p.kind = ChartKind::line;
        } else if (kind == "scatter") {
            p.kind = ChartKind::scatter;
        } else {
            p.kind = ChartKind::bar;
        }
        std::string x_token = choice.param("x").value_or("");
        p.x = vocab.resolve_column(x_token);
        if (p.x.empty()) {
            problem = std::format("chart x '{}' not in vocabulary", x_token);
            return std::nullopt;
        }
        std::string series = choice.param("series").value_or("");
        std::size_t start = 0;
        while (start <= series.size() && !series.empty()) {
            std::size_t comma = series.find(',', start);
            std::string token(trim(std::string_view(series).substr(
                start, comma == std::string::npos ? std::string::npos : comma - start)));
            std::string resolved = vocab.resolve_column(token);
            if (!resolved.empty()) {
                p.series.push_back(resolved);
            }
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (p.series.empty()) {
            problem = std::format("no chart series resolved from '{}'", series);
            return std::nullopt;
        }
        instance.params = p;
        return instance;
    }
    case OperatorKind::derive: {
        DeriveParams p;
        p.name = choice.param("name").value_or("derived");
        p.expression = choice.param("expr").value_or("");
        if (p.expression.empty()) {
            problem = "derive without expression";
            return std::nullopt;
        }
        instance.params = p;
        return instance;
    }
    case OperatorKind::join:
    case OperatorKind::pivot:
        // The mock never proposes these; remote suggestions would need an
        // auxiliary view the engine has not bound, so drop them.
        problem = std::format("{} not supported in agent selections", to_string(choice.kind));
        return std::nullopt;
    }
    problem = "unhandled kind";
    return std::nullopt;
}

} // namespace

SelectionResult select_operations(Provider& provider, const std::vector<std::string>& subqueries,
                                  const std::vector<Triple>& triples, CallBudget& budget) {
    if (subqueries.empty()) {
        raise(Errc::invalid_argument, "need at least one subquery");
    }
    if (triples.empty()) {
        raise(Errc::invalid_argument, "need a non-empty triple list");
    }
    AgentResponse response = call(provider, ChooseOpsRequest{subqueries, triples}, budget);
    const auto* choices = std::get_if<OpChoicesResponse>(&response);
    if (choices == nullptr) {
        raise(Errc::agent_protocol, "expected op choices");
    }
    TripleVocabulary vocab = TripleVocabulary::from(triples);
    SelectionResult result;
    for (const OpChoice& choice : choices->items) {
        std::string problem;
        if (auto instance = build_instance(choice, vocab, problem)) {
            result.instances.push_back(std::move(*instance));
        } else {
            result.warnings.push_back(std::move(problem));
        }
    }
    if (result.instances.empty()) {
        raise(Errc::empty_selection, "every suggested operation was dropped");
    }
    return result;
}

} // namespace tre
