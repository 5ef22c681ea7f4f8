#include "tre/executor.hpp"

#include "tre/error.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <format>

namespace tre {

Outcome Outcome::scalar(CellValue value) {
    Outcome o;
    o.payload_ = std::move(value);
    return o;
}

Outcome Outcome::records(DataView view) {
    Outcome o;
    o.payload_ = std::move(view);
    return o;
}

Outcome Outcome::grouped(GroupedValue value) {
    Outcome o;
    o.payload_ = std::move(value);
    return o;
}

Outcome Outcome::chart(ChartSpec spec) {
    Outcome o;
    o.payload_ = std::move(spec);
    return o;
}

std::string Outcome::digest() const {
    switch (kind()) {
    case Kind::scalar:
        return "scalar:" + as_scalar().to_text();
    case Kind::records:
        return std::format("records:{}", as_records().records.size());
    case Kind::grouped:
        return std::format("grouped:{}", as_grouped().entries.size());
    case Kind::chart:
        return std::format("chart:{}", to_string(as_chart().kind));
    }
    return "?";
}

std::string render_trace(const std::vector<StepTrace>& trace) {
    std::string out;
    for (const StepTrace& step : trace) {
        if (step.flag == StepFlag::think) {
            out += std::format("[THINK] {}\n", step.content);
        } else {
            out += std::format("[CODE] {} ⇒ {}\n", step.content, step.outcome_digest);
        }
    }
    return out;
}

WallClock::WallClock()
    : last_ns_(std::chrono::duration_cast<std::chrono::nanoseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
                   .count()) {}

double WallClock::lap() {
    auto now = std::chrono::duration_cast<std::chrono::nanoseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
                   .count();
    double seconds = static_cast<double>(now - last_ns_) / 1e9;
    last_ns_ = now;
    return std::max(seconds, 1e-9); // f_time stays strictly positive
}

namespace {

enum class Family { null, numeric, text, temporal, boolean };

Family family_of(const CellValue& v) {
    switch (v.kind()) {
    case ValueKind::null: return Family::null;
    case ValueKind::integer:
    case ValueKind::real: return Family::numeric;
    case ValueKind::text: return Family::text;
    case ValueKind::temporal: return Family::temporal;
    case ValueKind::boolean: return Family::boolean;
    }
    return Family::null;
}

// Three-way comparison within one family; throws on cross-family use.
int compare_values(const CellValue& a, const CellValue& b) {
    Family fa = family_of(a);
    Family fb = family_of(b);
    if (fa != fb) {
        raise(Errc::type_mismatch,
              std::format("cannot compare {} with {}", to_string(a.kind()), to_string(b.kind())));
    }
    switch (fa) {
    case Family::numeric: {
        if (a.kind() == ValueKind::integer && b.kind() == ValueKind::integer) {
            auto x = a.as_integer();
            auto y = b.as_integer();
            return x < y ? -1 : (x > y ? 1 : 0);
        }
        double x = a.as_real();
        double y = b.as_real();
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    case Family::text: {
        int c = a.as_text().compare(b.as_text());
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Family::temporal: {
        int c = a.as_temporal().iso.compare(b.as_temporal().iso);
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Family::boolean: {
        int x = a.as_bool() ? 1 : 0;
        int y = b.as_bool() ? 1 : 0;
        return x - y;
    }
    case Family::null:
        return 0;
    }
    return 0;
}

bool filter_matches(const CellValue& value, Comparator cmp, const CellValue& literal) {
    if (cmp == Comparator::not_null) {
        return !value.is_null();
    }
    if (value.is_null()) {
        return false; // Null never satisfies any comparator
    }
    if (cmp == Comparator::contains) {
        if (value.kind() != ValueKind::text || literal.kind() != ValueKind::text) {
            raise(Errc::type_mismatch, "contains requires text operands");
        }
        return value.as_text().find(literal.as_text()) != std::string::npos;
    }
    int c = compare_values(value, literal);
    switch (cmp) {
    case Comparator::eq: return c == 0;
    case Comparator::ne: return c != 0;
    case Comparator::lt: return c < 0;
    case Comparator::le: return c <= 0;
    case Comparator::gt: return c > 0;
    case Comparator::ge: return c >= 0;
    default: return false;
    }
}

std::size_t resolve_descriptor(const DataView& view, const std::string& descriptor) {
    if (auto idx = view.index_of(descriptor)) {
        return *idx;
    }
    raise(Errc::unknown_descriptor, descriptor);
}

std::string join_keys(const std::vector<CellValue>& values) {
    std::string out;
    for (const CellValue& v : values) {
        if (!out.empty()) {
            out += '/';
        }
        out += v.to_text();
    }
    return out;
}

// Grouping snapshots key order; membership is recomputed against the current
// records so FILTER/SORT between GROUP and AGG stay coherent.
Grouping partition(const DataView& view, const std::vector<std::string>& key_descriptors) {
    Grouping grouping;
    grouping.key_descriptors = key_descriptors;
    std::vector<std::size_t> key_idx;
    key_idx.reserve(key_descriptors.size());
    for (const std::string& d : key_descriptors) {
        key_idx.push_back(resolve_descriptor(view, d));
    }
    for (std::size_t r = 0; r < view.records.size(); ++r) {
        std::vector<CellValue> key;
        key.reserve(key_idx.size());
        for (std::size_t idx : key_idx) {
            key.push_back(view.records[r].values[idx]);
        }
        std::string rendered = join_keys(key);
        auto it = std::find_if(grouping.groups.begin(), grouping.groups.end(),
                               [&](const auto& g) { return g.first == rendered; });
        if (it == grouping.groups.end()) {
            grouping.groups.push_back({rendered, {r}});
        } else {
            it->second.push_back(r);
        }
    }
    return grouping;
}

void refresh_groups(ExecState& state) {
    if (state.groups.has_value()) {
        state.groups = partition(state.view, state.groups->key_descriptors);
    }
}

CellValue aggregate(AggFn fn, const std::vector<CellValue>& values) {
    std::vector<const CellValue*> present;
    for (const CellValue& v : values) {
        if (!v.is_null()) {
            present.push_back(&v);
        }
    }
    switch (fn) {
    case AggFn::count:
        return CellValue::integer(static_cast<std::int64_t>(present.size()));
    case AggFn::sum: {
        bool all_integer = true;
        double total = 0.0;
        std::int64_t itotal = 0;
        std::optional<std::string> unit;
        bool unit_consistent = true;
        for (const CellValue* v : present) {
            if (!v->is_numeric()) {
                raise(Errc::type_mismatch, std::format("sum over {}", to_string(v->kind())));
            }
            if (v->kind() == ValueKind::integer) {
                itotal += v->as_integer();
            } else {
                all_integer = false;
            }
            total += v->as_real();
            if (present.front()->unit() != v->unit()) {
                unit_consistent = false;
            }
        }
        std::optional<std::string> out_unit =
            (!present.empty() && unit_consistent) ? present.front()->unit() : std::nullopt;
        if (all_integer) {
            CellValue out = CellValue::integer(itotal);
            out.set_unit(out_unit);
            return out;
        }
        return CellValue::real(total, out_unit);
    }
    case AggFn::mean: {
        if (present.empty()) {
            raise(Errc::empty_aggregate, "mean of zero non-null values");
        }
        double total = 0.0;
        for (const CellValue* v : present) {
            if (!v->is_numeric()) {
                raise(Errc::type_mismatch, std::format("mean over {}", to_string(v->kind())));
            }
            total += v->as_real();
        }
        return CellValue::real(total / static_cast<double>(present.size()));
    }
    case AggFn::min:
    case AggFn::max: {
        if (present.empty()) {
            raise(Errc::empty_aggregate,
                  std::format("{} of zero non-null values", to_string(fn)));
        }
        const CellValue* best = present.front();
        for (const CellValue* v : present) {
            int c = compare_values(*v, *best);
            if ((fn == AggFn::min && c < 0) || (fn == AggFn::max && c > 0)) {
                best = v;
            }
        }
        return *best;
    }
    }
    raise(Errc::invalid_argument, "unknown aggregate function");
}

// Arithmetic over `backtick-quoted` descriptors and numeric literals. Null
// operands (and division by zero) yield Null.
class DeriveEvaluator {
  public:
    DeriveEvaluator(std::string_view expression, const DataView& view)
        : expr_(expression), view_(view) {}

    CellValue evaluate(const ViewRecord& record) {
        record_ = &record;
        pos_ = 0;
        CellValue result = parse_expression();
        skip_space();
        if (pos_ != expr_.size()) {
            raise(Errc::invalid_argument,
                  std::format("trailing characters in expression '{}'", expr_));
        }
        return result;
    }

  private:
    void skip_space() {
        while (pos_ < expr_.size() && expr_[pos_] == ' ') {
            ++pos_;
        }
    }

    bool eat(char c) {
        skip_space();
        if (pos_ < expr_.size() && expr_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    CellValue parse_expression() {
        CellValue left = parse_term();
        for (;;) {
            if (eat('+')) {
                left = apply(left, parse_term(), '+');
            } else if (eat('-')) {
                left = apply(left, parse_term(), '-');
            } else {
                return left;
            }
        }
    }

    CellValue parse_term() {
        CellValue left = parse_factor();
        for (;;) {
            if (eat('*')) {
                left = apply(left, parse_factor(), '*');
            } else if (eat('/')) {
                left = apply(left, parse_factor(), '/');
            } else {
                return left;
            }
        }
    }

    CellValue parse_factor() {
        skip_space();
        if (eat('(')) {
            CellValue inner = parse_expression();
            if (!eat(')')) {
                raise(Errc::invalid_argument, std::format("unbalanced parens in '{}'", expr_));
            }
            return inner;
        }
        if (pos_ < expr_.size() && expr_[pos_] == '`') {
            std::size_t end = expr_.find('`', pos_ + 1);
            if (end == std::string_view::npos) {
                raise(Errc::invalid_argument, std::format("unterminated descriptor in '{}'", expr_));
            }
            std::string descriptor(expr_.substr(pos_ + 1, end - pos_ - 1));
            pos_ = end + 1;
            std::size_t idx = resolve_descriptor(view_, descriptor);
            const CellValue& v = record_->values[idx];
            if (v.is_null()) {
                return CellValue::null();
            }
            if (!v.is_numeric()) {
                raise(Errc::type_mismatch,
                      std::format("descriptor '{}' is {}", descriptor, to_string(v.kind())));
            }
            return v;
        }
        std::size_t start = pos_;
        if (pos_ < expr_.size() && (expr_[pos_] == '-' || expr_[pos_] == '+')) {
            ++pos_;
        }
        while (pos_ < expr_.size() &&
               (std::isdigit(static_cast<unsigned char>(expr_[pos_])) || expr_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ == start) {
            raise(Errc::invalid_argument, std::format("bad token in expression '{}'", expr_));
        }
        CellValue v = infer_value(expr_.substr(start, pos_ - start));
        if (!v.is_numeric()) {
            raise(Errc::invalid_argument, std::format("bad numeric literal in '{}'", expr_));
        }
        return v;
    }

    static CellValue apply(const CellValue& a, const CellValue& b, char op) {
        if (a.is_null() || b.is_null()) {
            return CellValue::null();
        }
        bool integral = a.kind() == ValueKind::integer && b.kind() == ValueKind::integer &&
                        op != '/';
        if (integral) {
            std::int64_t x = a.as_integer();
            std::int64_t y = b.as_integer();
            switch (op) {
            case '+': return CellValue::integer(x + y);
            case '-': return CellValue::integer(x - y);
            case '*': return CellValue::integer(x * y);
            }
        }
        double x = a.as_real();
        double y = b.as_real();
        switch (op) {
        case '+': return CellValue::real(x + y);
        case '-': return CellValue::real(x - y);
        case '*': return CellValue::real(x * y);
        case '/':
            if (y == 0.0) {
                return CellValue::null();
            }
            return CellValue::real(x / y);
        }
        raise(Errc::invalid_argument, "unknown operator");
    }

    std::string_view expr_;
    const DataView& view_;
    const ViewRecord* record_ = nullptr;
    std::size_t pos_ = 0;
};

void check_family_consistency(const DataView& view, std::size_t idx) {
    Family seen = Family::null;
    for (const ViewRecord& record : view.records) {
        const CellValue& v = record.values[idx];
        if (v.is_null()) {
            continue;
        }
        Family f = family_of(v);
        if (seen == Family::null) {
            seen = f;
        } else if (seen != f) {
            raise(Errc::type_mismatch,
                  std::format("column '{}' mixes {} values", view.descriptors[idx],
                              to_string(v.kind())));
        }
    }
}

} // namespace

ExecState apply_operator(const OperatorInstance& op, ExecState state) {
    if (state.terminal) {
        raise(Errc::terminal_state, "no operator may follow CHART");
    }
    switch (op.kind) {
    case OperatorKind::load:
        // The view is bound when execution starts; LOAD is the identity then.
        state.last_outcome = Outcome::records(state.view);
        break;
    case OperatorKind::clean: {
        const auto& p = std::get<CleanParams>(op.params);
        switch (p.policy) {
        case CleanPolicy::drop_null_rows: {
            std::vector<ViewRecord> kept;
            for (ViewRecord& record : state.view.records) {
                bool has_null = std::any_of(record.values.begin(), record.values.end(),
                                            [](const CellValue& v) { return v.is_null(); });
                if (!has_null) {
                    kept.push_back(std::move(record));
                }
            }
            state.view.records = std::move(kept);
            break;
        }
        case CleanPolicy::fill_zero: {
            for (std::size_t c = 0; c < state.view.descriptors.size(); ++c) {
                bool numeric = false;
                bool consistent = true;
                for (const ViewRecord& record : state.view.records) {
                    const CellValue& v = record.values[c];
                    if (v.is_null()) {
                        continue;
                    }
                    if (v.is_numeric()) {
                        numeric = true;
                    } else {
                        consistent = false;
                    }
                }
                if (!numeric || !consistent) {
                    continue;
                }
                for (ViewRecord& record : state.view.records) {
                    if (record.values[c].is_null()) {
                        record.values[c] = CellValue::integer(0);
                    }
                }
            }
            break;
        }
        case CleanPolicy::coerce_numeric: {
            for (ViewRecord& record : state.view.records) {
                for (CellValue& v : record.values) {
                    if (v.kind() == ValueKind::text) {
                        CellValue coerced = infer_value(v.as_text());
                        if (coerced.is_numeric()) {
                            v = std::move(coerced);
                        }
                    }
                }
            }
            break;
        }
        }
        refresh_groups(state);
        state.last_outcome = Outcome::records(state.view);
        break;
    }
    case OperatorKind::filter: {
        const auto& p = std::get<FilterParams>(op.params);
        std::size_t idx = resolve_descriptor(state.view, p.descriptor);
        std::vector<ViewRecord> kept;
        for (ViewRecord& record : state.view.records) {
            if (filter_matches(record.values[idx], p.cmp, p.literal)) {
                kept.push_back(std::move(record));
            }
        }
        state.view.records = std::move(kept);
        refresh_groups(state);
        state.last_outcome = Outcome::records(state.view);
        break;
    }
    case OperatorKind::group: {
        const auto& p = std::get<GroupParams>(op.params);
        if (p.descriptors.empty()) {
            raise(Errc::invalid_argument, "GROUP needs at least one descriptor");
        }
        state.groups = partition(state.view, p.descriptors);
        state.last_outcome = Outcome::records(state.view);
        break;
    }
    case OperatorKind::agg: {
        const auto& p = std::get<AggParams>(op.params);
        std::size_t measure_idx = resolve_descriptor(state.view, p.measure);
        if (state.groups.has_value()) {
            const Grouping& grouping = *state.groups;
            std::vector<std::size_t> key_idx;
            for (const std::string& d : grouping.key_descriptors) {
                key_idx.push_back(resolve_descriptor(state.view, d));
            }
            GroupedValue grouped;
            DataView collapsed;
            collapsed.descriptors = grouping.key_descriptors;
            collapsed.descriptors.push_back(p.measure);
            collapsed.row_descriptor_count = grouping.key_descriptors.size();
            for (const auto& [key, members] : grouping.groups) {
                std::vector<CellValue> values;
                values.reserve(members.size());
                for (std::size_t r : members) {
                    values.push_back(state.view.records[r].values[measure_idx]);
                }
                CellValue result = aggregate(p.fn, values);
                grouped.entries.push_back({key, result});
                ViewRecord record;
                record.row_path = {key};
                for (std::size_t idx : key_idx) {
                    record.values.push_back(
                        state.view.records[members.front()].values[idx]);
                }
                record.values.push_back(result);
                collapsed.records.push_back(std::move(record));
            }
            state.view = std::move(collapsed);
            state.groups.reset();
            state.last_outcome = Outcome::grouped(std::move(grouped));
        } else {
            std::vector<CellValue> values;
            values.reserve(state.view.records.size());
            for (const ViewRecord& record : state.view.records) {
                values.push_back(record.values[measure_idx]);
            }
            CellValue result = aggregate(p.fn, values);
            DataView collapsed;
            collapsed.descriptors = {p.measure};
            collapsed.row_descriptor_count = 0;
            ViewRecord record;
            record.row_path = {"all"};
            record.values.push_back(result);
            collapsed.records.push_back(std::move(record));
            state.view = std::move(collapsed);
            state.last_outcome = Outcome::scalar(result);
        }
        break;
    }
    case OperatorKind::join: {
        const auto& p = std::get<JoinParams>(op.params);
        auto aux = state.aux_views.find(p.right_view);
        if (aux == state.aux_views.end()) {
            raise(Errc::unknown_descriptor,
                  std::format("auxiliary view '{}' not bound", p.right_view));
        }
        const DataView& right = aux->second;
        std::size_t left_idx = resolve_descriptor(state.view, p.left_key);
        std::size_t right_idx = resolve_descriptor(right, p.right_key);
        DataView joined;
        joined.row_descriptor_count = state.view.row_descriptor_count;
        joined.descriptors = state.view.descriptors;
        for (const std::string& d : right.descriptors) {
            bool collides = state.view.index_of(d).has_value();
            joined.descriptors.push_back(collides ? p.right_view + "." + d : d);
        }
        for (const ViewRecord& lrec : state.view.records) {
            const CellValue& key = lrec.values[left_idx];
            if (key.is_null()) {
                continue;
            }
            for (const ViewRecord& rrec : right.records) {
                const CellValue& rkey = rrec.values[right_idx];
                if (rkey.is_null() || family_of(key) != family_of(rkey) ||
                    compare_values(key, rkey) != 0) {
                    continue;
                }
                ViewRecord merged;
                merged.row_path = lrec.row_path;
                merged.values = lrec.values;
                merged.values.insert(merged.values.end(), rrec.values.begin(),
                                     rrec.values.end());
                joined.records.push_back(std::move(merged));
            }
        }
        state.view = std::move(joined);
        refresh_groups(state);
        state.last_outcome = Outcome::records(state.view);
        break;
    }
    case OperatorKind::sort: {
        const auto& p = std::get<SortParams>(op.params);
        std::size_t idx = resolve_descriptor(state.view, p.descriptor);
        check_family_consistency(state.view, idx);
        std::stable_sort(state.view.records.begin(), state.view.records.end(),
                         [&](const ViewRecord& a, const ViewRecord& b) {
                             const CellValue& va = a.values[idx];
                             const CellValue& vb = b.values[idx];
                             if (va.is_null() || vb.is_null()) {
                                 return !va.is_null() && vb.is_null(); // Nulls last
                             }
                             int c = compare_values(va, vb);
                             return p.dir == SortDir::asc ? c < 0 : c > 0;
                         });
        refresh_groups(state);
        state.last_outcome = Outcome::records(state.view);
        break;
    }
    case OperatorKind::pivot: {
        const auto& p = std::get<PivotParams>(op.params);
        std::size_t row_idx = resolve_descriptor(state.view, p.row_descriptor);
        std::size_t col_idx = resolve_descriptor(state.view, p.col_descriptor);
        std::size_t measure_idx = resolve_descriptor(state.view, p.measure);
        std::vector<std::string> row_keys;
        std::vector<std::string> col_keys;
        std::map<std::pair<std::string, std::string>, CellValue> cells;
        for (const ViewRecord& record : state.view.records) {
            std::string rk = record.values[row_idx].to_text();
            std::string ck = record.values[col_idx].to_text();
            if (std::find(row_keys.begin(), row_keys.end(), rk) == row_keys.end()) {
                row_keys.push_back(rk);
            }
            if (std::find(col_keys.begin(), col_keys.end(), ck) == col_keys.end()) {
                col_keys.push_back(ck);
            }
            auto [it, inserted] = cells.try_emplace({rk, ck}, record.values[measure_idx]);
            if (!inserted) {
                raise(Errc::duplicate_pivot_key, std::format("({}, {})", rk, ck));
            }
        }
        DataView pivoted;
        pivoted.row_descriptor_count = 1;
        pivoted.descriptors.push_back(p.row_descriptor);
        for (const std::string& ck : col_keys) {
            pivoted.descriptors.push_back(ck);
        }
        for (const std::string& rk : row_keys) {
            ViewRecord record;
            record.row_path = {rk};
            record.values.push_back(CellValue::text(rk));
            for (const std::string& ck : col_keys) {
                auto it = cells.find({rk, ck});
                record.values.push_back(it == cells.end() ? CellValue::null() : it->second);
            }
            pivoted.records.push_back(std::move(record));
        }
        state.view = std::move(pivoted);
        state.groups.reset();
        state.last_outcome = Outcome::records(state.view);
        break;
    }
    case OperatorKind::limit: {
        const auto& p = std::get<LimitParams>(op.params);
        if (p.k < 0) {
            raise(Errc::invalid_argument, "LIMIT needs k >= 0");
        }
        if (static_cast<std::size_t>(p.k) < state.view.records.size()) {
            state.view.records.resize(static_cast<std::size_t>(p.k));
        }
        refresh_groups(state);
        state.last_outcome = Outcome::records(state.view);
        break;
    }
    case OperatorKind::derive: {
        const auto& p = std::get<DeriveParams>(op.params);
        DeriveEvaluator evaluator(p.expression, state.view);
        std::vector<CellValue> column;
        column.reserve(state.view.records.size());
        for (const ViewRecord& record : state.view.records) {
            column.push_back(evaluator.evaluate(record));
        }
        auto existing = state.view.index_of(p.name);
        std::size_t idx;
        if (existing.has_value()) {
            idx = *existing; // re-deriving a name overwrites the column
        } else {
            idx = state.view.descriptors.size();
            state.view.descriptors.push_back(p.name);
        }
        for (std::size_t r = 0; r < state.view.records.size(); ++r) {
            if (existing.has_value()) {
                state.view.records[r].values[idx] = std::move(column[r]);
            } else {
                state.view.records[r].values.push_back(std::move(column[r]));
            }
        }
        refresh_groups(state);
        state.last_outcome = Outcome::records(state.view);
        break;
    }
    case OperatorKind::chart: {
        const auto& p = std::get<ChartParams>(op.params);
        resolve_descriptor(state.view, p.x); // x must exist
        ChartSpec spec;
        spec.kind = p.kind;
        spec.x = p.x;
        spec.series = p.series;
        for (const std::string& s : p.series) {
            if (!state.view.index_of(s).has_value()) {
                spec.unresolved.push_back(s);
            }
        }
        state.terminal = true;
        state.last_outcome = Outcome::chart(std::move(spec));
        break;
    }
    }
    return state;
}

namespace {

std::string error_digest(const Error& error, const DataView& view) {
    std::string digest = std::format("error:{}:{}", to_string(error.code()), error.detail());
    if (error.code() == Errc::unknown_descriptor) {
        std::string available;
        for (const std::string& d : view.descriptors) {
            if (!available.empty()) {
                available += ',';
            }
            available += d;
        }
        digest += ";available=" + available;
    }
    return digest;
}

} // namespace

RunResult run_path(const Path& path, const DataView& view, Provider& provider,
                   CallBudget& budget, ExecClock& clock) {
    ExecState state;
    state.view = view;
    bool think_enabled = budget.limit > 0;
    RunResult result;
    double elapsed_total = 0.0;

    for (const OperatorInstance& op : path.ops) {
        if (think_enabled) {
            AgentResponse response =
                call(provider, StepRequest{StepPhase::before, render_trace(state.trace)}, budget);
            const auto* flag = std::get_if<FlagResponse>(&response);
            if (flag == nullptr) {
                raise(Errc::agent_protocol, "step response was not a flag");
            }
            StepTrace think;
            think.flag = StepFlag::think;
            think.content = flag->content;
            state.trace.push_back(std::move(think));
        }
        StepTrace code;
        code.flag = StepFlag::code;
        code.content = op.render();
        code.op = op;
        try {
            ExecState next = apply_operator(op, state);
            code.elapsed = clock.lap();
            elapsed_total += code.elapsed;
            code.outcome_digest = next.last_outcome ? next.last_outcome->digest() : "";
            state = std::move(next);
            state.trace.push_back(std::move(code));
        } catch (const Error& error) {
            code.elapsed = clock.lap();
            elapsed_total += code.elapsed;
            code.outcome_digest = error_digest(error, state.view);
            state.trace.push_back(std::move(code));
            result.feedback.f_exec = 0;
            result.feedback.f_time = elapsed_total;
            result.feedback.f_type = 0;
            result.trace = std::move(state.trace);
            return result;
        }
    }

    result.feedback.f_exec = 1;
    result.feedback.f_time = elapsed_total;
    if (state.last_outcome.has_value()) {
        result.outcome = std::move(state.last_outcome);
    } else {
        result.outcome = Outcome::records(state.view);
    }
    result.feedback.f_type = check_type(*result.outcome, path.ops.back().kind);
    result.trace = std::move(state.trace);
    return result;
}

int check_type(const Outcome& outcome, OperatorKind terminal_kind) {
    switch (terminal_kind) {
    case OperatorKind::agg:
        return outcome.kind() == Outcome::Kind::scalar ||
                       outcome.kind() == Outcome::Kind::grouped
                   ? 1
                   : 0;
    case OperatorKind::sort:
    case OperatorKind::limit:
        return outcome.kind() == Outcome::Kind::records ? 1 : 0;
    case OperatorKind::chart:
        return outcome.kind() == Outcome::Kind::chart && outcome.as_chart().well_formed() ? 1 : 0;
    default:
        return 0;
    }
}

double compute_reward(const Feedback& feedback, const RewardWeights& weights, double r_max) {
    if (feedback.f_exec == 0) {
        return 0.0;
    }
    double r = r_max * (weights.w_base + weights.w_type * feedback.f_type +
                        weights.w_time * std::exp(-feedback.f_time / weights.tau));
    return std::clamp(r, 0.0, r_max);
}

} // namespace tre
