#include "tre/agent.hpp"

#include "tre/error.hpp"
#include "tre/experience.hpp"

#include <algorithm>
#include <format>
#include <map>
#include <sstream>

namespace tre {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(sep, start);
        if (end == std::string_view::npos) {
            out.emplace_back(trim(text.substr(start)));
            break;
        }
        out.emplace_back(trim(text.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

struct DigestInfo {
    std::vector<std::string> groupable;
    std::vector<std::string> leaves;
    std::vector<std::string> parents;
    std::vector<std::string> rowvals;
};

DigestInfo parse_digest(std::string_view digest) {
    DigestInfo info;
    for (const std::string& field : split(digest, ';')) {
        std::size_t eq = field.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        std::string_view key = trim(std::string_view(field).substr(0, eq));
        std::string_view value = trim(std::string_view(field).substr(eq + 1));
        std::vector<std::string> items;
        if (!value.empty()) {
            items = split(value, '|');
        }
        if (key == "groupable") {
            info.groupable = std::move(items);
        } else if (key == "leaves") {
            info.leaves = std::move(items);
        } else if (key == "parents") {
            info.parents = std::move(items);
        } else if (key == "rowvals") {
            info.rowvals = std::move(items);
        }
    }
    return info;
}

std::optional<std::string> match_label(const std::vector<std::string>& labels,
                                       std::string_view token) {
    for (const std::string& label : labels) {
        if (label_token_match(label, token)) {
            return label;
        }
    }
    return std::nullopt;
}

struct ParsedQuery {
    QueryIntents intents;
    std::vector<std::string> measures;      // matched leaf labels, query order
    std::optional<std::string> group_label; // matched groupable label
    bool group_suppressed = false;          // "across all X" / "all X"
    std::optional<std::string> filter_leaf;
    std::optional<std::string> filter_rowval;
};

ParsedQuery parse_query(std::string_view query, const DigestInfo& digest) {
    ParsedQuery parsed;
    parsed.intents = parse_intents(query);
    std::vector<std::string> tokens = tokenize_lower(query);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& token = tokens[i];
        if (auto leaf = match_label(digest.leaves, token)) {
            if (std::find(parsed.measures.begin(), parsed.measures.end(), *leaf) ==
                parsed.measures.end()) {
                parsed.measures.push_back(*leaf);
            }
        }
        if (!parsed.group_label.has_value()) {
            if (auto label = match_label(digest.groupable, token)) {
                parsed.group_label = label;
                if (i > 0 && tokens[i - 1] == "all") {
                    parsed.group_suppressed = true;
                }
            }
        }
        if ((token == "in" || token == "for") && i + 1 < tokens.size() &&
            !parsed.filter_leaf && !parsed.filter_rowval) {
            const std::string& next = tokens[i + 1];
            if (auto leaf = match_label(digest.leaves, next)) {
                parsed.filter_leaf = leaf;
            } else if (auto rowval = match_label(digest.rowvals, next)) {
                parsed.filter_rowval = rowval;
            }
        }
    }
    return parsed;
}

SubQueriesResponse decompose(const DecomposeRequest& request) {
    DigestInfo digest = parse_digest(request.meta_digest);
    ParsedQuery q = parse_query(request.query, digest);
    const QueryIntents& intents = q.intents;

    SubQueriesResponse resp;
    if (q.filter_leaf) {
        resp.items.push_back(std::format("filter rows where {}", *q.filter_leaf));
    } else if (q.filter_rowval && !digest.groupable.empty()) {
        resp.items.push_back(
            std::format("filter rows where {} is {}", digest.groupable.front(), *q.filter_rowval));
    }
    bool wants_group = intents.aggregate() && q.group_label.has_value() && !q.group_suppressed;
    if (wants_group) {
        resp.items.push_back(std::format("group by {}", *q.group_label));
    }
    std::optional<std::string> measure =
        q.measures.empty() ? std::nullopt : std::optional<std::string>(q.measures.front());
    if (intents.aggregate() && measure) {
        resp.items.push_back(std::format("aggregate {} over {}",
                                         intents.average ? "mean" : "sum", *measure));
    }
    if (intents.superlative || intents.sortish) {
        std::string dir = intents.sort_dir == SortDir::asc ? "ascending" : "descending";
        if (measure) {
            resp.items.push_back(std::format("sort {} by {}", dir, *measure));
        } else {
            resp.items.push_back(std::format("sort {}", dir));
        }
    }
    if (intents.superlative) {
        resp.items.push_back(std::format("limit {}", intents.limit_k));
    }
    if (intents.chart) {
        std::string series;
        const std::vector<std::string>& pool = q.measures.empty() ? digest.leaves : q.measures;
        for (std::size_t i = 0; i < pool.size() && i < 3; ++i) {
            if (!series.empty()) {
                series += ',';
            }
            series += pool[i];
        }
        std::string x = q.group_label.value_or(
            !digest.groupable.empty() ? digest.groupable.front()
                                      : (!digest.leaves.empty() ? digest.leaves.front() : ""));
        resp.items.push_back(
            std::format("chart {} of {} by {}", to_string(intents.chart_kind), series, x));
    }
    return resp;
}

OpChoicesResponse choose_ops(const ChooseOpsRequest& request) {
    OpChoicesResponse resp;
    for (const std::string& subquery : request.subqueries) {
        std::string_view s = subquery;
        if (auto rest = [&]() -> std::optional<std::string_view> {
                constexpr std::string_view prefix = "filter rows where ";
                if (s.substr(0, prefix.size()) == prefix) {
                    return s.substr(prefix.size());
                }
                return std::nullopt;
            }()) {
            OpChoice choice;
            choice.kind = OperatorKind::filter;
            std::size_t is_pos = rest->find(" is ");
            if (is_pos != std::string_view::npos) {
                choice.params.emplace_back("descriptor", std::string(rest->substr(0, is_pos)));
                choice.params.emplace_back("op", "eq");
                choice.params.emplace_back("value", std::string(rest->substr(is_pos + 4)));
            } else {
                choice.params.emplace_back("descriptor", std::string(*rest));
                choice.params.emplace_back("mode", "scope");
            }
            resp.items.push_back(std::move(choice));
            continue;
        }
        std::istringstream in{subquery};
        std::string word;
        in >> word;
        if (word == "group") {
            std::string by;
            in >> by; // "by"
            std::string target;
            std::getline(in, target);
            OpChoice choice;
            choice.kind = OperatorKind::group;
            choice.params.emplace_back("by", std::string(trim(target)));
            resp.items.push_back(std::move(choice));
        } else if (word == "aggregate") {
            std::string fn, over;
            in >> fn >> over; // fn, "over"
            std::string measure;
            std::getline(in, measure);
            OpChoice choice;
            choice.kind = OperatorKind::agg;
            choice.params.emplace_back("fn", fn);
            choice.params.emplace_back("measure", std::string(trim(measure)));
            resp.items.push_back(std::move(choice));
        } else if (word == "sort") {
            std::string dir, by;
            in >> dir;
            OpChoice choice;
            choice.kind = OperatorKind::sort;
            choice.params.emplace_back("dir", dir == "ascending" ? "asc" : "desc");
            if (in >> by) {
                std::string target;
                std::getline(in, target);
                choice.params.emplace_back("by", std::string(trim(target)));
            }
            resp.items.push_back(std::move(choice));
        } else if (word == "limit") {
            std::string k;
            in >> k;
            OpChoice choice;
            choice.kind = OperatorKind::limit;
            choice.params.emplace_back("k", k);
            resp.items.push_back(std::move(choice));
        } else if (word == "chart") {
            std::string kind, of;
            in >> kind >> of; // kind, "of"
            std::string tail;
            std::getline(in, tail);
            std::string_view t = trim(tail);
            std::size_t by_pos = t.rfind(" by ");
            OpChoice choice;
            choice.kind = OperatorKind::chart;
            choice.params.emplace_back("kind", kind);
            if (by_pos != std::string_view::npos) {
                choice.params.emplace_back("series", std::string(trim(t.substr(0, by_pos))));
                choice.params.emplace_back("x", std::string(trim(t.substr(by_pos + 4))));
            } else {
                choice.params.emplace_back("series", std::string(t));
            }
            resp.items.push_back(std::move(choice));
        }
        // Anything else is not in the bank vocabulary; omit rather than guess.
    }
    return resp;
}

FlagResponse step(const StepRequest& request) {
    int prior_steps = 0;
    for (char c : request.trace_rendering) {
        if (c == '\n') {
            ++prior_steps;
        }
    }
    FlagResponse resp;
    resp.flag = StepFlag::think;
    resp.content = request.phase == StepPhase::before
                       ? std::format("reviewed {} prior steps; state looks consistent, proceed",
                                     prior_steps)
                       : std::format("operation finished; {} steps recorded", prior_steps);
    return resp;
}

struct RecordLine {
    std::string path_signature;
    std::string op;
    std::string outcome;
    double reward = 0.0;
};

std::vector<RecordLine> parse_records(std::string_view rendering) {
    std::vector<RecordLine> records;
    std::istringstream in{std::string(rendering)};
    std::string line;
    while (std::getline(in, line)) {
        constexpr std::string_view prefix = "record: ";
        if (line.substr(0, prefix.size()) != prefix) {
            continue;
        }
        RecordLine rec;
        for (const std::string& field : [&] {
                 std::vector<std::string> fields;
                 std::string_view rest = std::string_view(line).substr(prefix.size());
                 std::size_t start = 0;
                 const std::string sep = " | ";
                 while (true) {
                     std::size_t pos = rest.find(sep, start);
                     fields.emplace_back(rest.substr(start, pos - start));
                     if (pos == std::string_view::npos) {
                         break;
                     }
                     start = pos + sep.size();
                 }
                 return fields;
             }()) {
            std::size_t eq = field.find('=');
            if (eq == std::string::npos) {
                continue;
            }
            std::string key = field.substr(0, eq);
            std::string value = field.substr(eq + 1);
            if (key == "path") {
                rec.path_signature = value;
            } else if (key == "op") {
                rec.op = value;
            } else if (key == "outcome") {
                rec.outcome = value;
            } else if (key == "reward") {
                rec.reward = std::strtod(value.c_str(), nullptr);
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<std::string> kinds_of_signature(std::string_view signature) {
    std::vector<std::string> kinds;
    std::size_t start = 0;
    const std::string arrow = "→";
    while (start < signature.size()) {
        std::size_t pos = signature.find(arrow, start);
        std::string_view part = signature.substr(
            start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        std::size_t paren = part.find('(');
        kinds.emplace_back(part.substr(0, paren));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + arrow.size();
    }
    return kinds;
}

NotesResponse summarize(const SummarizeRequest& request) {
    std::vector<RecordLine> records = parse_records(request.records_rendering);
    NotesResponse resp;

    std::map<std::string, double> reward_by_path;
    for (const RecordLine& rec : records) {
        reward_by_path[rec.path_signature] = rec.reward;
    }
    // Rule 1: filter-first beats aggregate-first.
    double best_agg_first = -1.0;
    double best_filter_first = -1.0;
    for (const auto& [signature, reward] : reward_by_path) {
        std::vector<std::string> kinds = kinds_of_signature(signature);
        auto agg = std::find(kinds.begin(), kinds.end(), "AGG");
        auto filter = std::find(kinds.begin(), kinds.end(), "FILTER");
        if (agg == kinds.end() || filter == kinds.end()) {
            continue;
        }
        if (agg < filter) {
            best_agg_first = std::max(best_agg_first, reward);
        } else {
            best_filter_first = std::max(best_filter_first, reward);
        }
    }
    if (best_agg_first >= 0.0 && best_filter_first > best_agg_first) {
        PathEdit edit;
        edit.kind = PathEdit::Kind::reorder;
        edit.first = OperatorKind::filter;
        edit.second = OperatorKind::agg;
        resp.lessons.push_back(render_lesson(edit));
    }
    // Rule 2: repeated unknown-descriptor failures get a remap.
    std::map<std::string, int> unknown_counts;
    std::map<std::string, std::vector<std::string>> availability;
    for (const RecordLine& rec : records) {
        constexpr std::string_view tag = "error:unknown_descriptor:";
        std::size_t pos = rec.outcome.find(tag);
        if (pos == std::string::npos) {
            continue;
        }
        std::string_view rest = std::string_view(rec.outcome).substr(pos + tag.size());
        std::size_t semi = rest.find(';');
        std::string name(rest.substr(0, semi));
        ++unknown_counts[name];
        constexpr std::string_view avail_tag = "available=";
        std::size_t avail_pos = rest.find(avail_tag);
        if (avail_pos != std::string_view::npos) {
            for (const std::string& item : split(rest.substr(avail_pos + avail_tag.size()), ',')) {
                if (!item.empty()) {
                    availability[name].push_back(item);
                }
            }
        }
    }
    for (const auto& [name, count] : unknown_counts) {
        if (count < 2 || resp.lessons.size() >= 3) {
            continue;
        }
        const std::vector<std::string>& available = availability[name];
        auto target = match_label(available, name);
        if (target) {
            PathEdit edit;
            edit.kind = PathEdit::Kind::remap;
            edit.old_descriptor = name;
            edit.new_descriptor = *target;
            resp.lessons.push_back(render_lesson(edit));
        }
    }
    // Rule 3: adjacent duplicate kinds contribute nothing.
    for (const auto& [signature, reward] : reward_by_path) {
        if (resp.lessons.size() >= 3) {
            break;
        }
        std::vector<std::string> kinds = kinds_of_signature(signature);
        for (std::size_t i = 1; i < kinds.size(); ++i) {
            if (kinds[i] == kinds[i - 1]) {
                PathEdit edit;
                edit.kind = PathEdit::Kind::remove_duplicate;
                edit.first = operator_kind_from(kinds[i]);
                std::string lesson = render_lesson(edit);
                if (std::find(resp.lessons.begin(), resp.lessons.end(), lesson) ==
                    resp.lessons.end()) {
                    resp.lessons.push_back(std::move(lesson));
                }
                break;
            }
        }
    }
    if (resp.lessons.size() > 3) {
        resp.lessons.resize(3);
    }
    return resp;
}

class MockProvider final : public Provider {
  public:
    explicit MockProvider(std::uint64_t seed) : seed_(seed) {}

    AgentResponse complete(const AgentRequest& request) override {
        return std::visit(
            [&](const auto& req) -> AgentResponse {
                using T = std::decay_t<decltype(req)>;
                if constexpr (std::is_same_v<T, DecomposeRequest>) {
                    return decompose(req);
                } else if constexpr (std::is_same_v<T, ChooseOpsRequest>) {
                    return choose_ops(req);
                } else if constexpr (std::is_same_v<T, StepRequest>) {
                    return step(req);
                } else if constexpr (std::is_same_v<T, SummarizeRequest>) {
                    return summarize(req);
                } else {
                    AnswerResponse resp;
                    resp.text = req.outcome_digest;
                    resp.value = infer_value(resp.text);
                    return resp;
                }
            },
            request);
    }

    std::string name() const override { return std::format("mock(seed={})", seed_); }

  private:
    std::uint64_t seed_;
};

} // namespace

std::unique_ptr<Provider> make_mock_provider(std::uint64_t seed) {
    return std::make_unique<MockProvider>(seed);
}

} // namespace tre
