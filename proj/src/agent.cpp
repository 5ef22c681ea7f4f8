#include "tre/agent.hpp"

#include "tre/error.hpp"

#include <algorithm>
#include <cctype>
#include <format>
#include <sstream>

namespace tre {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

void append_capped(std::string& doc, std::string_view piece, std::size_t cap) {
    if (doc.size() >= cap) {
        return;
    }
    doc.append(piece.substr(0, cap - doc.size()));
}

} // namespace

std::string render_prompt(const AgentRequest& request, std::size_t size_cap) {
    std::string doc;
    auto line = [&](std::string_view text) {
        append_capped(doc, text, size_cap);
        append_capped(doc, "\n", size_cap);
    };
    std::visit(
        [&](const auto& req) {
            using T = std::decay_t<decltype(req)>;
            if constexpr (std::is_same_v<T, DecomposeRequest>) {
                line("task: decompose the query into sub-queries");
                line(std::format("query: {}", req.query));
                line(std::format("table: {}", req.meta_digest));
                line("respond only with 'subquery: <text>' lines");
            } else if constexpr (std::is_same_v<T, ChooseOpsRequest>) {
                line("task: choose operations from the bank "
                     "{LOAD, CLEAN, FILTER, GROUP, AGG, JOIN, SORT, PIVOT, LIMIT, DERIVE, CHART}");
                for (const std::string& sub : req.subqueries) {
                    line(std::format("subquery: {}", sub));
                }
                for (const Triple& triple : req.triples) {
                    line(render(triple));
                }
                line("respond only with 'op: KIND | key=value | ...' lines");
            } else if constexpr (std::is_same_v<T, StepRequest>) {
                line(req.phase == StepPhase::before ? "task: review state before the next operation"
                                                    : "task: review the finished operation");
                line("trace:");
                line(req.trace_rendering);
                line("respond only with 'flag: THINK|CODE' and 'content: <text>' lines");
            } else if constexpr (std::is_same_v<T, SummarizeRequest>) {
                line("task: distill at most 3 reusable lessons from these execution records");
                line(req.records_rendering);
                line("respond only with 'note: <lesson>' lines");
            } else if constexpr (std::is_same_v<T, ExtractAnswerRequest>) {
                line("task: state the final answer");
                line(std::format("query: {}", req.query));
                line(std::format("outcome: {}", req.outcome_digest));
                line("respond only with one 'answer: <text>' line");
            }
        },
        request);
    if (doc.size() > size_cap) {
        doc.resize(size_cap);
    }
    return doc;
}

std::optional<std::string> OpChoice::param(std::string_view key) const {
    for (const auto& [k, v] : params) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

std::string render_response(const AgentResponse& response) {
    std::string out;
    std::visit(
        [&](const auto& resp) {
            using T = std::decay_t<decltype(resp)>;
            if constexpr (std::is_same_v<T, SubQueriesResponse>) {
                for (const std::string& item : resp.items) {
                    out += std::format("subquery: {}\n", item);
                }
            } else if constexpr (std::is_same_v<T, OpChoicesResponse>) {
                for (const OpChoice& choice : resp.items) {
                    out += std::format("op: {}", to_string(choice.kind));
                    for (const auto& [k, v] : choice.params) {
                        out += std::format(" | {}={}", k, v);
                    }
                    out += '\n';
                }
            } else if constexpr (std::is_same_v<T, FlagResponse>) {
                out += std::format("flag: {}\n", resp.flag == StepFlag::think ? "THINK" : "CODE");
                out += std::format("content: {}\n", resp.content);
            } else if constexpr (std::is_same_v<T, NotesResponse>) {
                for (const std::string& lesson : resp.lessons) {
                    out += std::format("note: {}\n", lesson);
                }
            } else if constexpr (std::is_same_v<T, AnswerResponse>) {
                out += std::format("answer: {}\n", resp.text);
            }
        },
        response);
    return out;
}

namespace {

std::vector<std::string> schema_lines(std::string_view body) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(body)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::string_view trimmed = trim(line);
        if (!trimmed.empty()) {
            lines.emplace_back(trimmed);
        }
    }
    return lines;
}

std::optional<std::string_view> strip_prefix(std::string_view line, std::string_view prefix) {
    if (line.substr(0, prefix.size()) == prefix) {
        return trim(line.substr(prefix.size()));
    }
    return std::nullopt;
}

} // namespace

AgentResponse parse_response(const AgentRequest& request, std::string_view body) {
    std::vector<std::string> lines = schema_lines(body);
    if (std::holds_alternative<DecomposeRequest>(request)) {
        SubQueriesResponse resp;
        for (const std::string& line : lines) {
            if (auto rest = strip_prefix(line, "subquery:")) {
                resp.items.emplace_back(*rest);
            } else {
                raise(Errc::agent_protocol, std::format("unexpected line '{}'", line));
            }
        }
        return resp;
    }
    if (std::holds_alternative<ChooseOpsRequest>(request)) {
        OpChoicesResponse resp;
        for (const std::string& line : lines) {
            auto rest = strip_prefix(line, "op:");
            if (!rest) {
                raise(Errc::agent_protocol, std::format("unexpected line '{}'", line));
            }
            OpChoice choice;
            std::string_view remaining = *rest;
            bool first = true;
            while (!remaining.empty()) {
                std::size_t sep = remaining.find('|');
                std::string_view field = trim(remaining.substr(0, sep));
                remaining = sep == std::string_view::npos
                                ? std::string_view{}
                                : remaining.substr(sep + 1);
                if (first) {
                    try {
                        choice.kind = operator_kind_from(field);
                    } catch (const Error&) {
                        raise(Errc::agent_protocol,
                              std::format("unknown operator kind '{}'", field));
                    }
                    first = false;
                } else if (!field.empty()) {
                    std::size_t eq = field.find('=');
                    if (eq == std::string_view::npos) {
                        raise(Errc::agent_protocol, std::format("bad op field '{}'", field));
                    }
                    choice.params.emplace_back(std::string(trim(field.substr(0, eq))),
                                               std::string(trim(field.substr(eq + 1))));
                }
            }
            if (first) {
                raise(Errc::agent_protocol, "op line without a kind");
            }
            resp.items.push_back(std::move(choice));
        }
        return resp;
    }
    if (std::holds_alternative<StepRequest>(request)) {
        FlagResponse resp;
        bool have_flag = false;
        for (const std::string& line : lines) {
            if (auto rest = strip_prefix(line, "flag:")) {
                if (*rest == "THINK") {
                    resp.flag = StepFlag::think;
                } else if (*rest == "CODE") {
                    resp.flag = StepFlag::code;
                } else {
                    raise(Errc::agent_protocol, std::format("unknown flag '{}'", *rest));
                }
                have_flag = true;
            } else if (auto content = strip_prefix(line, "content:")) {
                resp.content = *content;
            } else {
                raise(Errc::agent_protocol, std::format("unexpected line '{}'", line));
            }
        }
        if (!have_flag || resp.content.empty()) {
            raise(Errc::agent_protocol, "step response needs flag and non-empty content");
        }
        return resp;
    }
    if (std::holds_alternative<SummarizeRequest>(request)) {
        NotesResponse resp;
        for (const std::string& line : lines) {
            if (auto rest = strip_prefix(line, "note:")) {
                resp.lessons.emplace_back(*rest);
            } else {
                raise(Errc::agent_protocol, std::format("unexpected line '{}'", line));
            }
        }
        return resp;
    }
    AnswerResponse resp;
    bool have_answer = false;
    for (const std::string& line : lines) {
        if (auto rest = strip_prefix(line, "answer:")) {
            resp.text = *rest;
            resp.value = infer_value(resp.text);
            have_answer = true;
        } else {
            raise(Errc::agent_protocol, std::format("unexpected line '{}'", line));
        }
    }
    if (!have_answer) {
        raise(Errc::agent_protocol, "missing answer line");
    }
    return resp;
}

AgentResponse call(Provider& provider, const AgentRequest& request, CallBudget& budget) {
    std::int64_t current = budget.used.load();
    for (;;) {
        if (current >= budget.limit) {
            raise(Errc::budget_exhausted,
                  std::format("{} of {} agent calls used", current, budget.limit));
        }
        if (budget.used.compare_exchange_weak(current, current + 1)) {
            break;
        }
    }
    return provider.complete(request); // failures still consumed one call
}

std::vector<std::string> tokenize_lower(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

bool label_token_match(std::string_view label, std::string_view token) {
    std::string l = lower(label);
    std::string t = lower(token);
    if (l.empty() || t.empty() || std::min(l.size(), t.size()) < 2) {
        return false;
    }
    return l == t || l.find(t) != std::string::npos || t.find(l) != std::string::npos;
}

std::vector<std::string> QueryIntents::tags() const {
    std::vector<std::string> out;
    if (aggregate()) {
        out.emplace_back("agg");
    }
    if (chart) {
        out.emplace_back("chart");
    }
    if (filter_clause) {
        out.emplace_back("filter");
    }
    if (superlative || sortish) {
        out.emplace_back("sort");
    }
    std::sort(out.begin(), out.end());
    return out;
}

QueryIntents parse_intents(std::string_view query) {
    static const std::vector<std::string_view> kSuperlative = {"top",  "largest", "highest",
                                                               "best", "most",    "max"};
    static const std::vector<std::string_view> kTotal = {"total", "sum"};
    static const std::vector<std::string_view> kAverage = {"average", "mean"};
    static const std::vector<std::string_view> kSortish = {"sort", "trend", "compare", "rank"};
    static const std::vector<std::string_view> kChart = {"chart", "plot", "draw", "visualize",
                                                         "pie",   "line", "bar",  "scatter"};

    QueryIntents intents;
    std::vector<std::string> tokens = tokenize_lower(query);
    auto has = [&](const std::vector<std::string_view>& words, const std::string& token) {
        return std::find(words.begin(), words.end(), token) != words.end();
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& token = tokens[i];
        if (has(kSuperlative, token)) {
            intents.superlative = true;
            if (token == "top" && i + 1 < tokens.size()) {
                std::int64_t k = 0;
                bool numeric = !tokens[i + 1].empty() &&
                               std::all_of(tokens[i + 1].begin(), tokens[i + 1].end(),
                                           [](unsigned char c) { return std::isdigit(c); });
                if (numeric) {
                    k = std::stoll(tokens[i + 1]);
                    intents.limit_k = std::max<std::int64_t>(k, 1);
                }
            }
        } else if (has(kTotal, token)) {
            intents.total = true;
        } else if (has(kAverage, token)) {
            intents.average = true;
        } else if (has(kSortish, token)) {
            intents.sortish = true;
        } else if (has(kChart, token)) {
            intents.chart = true;
            if (token == "pie") {
                intents.chart_kind = ChartKind::pie;
            } else if (token == "line") {
                intents.chart_kind = ChartKind::line;
            } else if (token == "bar") {
                intents.chart_kind = ChartKind::bar;
            } else if (token == "scatter") {
                intents.chart_kind = ChartKind::scatter;
            }
        } else if ((token == "in" || token == "for") && i + 1 < tokens.size()) {
            intents.filter_clause = true;
        } else if (token == "ascending" || token == "asc") {
            intents.sort_dir = SortDir::asc;
        } else if (token == "descending" || token == "desc") {
            intents.sort_dir = SortDir::desc;
        }
    }
    return intents;
}

} // namespace tre
