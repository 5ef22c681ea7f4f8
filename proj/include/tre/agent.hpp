#pragma once

#include "tre/opbank.hpp"
#include "tre/structure.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tre {

enum class StepPhase { before, after };
enum class StepFlag { think, code };

struct DecomposeRequest {
    std::string query;
    std::string meta_digest;
};
struct ChooseOpsRequest {
    std::vector<std::string> subqueries;
    std::vector<Triple> triples;
};
struct StepRequest {
    StepPhase phase = StepPhase::before;
    std::string trace_rendering;
};
struct SummarizeRequest {
    std::string records_rendering;
};
struct ExtractAnswerRequest {
    std::string query;
    std::string outcome_digest;
};

using AgentRequest = std::variant<DecomposeRequest, ChooseOpsRequest, StepRequest,
                                  SummarizeRequest, ExtractAnswerRequest>;

/// Single prompt document for the request, truncated to `size_cap` bytes.
std::string render_prompt(const AgentRequest& request, std::size_t size_cap = 32768);

struct SubQueriesResponse {
    std::vector<std::string> items;
};
struct OpChoice {
    OperatorKind kind = OperatorKind::filter;
    std::vector<std::pair<std::string, std::string>> params;

    std::optional<std::string> param(std::string_view key) const;
};
struct OpChoicesResponse {
    std::vector<OpChoice> items;
};
struct FlagResponse {
    StepFlag flag = StepFlag::think;
    std::string content; // non-empty
};
struct NotesResponse {
    std::vector<std::string> lessons;
};
struct AnswerResponse {
    std::string text;
    CellValue value;
};

using AgentResponse = std::variant<SubQueriesResponse, OpChoicesResponse, FlagResponse,
                                   NotesResponse, AnswerResponse>;

/// Line-oriented schema shared by every provider: "subquery:", "op:",
/// "flag:"/"content:", "note:", "answer:" lines.
std::string render_response(const AgentResponse& response);
AgentResponse parse_response(const AgentRequest& request, std::string_view body);

struct CallBudget {
    std::atomic<std::int64_t> used{0};
    std::int64_t limit = 0;

    explicit CallBudget(std::int64_t limit_ = 0) : limit(limit_) {}
};

class Provider {
  public:
    virtual ~Provider() = default;
    virtual AgentResponse complete(const AgentRequest& request) = 0;
    virtual std::string name() const = 0;
};

/// Budget-gated provider invocation: rejects at the limit without counting,
/// otherwise increments exactly once (including calls that then fail).
AgentResponse call(Provider& provider, const AgentRequest& request, CallBudget& budget);

/// Intent classes recognized in queries; drives decomposition, signature
/// keys, and answer-shape validation.
struct QueryIntents {
    bool superlative = false;
    bool total = false;
    bool average = false;
    bool filter_clause = false;
    bool sortish = false;
    bool chart = false;
    ChartKind chart_kind = ChartKind::bar;
    SortDir sort_dir = SortDir::desc;
    std::int64_t limit_k = 1;

    bool aggregate() const { return superlative || total || average; }
    /// Sorted unique class tags ("agg", "chart", "filter", "sort").
    std::vector<std::string> tags() const;
};

QueryIntents parse_intents(std::string_view query);

std::vector<std::string> tokenize_lower(std::string_view text);

/// Case-insensitive substring match in either direction (>= 2 chars).
bool label_token_match(std::string_view label, std::string_view token);

/// Deterministic rule-based provider; outputs are pure functions of
/// (seed, request), so every other module is testable offline.
std::unique_ptr<Provider> make_mock_provider(std::uint64_t seed);

struct RemoteConfig {
    std::string endpoint; // e.g. "http://host:port/v1/chat/completions"
    std::string model;
    std::string auth_token; // empty -> no Authorization header
    int timeout_seconds = 30;
};

/// Minimal chat-completion client speaking the line-oriented schema with a
/// strict "respond only with the schema" preamble.
std::unique_ptr<Provider> make_remote_provider(RemoteConfig config);

/// Reads TRE_REMOTE_ENDPOINT, TRE_REMOTE_MODEL, and TRE_REMOTE_AUTH_ENV
/// (the name of the variable holding the token).
RemoteConfig remote_config_from_env();

} // namespace tre
