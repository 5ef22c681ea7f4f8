#pragma once

#include "tre/agent.hpp"
#include "tre/executor.hpp"
#include "tre/experience.hpp"
#include "tre/opbank.hpp"
#include "tre/planner.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace tre {

/// One executed operator step; the log is append-only.
struct ExecutionRecord {
    std::string path_signature;
    OperatorInstance op;
    std::string context_digest;
    std::string outcome_digest;
    double reward = 0.0;
};

/// Siamese memory: parameterized execution records plus value-agnostic
/// experience notes keyed by query signature.
struct MemoryStore {
    std::vector<ExecutionRecord> records;
    std::map<std::string, std::vector<ExperienceNote>> notes;

    nlohmann::json to_json() const;
    static MemoryStore from_json(const nlohmann::json& doc);
};

/// Appends one record per CODE step of the trace.
void record_execution(MemoryStore& store, const Path& path, const Feedback& feedback,
                      double reward, const std::vector<StepTrace>& trace);

/// One line per record, the rendering Summarize requests carry.
std::string render_records(std::span<const ExecutionRecord> records);

/// Distills at most three notes from recent records via the provider.
std::vector<ExperienceNote> abstract_experience(Provider& provider,
                                                std::span<const ExecutionRecord> recent,
                                                const std::string& signature_key,
                                                CallBudget& budget);

struct AdaptResult {
    std::vector<Path> candidates;
};

/// Applies structured edits (Reorder, Remove, Insert, RemapDescriptor — in
/// that order) to matching candidates. Edited paths get fresh stats with
/// note-aware priors; Remove(duplicate-only) replaces its original, other
/// edits add alongside it. No output path ever violates the map.
AdaptResult adapt_candidates(std::vector<Path> candidates,
                             const std::vector<ExperienceNote>& notes, PlannerState& state,
                             const OperationMap& map);

/// Value-agnostic key: sorted intent-class tags plus the header-depth pair,
/// e.g. "agg+filter+sort|d2x1".
std::string query_signature(std::string_view query, int col_band_depth, int row_band_width);

} // namespace tre
