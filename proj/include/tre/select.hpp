#pragma once

#include "tre/agent.hpp"
#include "tre/opbank.hpp"
#include "tre/structure.hpp"

#include <string>
#include <vector>

namespace tre {

struct SelectionResult {
    std::vector<OperatorInstance> instances;
    std::vector<std::string> warnings; // one per dropped suggestion
};

/// Asks the provider to choose operations for the sub-queries, then resolves
/// every descriptor token against the triples' vocabulary (exact path or
/// unique label match). Suggestions that do not resolve are dropped with a
/// warning; an all-dropped selection is an error.
SelectionResult select_operations(Provider& provider, const std::vector<std::string>& subqueries,
                                  const std::vector<Triple>& triples, CallBudget& budget);

/// Descriptor vocabulary reconstructed from header triples.
struct TripleVocabulary {
    std::vector<std::string> paths;             // root-to-leaf column paths
    std::vector<std::string> band_descriptors;  // row-band column descriptors
    std::vector<std::pair<std::string, std::string>> row_values; // label -> band descriptor

    static TripleVocabulary from(const std::vector<Triple>& triples);

    /// Exact path, then unique leaf-label match; empty when unresolvable.
    std::string resolve_column(std::string_view token) const;
    /// Row label -> (band descriptor, canonical label).
    std::optional<std::pair<std::string, std::string>> resolve_row_value(
        std::string_view token) const;
};

} // namespace tre
