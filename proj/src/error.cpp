#include "tre/error.hpp"

namespace tre {

std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::malformed_document: return "malformed_document";
    case Errc::overlapping_spans: return "overlapping_spans";
    case Errc::out_of_bounds: return "out_of_bounds";
    case Errc::empty_document: return "empty_document";
    case Errc::unreadable_encoding: return "unreadable_encoding";
    case Errc::no_data_region: return "no_data_region";
    case Errc::agent_protocol: return "agent_protocol";
    case Errc::empty_selection: return "empty_selection";
    case Errc::cyclic_constraints: return "cyclic_constraints";
    case Errc::no_valid_order: return "no_valid_order";
    case Errc::reward_out_of_range: return "reward_out_of_range";
    case Errc::empty_candidates: return "empty_candidates";
    case Errc::unknown_descriptor: return "unknown_descriptor";
    case Errc::type_mismatch: return "type_mismatch";
    case Errc::empty_aggregate: return "empty_aggregate";
    case Errc::duplicate_pivot_key: return "duplicate_pivot_key";
    case Errc::terminal_state: return "terminal_state";
    case Errc::budget_exhausted: return "budget_exhausted";
    case Errc::transport: return "transport";
    case Errc::invalid_reward_spec: return "invalid_reward_spec";
    case Errc::invalid_argument: return "invalid_argument";
    }
    return "unknown";
}

} // namespace tre
