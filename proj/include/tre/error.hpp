#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tre {

enum class Errc {
    malformed_document,
    overlapping_spans,
    out_of_bounds,
    empty_document,
    unreadable_encoding,
    no_data_region,
    agent_protocol,
    empty_selection,
    cyclic_constraints,
    no_valid_order,
    reward_out_of_range,
    empty_candidates,
    unknown_descriptor,
    type_mismatch,
    empty_aggregate,
    duplicate_pivot_key,
    terminal_state,
    budget_exhausted,
    transport,
    invalid_reward_spec,
    invalid_argument,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail),
          code_(code),
          detail_(detail) {}

    Errc code() const { return code_; }
    const std::string& detail() const { return detail_; }

  private:
    Errc code_;
    std::string detail_;
};

[[noreturn]] inline void raise(Errc code, const std::string& detail) {
    throw Error(code, detail);
}

} // namespace tre
