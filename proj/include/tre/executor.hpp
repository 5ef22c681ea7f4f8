#pragma once

#include "tre/agent.hpp"
#include "tre/opbank.hpp"
#include "tre/structure.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tre {

/// Declarative chart description; series descriptors are validated against
/// the originating view and failures recorded rather than thrown.
struct ChartSpec {
    ChartKind kind = ChartKind::bar;
    std::string x;
    std::vector<std::string> series;
    std::vector<std::string> unresolved; // series that did not resolve

    bool well_formed() const { return !series.empty() && unresolved.empty(); }
};

/// Ordered group aggregation result: key rendering -> scalar.
struct GroupedValue {
    std::vector<std::pair<std::string, CellValue>> entries;
};

/// Final or intermediate result of a path.
class Outcome {
  public:
    static Outcome scalar(CellValue value);
    static Outcome records(DataView view);
    static Outcome grouped(GroupedValue value);
    static Outcome chart(ChartSpec spec);

    enum class Kind { scalar, records, grouped, chart };
    Kind kind() const { return static_cast<Kind>(payload_.index()); }

    const CellValue& as_scalar() const { return std::get<CellValue>(payload_); }
    const DataView& as_records() const { return std::get<DataView>(payload_); }
    const GroupedValue& as_grouped() const { return std::get<GroupedValue>(payload_); }
    const ChartSpec& as_chart() const { return std::get<ChartSpec>(payload_); }

    std::string digest() const;

  private:
    std::variant<CellValue, DataView, GroupedValue, ChartSpec> payload_;
};

struct StepTrace {
    StepFlag flag = StepFlag::code;
    std::string content; // reasoning summary or op rendering
    std::optional<OperatorInstance> op; // CODE steps only
    std::string outcome_digest;
    double elapsed = 0.0; // seconds
};

std::string render_trace(const std::vector<StepTrace>& trace);

/// Key-order-preserving partition of the current view.
struct Grouping {
    std::vector<std::string> key_descriptors;
    std::vector<std::pair<std::string, std::vector<std::size_t>>> groups; // key -> record indices
};

struct ExecState {
    DataView view;
    std::optional<Grouping> groups;
    std::vector<StepTrace> trace;
    bool terminal = false;
    std::optional<Outcome> last_outcome;
    std::map<std::string, DataView> aux_views; // JOIN right sides, by name
};

/// f_exec: ran without errors; f_time: seconds; f_type: output shape matched.
struct Feedback {
    int f_exec = 0;
    double f_time = 0.0;
    int f_type = 0;
};

/// Step timing source; the virtual clock ticks one second per operator so
/// golden runs are reproducible.
class ExecClock {
  public:
    virtual ~ExecClock() = default;
    virtual double lap() = 0;
};

class VirtualClock final : public ExecClock {
  public:
    double lap() override { return 1.0; }
};

class WallClock final : public ExecClock {
  public:
    WallClock();
    double lap() override;

  private:
    std::int64_t last_ns_;
};

/// One operator applied to the state. Null never satisfies a FILTER; sum and
/// mean skip Nulls; SORT is stable with Nulls last; AGG collapses a pending
/// grouping (or the whole view) and keeps the measure's descriptor name.
ExecState apply_operator(const OperatorInstance& op, ExecState state);

struct RunResult {
    std::optional<Outcome> outcome;
    Feedback feedback;
    std::vector<StepTrace> trace;
};

/// Runs the path under the [THINK]/[CODE] protocol: one agent THINK step per
/// operator (skipped entirely when budget.limit == 0), then the operator
/// itself. Halts with f_exec = 0 on the first operator error; BudgetExhausted
/// and AgentProtocolError propagate to the caller.
RunResult run_path(const Path& path, const DataView& view, Provider& provider,
                   CallBudget& budget, ExecClock& clock);

/// Shape check against the path's terminal kind: AGG expects a scalar or
/// grouped scalars, SORT/LIMIT a record list, CHART a well-formed spec;
/// anything else scores 0.
int check_type(const Outcome& outcome, OperatorKind terminal_kind);

struct RewardWeights {
    double w_base = 0.7;
    double w_type = 0.2;
    double w_time = 0.1;
    double tau = 10.0; // seconds
};

/// r = 0 when execution failed, else
/// r_max * (w_base + w_type*f_type + w_time*exp(-f_time/tau)).
double compute_reward(const Feedback& feedback, const RewardWeights& weights, double r_max);

} // namespace tre
