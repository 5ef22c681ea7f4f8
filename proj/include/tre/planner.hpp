#pragma once

#include "tre/experience.hpp"
#include "tre/opbank.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace tre {

/// Per-path bandit statistics: estimated return, execution count, and a
/// structural prior in [0, 1].
struct PathStats {
    double r_hat = 0.0;
    std::int64_t n = 0;
    double prior = 1.0;
};

enum class UpdateMode { mean, ema };

std::string_view to_string(UpdateMode mode);
UpdateMode update_mode_from(std::string_view name);

struct PlannerConfig {
    double alpha = 1.0;  // exploration coefficient, > 0
    double eta = 0.3;    // EMA learning rate, (0, 1]
    double r_max = 1.0;  // reward ceiling, > 0
    UpdateMode update_mode = UpdateMode::mean;
    int k = 1; // top-k selection width, >= 1

    void validate() const;
};

/// r_hat + alpha * prior * sqrt(ln(total_n + 1) / (1 + n)). Natural log; the
/// +1 inside the log removes the cold-start singularity at total_n = 0.
double expectation_score(const PathStats& stats, std::int64_t total_n, double alpha);

/// r_max + alpha * sqrt(ln(total_n + 1)); expectation_score never exceeds it.
double score_bound(double r_max, double alpha, std::int64_t total_n);

/// Base 1.0, multiplied by 0.8 per experience note whose anti-pattern the
/// path exhibits, floored at 0.1.
double structural_prior(const Path& path, const OperationMap& map,
                        const std::vector<ExperienceNote>& notes);

/// MEAN: (n*r_hat + reward) / (n + 1); EMA: (1-eta)*r_hat + eta*reward.
/// Both increment n. Rewards outside [0, r_max] are rejected.
PathStats update_expectation(PathStats stats, double reward, const PlannerConfig& config);

struct PlannerState {
    std::map<std::string, PathStats> stats; // keyed by path signature
    std::int64_t total_n = 0;

    PathStats& ensure(const std::string& signature, double prior);
    /// Atomic read-modify-write of (stats, total_n) for one executed path.
    void commit(const std::string& signature, double reward, const PlannerConfig& config);

    nlohmann::json to_json() const;
    static PlannerState from_json(const nlohmann::json& doc);
};

/// Candidates ordered by expectation score (ties: higher prior, then
/// lexicographic signature); returns the first min(k, |candidates|). Unseen
/// signatures get fresh stats with `prior_fn`-supplied priors.
std::vector<Path> select_top_k(PlannerState& state, const std::vector<Path>& candidates,
                               const PlannerConfig& config,
                               const std::function<double(const Path&)>& prior_fn = {});

} // namespace tre
