#include "tre/planner.hpp"

#include "tre/error.hpp"

#include <algorithm>
#include <cmath>
#include <format>

namespace tre {

std::string_view to_string(UpdateMode mode) {
    return mode == UpdateMode::mean ? "mean" : "ema";
}

UpdateMode update_mode_from(std::string_view name) {
    if (name == "mean") {
        return UpdateMode::mean;
    }
    if (name == "ema") {
        return UpdateMode::ema;
    }
    raise(Errc::invalid_argument, std::format("unknown update mode '{}'", name));
}

void PlannerConfig::validate() const {
    if (!(alpha > 0)) {
        raise(Errc::invalid_argument, "alpha must be > 0");
    }
    if (!(eta > 0 && eta <= 1)) {
        raise(Errc::invalid_argument, "eta must be in (0, 1]");
    }
    if (!(r_max > 0)) {
        raise(Errc::invalid_argument, "r_max must be > 0");
    }
    if (k < 1) {
        raise(Errc::invalid_argument, "k must be >= 1");
    }
}

double expectation_score(const PathStats& stats, std::int64_t total_n, double alpha) {
    double exploration = std::sqrt(std::log(static_cast<double>(total_n) + 1.0) /
                                   (1.0 + static_cast<double>(stats.n)));
    return stats.r_hat + alpha * stats.prior * exploration;
}

double score_bound(double r_max, double alpha, std::int64_t total_n) {
    return r_max + alpha * std::sqrt(std::log(static_cast<double>(total_n) + 1.0));
}

double structural_prior(const Path& path, const OperationMap& map,
                        const std::vector<ExperienceNote>& notes) {
    (void)map;
    double prior = 1.0;
    for (const ExperienceNote& note : notes) {
        if (note_flags_path(note, path)) {
            prior *= 0.8;
        }
    }
    return std::max(prior, 0.1);
}

PathStats update_expectation(PathStats stats, double reward, const PlannerConfig& config) {
    if (reward < 0.0 || reward > config.r_max) {
        raise(Errc::reward_out_of_range,
              std::format("reward {} outside [0, {}]", reward, config.r_max));
    }
    if (config.update_mode == UpdateMode::mean) {
        stats.r_hat = (static_cast<double>(stats.n) * stats.r_hat + reward) /
                      (static_cast<double>(stats.n) + 1.0);
    } else {
        stats.r_hat = (1.0 - config.eta) * stats.r_hat + config.eta * reward;
    }
    stats.n += 1;
    return stats;
}

PathStats& PlannerState::ensure(const std::string& signature, double prior) {
    auto it = stats.find(signature);
    if (it == stats.end()) {
        PathStats fresh;
        fresh.prior = prior;
        it = stats.emplace(signature, fresh).first;
    }
    return it->second;
}

void PlannerState::commit(const std::string& signature, double reward,
                          const PlannerConfig& config) {
    PathStats& entry = ensure(signature, 1.0);
    entry = update_expectation(entry, reward, config);
    total_n += 1;
}

nlohmann::json PlannerState::to_json() const {
    nlohmann::json paths = nlohmann::json::object();
    for (const auto& [signature, entry] : stats) {
        paths[signature] = {{"r_hat", entry.r_hat}, {"n", entry.n}, {"prior", entry.prior}};
    }
    return {{"version", 1}, {"total_n", total_n}, {"paths", paths}};
}

PlannerState PlannerState::from_json(const nlohmann::json& doc) {
    PlannerState state;
    try {
        if (doc.value("version", 0) != 1) {
            raise(Errc::malformed_document, "unsupported planner state version");
        }
        state.total_n = doc.value("total_n", std::int64_t{0});
        for (const auto& [signature, entry] : doc.at("paths").items()) {
            PathStats stats;
            stats.r_hat = entry.at("r_hat").get<double>();
            stats.n = entry.at("n").get<std::int64_t>();
            stats.prior = entry.at("prior").get<double>();
            state.stats[signature] = stats;
        }
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::malformed_document, e.what());
    }
    return state;
}

std::vector<Path> select_top_k(PlannerState& state, const std::vector<Path>& candidates,
                               const PlannerConfig& config,
                               const std::function<double(const Path&)>& prior_fn) {
    if (candidates.empty()) {
        raise(Errc::empty_candidates, "no candidate paths to select from");
    }
    struct Scored {
        const Path* path;
        double score;
        double prior;
    };
    std::vector<Scored> scored;
    scored.reserve(candidates.size());
    for (const Path& path : candidates) {
        double prior = prior_fn ? prior_fn(path) : 1.0;
        const PathStats& stats = state.ensure(path.signature, prior);
        scored.push_back({&path, expectation_score(stats, state.total_n, config.alpha),
                          stats.prior});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        if (a.prior != b.prior) {
            return a.prior > b.prior;
        }
        return a.path->signature < b.path->signature;
    });
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(config.k), scored.size());
    std::vector<Path> selected;
    selected.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        selected.push_back(*scored[i].path);
    }
    return selected;
}

} // namespace tre
