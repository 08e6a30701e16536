#pragma once

// Expected-utility decision engine: per-objective contributions, weighted
// expected utility, deterministic argmax selection with a total tie order,
// and the temperature-controlled stochastic action model.
//
// Every function here is pure; callers may evaluate actions and scenarios
// in parallel without coordination.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ethos/model.hpp"

namespace ethos {

struct DecisionReport {
    // action id -> weighted expected utility (the quantity maximized).
    std::map<std::string, double> expected_utilities;
    std::string chosen_action;
    bool tie = false;
    std::vector<std::string> tied_actions;
    // action id -> prescript id -> alpha_j-weighted contribution; each
    // action's contributions sum to its expected utility (within rounding).
    std::map<std::string, std::map<std::string, double>> objective_breakdown;
    std::string mode = "deterministic";  // "deterministic" | "sampled"

    // Present only in sampled mode.
    std::optional<std::map<std::string, double>> action_distribution;
    std::optional<double> temperature;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> draws;

    bool operator==(const DecisionReport&) const = default;
};

/// Sum over dicta of P(c) * w(e,c) * P(e|c) * u(a|c,e) for one prescript e,
/// before the objective weight alpha is applied. Summation runs in
/// lexicographic dictum order for bit-stable results.
double objective_contribution(const ScenarioModel& model, const std::string& action_id,
                              const std::string& prescript_id);

/// Probability-weighted utility of an action over the full context x
/// prescript grid (all objective weights at 1). Expects a valid scenario;
/// throws ErrorKind::UnknownId for a missing action.
double expected_utility(const ScenarioModel& model, const std::string& action_id);

/// Multi-objective form: sum over prescripts of alpha_j times the
/// objective contribution. Identical term-by-term to expected_utility when
/// every alpha_j is 1.
double weighted_expected_utility(const ScenarioModel& model, const std::string& action_id);

/// Validates the scenario, evaluates every action, and picks the argmax of
/// weighted expected utility. Utilities within kTieTolerance of the best are
/// tied; ties break by the lowest priority_rank among each action's
/// strongest prescripts, then by lexicographically smallest action id.
DecisionReport decide(const ScenarioModel& model);

/// Softmax over weighted expected utilities at the given temperature.
/// Sums to 1 within 1e-9; concentrates on the argmax as temperature -> 0
/// and flattens toward uniform as temperature grows.
std::map<std::string, double> action_distribution(const ScenarioModel& model,
                                                  double temperature);

/// One deterministic draw from action_distribution. Identical
/// (model, temperature, seed) always yields the identical action.
std::string sample_action(const ScenarioModel& model, double temperature,
                          std::uint64_t seed);

/// decide() plus the sampling view: attaches the action distribution and
/// `draws` consecutive draws from one generator seeded by `seed` (so
/// draws[0] equals sample_action for the same seed). chosen_action remains
/// the deterministic argmax.
DecisionReport decide_sampled(const ScenarioModel& model, double temperature,
                              std::uint64_t seed, int draws = 1);

}  // namespace ethos
