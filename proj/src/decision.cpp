#include "ethos/decision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ethos/rng.hpp"
#include "numeric_util.hpp"

namespace ethos {

namespace {

void require_action(const ScenarioModel& model, const std::string& action_id) {
    if (!model.has_action(action_id))
        throw Error(ErrorKind::UnknownId, "unknown action id '" + action_id + "'");
}

void require_temperature(double temperature) {
    if (!std::isfinite(temperature) || temperature <= 0.0)
        throw Error(ErrorKind::InvalidArgument, "temperature must be finite and > 0");
}

}  // namespace

double objective_contribution(const ScenarioModel& model, const std::string& action_id,
                              const std::string& prescript_id) {
    require_action(model, action_id);
    double acc = 0.0;
    for (const auto& [dictum_id, p_context] : model.context.entries) {
        acc += p_context * model.baseline_weight(prescript_id, dictum_id) *
               model.conditional_probability(dictum_id, prescript_id) *
               model.utility(action_id, dictum_id, prescript_id);
    }
    return acc;
}

// expected_utility and weighted_expected_utility share the same loop nest and
// term expression so that unit objective weights give bit-identical sums.
double expected_utility(const ScenarioModel& model, const std::string& action_id) {
    require_action(model, action_id);
    double acc = 0.0;
    for (const auto& [dictum_id, p_context] : model.context.entries) {
        for (const auto& [prescript_id, p_cond] : model.conditional.table.at(dictum_id)) {
            acc += p_context * model.baseline_weight(prescript_id, dictum_id) * p_cond *
                   model.utility(action_id, dictum_id, prescript_id);
        }
    }
    return acc;
}

double weighted_expected_utility(const ScenarioModel& model, const std::string& action_id) {
    require_action(model, action_id);
    double acc = 0.0;
    for (const auto& [dictum_id, p_context] : model.context.entries) {
        for (const auto& [prescript_id, p_cond] : model.conditional.table.at(dictum_id)) {
            acc += model.objective_weight(prescript_id) * p_context *
                   model.baseline_weight(prescript_id, dictum_id) * p_cond *
                   model.utility(action_id, dictum_id, prescript_id);
        }
    }
    return acc;
}

DecisionReport decide(const ScenarioModel& model) {
    require_valid(model);

    DecisionReport report;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& action_id : model.action_ids()) {
        const double u = weighted_expected_utility(model, action_id);
        report.expected_utilities[action_id] = u;
        best = std::max(best, u);

        auto& breakdown = report.objective_breakdown[action_id];
        for (const auto& prescript_id : model.prescript_ids()) {
            breakdown[prescript_id] = model.objective_weight(prescript_id) *
                                      objective_contribution(model, action_id, prescript_id);
        }
    }

    for (const auto& [action_id, u] : report.expected_utilities) {
        if (std::abs(u - best) <= kTieTolerance) report.tied_actions.push_back(action_id);
    }
    report.tie = report.tied_actions.size() > 1;

    // Among tied actions: lowest priority_rank over each action's strongest
    // prescripts, then smallest action id. Gives a total, reproducible order.
    auto best_rank = [&](const std::string& action_id) {
        const auto& breakdown = report.objective_breakdown.at(action_id);
        double top = -std::numeric_limits<double>::infinity();
        for (const auto& [_, v] : breakdown) top = std::max(top, v);
        int rank = std::numeric_limits<int>::max();
        for (const auto& [prescript_id, v] : breakdown) {
            if (v >= top - kTieTolerance)
                rank = std::min(rank, model.prescript_rank(prescript_id));
        }
        return rank;
    };

    report.chosen_action = report.tied_actions.front();
    int chosen_rank = best_rank(report.chosen_action);
    for (const auto& action_id : report.tied_actions) {
        const int rank = best_rank(action_id);
        if (rank < chosen_rank) {
            chosen_rank = rank;
            report.chosen_action = action_id;
        }
    }
    if (!report.tie) report.tied_actions.clear();
    return report;
}

std::map<std::string, double> action_distribution(const ScenarioModel& model,
                                                  double temperature) {
    require_temperature(temperature);

    const auto action_ids = model.action_ids();
    std::vector<double> scores;
    scores.reserve(action_ids.size());
    for (const auto& action_id : action_ids)
        scores.push_back(weighted_expected_utility(model, action_id));

    const std::vector<double> probs = detail::stable_softmax(scores, temperature);
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < action_ids.size(); ++i) out[action_ids[i]] = probs[i];
    return out;
}

std::string sample_action(const ScenarioModel& model, double temperature,
                          std::uint64_t seed) {
    const auto dist = action_distribution(model, temperature);
    Rng rng(seed);
    std::vector<double> weights;
    std::vector<const std::string*> ids;
    weights.reserve(dist.size());
    for (const auto& [action_id, p] : dist) {
        ids.push_back(&action_id);
        weights.push_back(p);
    }
    return *ids[rng.categorical(weights)];
}

DecisionReport decide_sampled(const ScenarioModel& model, double temperature,
                              std::uint64_t seed, int draws) {
    require_temperature(temperature);
    if (draws < 1) throw Error(ErrorKind::InvalidArgument, "draw count must be >= 1");

    DecisionReport report = decide(model);
    report.mode = "sampled";
    report.temperature = temperature;
    report.seed = seed;
    report.action_distribution = action_distribution(model, temperature);

    std::vector<double> weights;
    std::vector<const std::string*> ids;
    for (const auto& [action_id, p] : *report.action_distribution) {
        ids.push_back(&action_id);
        weights.push_back(p);
    }
    Rng rng(seed);
    report.draws.reserve(static_cast<std::size_t>(draws));
    for (int i = 0; i < draws; ++i) report.draws.push_back(*ids[rng.categorical(weights)]);
    return report;
}

}  // namespace ethos
