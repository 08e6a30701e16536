#include "ethos/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ethos/rng.hpp"
#include "numeric_util.hpp"

namespace ethos {

std::vector<double> PolicyState::action_probabilities(const std::string& dictum_id) const {
    auto it = preferences.find(dictum_id);
    if (it == preferences.end())
        throw Error(ErrorKind::UnknownId, "policy has no dictum '" + dictum_id + "'");
    std::vector<double> scores;
    scores.reserve(it->second.size());
    for (const auto& [_, v] : it->second) scores.push_back(v);
    return detail::stable_softmax(scores, temperature);
}

namespace {

void check_params(const LearningParams& p) {
    if (p.episodes < 1)
        throw Error(ErrorKind::InvalidArgument, "episodes must be >= 1");
    if (p.window < 1)
        throw Error(ErrorKind::InvalidArgument, "stability window must be >= 1");
    if (p.episodes < p.window)
        throw Error(ErrorKind::InvalidArgument, "episodes must be >= the stability window");
    if (!(p.eps_conv > 0.0 && p.eps_conv < 1.0))
        throw Error(ErrorKind::InvalidArgument, "eps_conv must be in (0, 1)");
    if (!(p.tau0 > 0.0) || !(p.tau_min > 0.0))
        throw Error(ErrorKind::InvalidArgument, "temperatures must be > 0");
    if (!(p.noise_amplitude >= 0.0) || !std::isfinite(p.noise_amplitude))
        throw Error(ErrorKind::InvalidArgument, "noise amplitude must be finite and >= 0");
}

}  // namespace

LearningResult run_learning(const ScenarioModel& model, const LearningParams& params) {
    require_valid(model);
    check_params(params);

    const auto dictum_ids = model.dictum_ids();
    const auto action_ids = model.action_ids();

    // True value of (dictum, action): the weighted conditional expected
    // utility, i.e. what the decision engine maximizes when the context is
    // pinned to that dictum. With default weights this is the plain
    // sum of P(e|c) * u(a|c,e).
    std::map<std::string, std::map<std::string, double>> true_value;
    std::map<std::string, std::string> best_action;
    for (const auto& c : dictum_ids) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& a : action_ids) {
            double v = 0.0;
            for (const auto& e : model.prescript_ids()) {
                v += model.objective_weight(e) * model.baseline_weight(e, c) *
                     model.conditional_probability(c, e) * model.utility(a, c, e);
            }
            true_value[c][a] = v;
            if (v > best) {
                best = v;
                best_action[c] = a;
            }
        }
    }

    // Dicta that can actually occur; contexts with zero probability are never
    // visited and do not gate convergence.
    std::vector<std::string> live_dicta;
    std::vector<double> context_weights;
    for (const auto& c : dictum_ids) {
        const double p = model.context_probability(c);
        if (p > 0.0) {
            live_dicta.push_back(c);
            context_weights.push_back(p);
        }
    }

    PolicyState state;
    for (const auto& c : dictum_ids)
        for (const auto& a : action_ids) {
            state.visits[c][a] = 0.0;
            state.preferences[c][a] = 0.0;
        }

    // Worst case over live dicta of the probability the current policy
    // assigns to the known-optimal action.
    auto worst_best_probability = [&]() {
        double worst = 1.0;
        for (const auto& c : live_dicta) {
            const auto probs = state.action_probabilities(c);
            std::size_t best_idx = 0;
            for (std::size_t i = 0; i < action_ids.size(); ++i)
                if (action_ids[i] == best_action[c]) best_idx = i;
            worst = std::min(worst, probs[best_idx]);
        }
        return worst;
    };

    LearningResult result;
    Rng rng(params.seed);

    std::vector<double> series;
    series.reserve(static_cast<std::size_t>(params.episodes));

    for (long t = 1; t <= params.episodes; ++t) {
        state.step = t;
        state.temperature = std::max(params.tau_min, params.tau0 / std::sqrt(double(t)));

        const std::string& c = live_dicta[rng.categorical(context_weights)];
        const auto probs = state.action_probabilities(c);
        const std::string& a = action_ids[rng.categorical(probs)];

        double reward = true_value[c][a];
        if (params.noise_amplitude > 0.0)
            reward += params.noise_amplitude * (2.0 * rng.uniform01() - 1.0);

        double& visits = state.visits[c][a];
        double& pref = state.preferences[c][a];
        const double eta = 1.0 / (1.0 + visits);
        pref += eta * (reward - pref);
        visits += 1.0;

        const double p_worst = worst_best_probability();
        series.push_back(p_worst);

        if (params.record_episodes) {
            const auto after = state.action_probabilities(c);
            std::size_t best_idx = 0;
            for (std::size_t i = 0; i < action_ids.size(); ++i)
                if (action_ids[i] == best_action[c]) best_idx = i;
            result.episodes.push_back({t, c, a, reward, after[best_idx]});
        }
    }

    ConvergenceReport& report = result.report;
    report.stability_window = params.window;
    report.final_probability = series.back();

    // Converged when the optimal action's probability stayed at or above
    // 1 - eps_conv through the entire final window. convergence_step is the
    // episode at which that stable window first completed.
    long last_below = 0;
    for (long t = 1; t <= params.episodes; ++t)
        if (series[static_cast<std::size_t>(t - 1)] < 1.0 - params.eps_conv) last_below = t;
    if (params.episodes - last_below >= params.window) {
        report.converged = true;
        report.convergence_step = last_below + params.window;
    }

    const long stride = std::max<long>(1, params.episodes / 256);
    for (long t = 1; t <= params.episodes; ++t) {
        if (t % stride == 0 || t == params.episodes)
            report.trajectory.emplace_back(t, series[static_cast<std::size_t>(t - 1)]);
    }

    result.final_state = std::move(state);
    return result;
}

ConvergenceReport run_learning(const ScenarioModel& model, long episodes, std::uint64_t seed,
                               double eps_conv, long window) {
    LearningParams params;
    params.episodes = episodes;
    params.seed = seed;
    params.eps_conv = eps_conv;
    params.window = window;
    return run_learning(model, params).report;
}

double policy_distance(const PolicyState& a, const PolicyState& b) {
    auto keys_match = [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return false;
        auto ix = x.begin();
        auto iy = y.begin();
        for (; ix != x.end(); ++ix, ++iy)
            if (ix->first != iy->first) return false;
        return true;
    };
    if (!keys_match(a.preferences, b.preferences))
        throw Error(ErrorKind::Mismatch, "policy states cover different dicta");
    for (auto ia = a.preferences.begin(), ib = b.preferences.begin(); ia != a.preferences.end();
         ++ia, ++ib) {
        if (!keys_match(ia->second, ib->second))
            throw Error(ErrorKind::Mismatch, "policy states cover different actions");
    }

    double worst = 0.0;
    for (const auto& [dictum_id, _] : a.preferences) {
        const auto pa = a.action_probabilities(dictum_id);
        const auto pb = b.action_probabilities(dictum_id);
        worst = std::max(worst, detail::l1_distance(pa, pb));
    }
    return worst;
}

}  // namespace ethos
