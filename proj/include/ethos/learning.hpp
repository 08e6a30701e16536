#pragma once

// Iterative policy learning: per-(dictum, action) incremental value averaging
// with softmax exploration and a decaying temperature. Rewards are the true
// conditional expected utilities, so a learned policy should settle on the
// same per-dictum optimum the decision engine computes directly.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ethos/model.hpp"

namespace ethos {

struct PolicyState {
    // dictum id -> action id -> visit count / running mean reward.
    std::map<std::string, std::map<std::string, double>> visits;
    std::map<std::string, std::map<std::string, double>> preferences;
    long step = 0;
    double temperature = 1.0;

    /// Softmax over this state's preferences for one dictum, at this state's
    /// temperature, in lexicographic action order.
    std::vector<double> action_probabilities(const std::string& dictum_id) const;
};

struct EpisodeRecord {
    long step = 0;
    std::string dictum_id;
    std::string action_id;
    double reward = 0.0;
    double best_probability = 0.0;  // P(best action | this episode's dictum)
};

struct ConvergenceReport {
    bool converged = false;
    std::optional<long> convergence_step;  // first step completing a stable window
    double final_probability = 0.0;
    // (step, worst-case-over-dicta probability of the optimal action),
    // subsampled to at most ~256 points plus the final step.
    std::vector<std::pair<long, double>> trajectory;
    long stability_window = 0;
};

struct LearningParams {
    long episodes = 10000;
    std::uint64_t seed = 0;
    double eps_conv = 0.05;       // converged when P(best) >= 1 - eps_conv ...
    long window = 500;            // ... for this many consecutive final episodes
    double tau0 = 1.0;            // exploration temperature tau_t = max(tau_min, tau0/sqrt(t))
    double tau_min = 0.05;
    double noise_amplitude = 0.0;  // optional zero-mean uniform reward noise
    bool record_episodes = false;
};

struct LearningResult {
    ConvergenceReport report;
    PolicyState final_state;
    std::vector<EpisodeRecord> episodes;  // filled when record_episodes is set
};

/// Runs the learning loop. Fixed (model, params) reproduces the trajectory
/// bit for bit. The step size 1/(1 + visits) makes each preference the
/// running mean of its observed rewards (Robbins-Monro schedule).
LearningResult run_learning(const ScenarioModel& model, const LearningParams& params);

/// Convenience overload matching the basic parameter set.
ConvergenceReport run_learning(const ScenarioModel& model, long episodes, std::uint64_t seed,
                               double eps_conv, long window);

/// Max over dicta of the L1 distance between the two states' induced softmax
/// action distributions (each at its own temperature). Zero only when the
/// induced policies agree everywhere.
double policy_distance(const PolicyState& a, const PolicyState& b);

}  // namespace ethos
