#pragma once

// Empirical property checks over a scenario: consistency of prescript
// priorities under context perturbation, optimality of the decision rule
// against an independent brute-force oracle, robustness of the stochastic
// decision function, and alignment against a reference decision corpus.
// Checks measure constants and report verdicts; they do not prove anything.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ethos/model.hpp"

namespace ethos {

enum class PerturbMode { Context, Conditional };

struct PerturbationSpec {
    PerturbMode mode = PerturbMode::Context;
    double magnitude = 0.1;  // L1 budget per perturbed distribution, in [0, 2]
    int samples = 1000;
    std::uint64_t seed = 0;
};

struct VerifierReport {
    // "consistency" | "optimality" | "robustness" | "alignment"
    std::string property;
    bool pass = false;
    std::map<std::string, double> measured;
    long trials = 0;
    // Per-trial counterexamples. For perturbation checks these are the
    // derived per-trial seeds (replayable); for the optimality check they
    // are indices into the sorted action list of actions that beat the
    // chosen one beyond tolerance. Alignment reports disagreements in
    // `measured` only.
    std::vector<std::uint64_t> failures;

    bool operator==(const VerifierReport&) const = default;
};

/// Consistency: perturbs P(C) within the L1 budget, re-projected onto the
/// simplex, and measures the L1 change of the prescript marginal
/// P(e) = sum_c P(c) P(e|c) per unit of total-variation context change.
/// l_hat is the worst observed ratio; pass iff l_hat <= l_max.
/// A zero budget (or a single-dictum scenario) yields zero trials and a
/// vacuous pass. Requires spec.mode == Context.
VerifierReport check_consistency(const ScenarioModel& model, const PerturbationSpec& spec,
                                 double l_max);

/// Same question asked of the conditional table itself: every P(E|c) row is
/// perturbed within the budget and the marginal's L1 change is taken per
/// unit of context-weighted row change. Requires spec.mode == Conditional.
VerifierReport check_conditional_consistency(const ScenarioModel& model,
                                             const PerturbationSpec& spec, double l_max);

/// Optimality: enumerates every action and recomputes expected utility with
/// an independent accumulation order (Kahan, prescript-major); the chosen
/// action's oracle utility must be within 1e-9 of the oracle maximum.
/// Errors with ErrorKind::TooLarge above 10^6 grid cells.
VerifierReport check_optimality(const ScenarioModel& model);

/// Robustness: perturbs P(C) and measures the L1 change of the softmax
/// action distribution (at `temperature`) per unit L1 context change.
/// k_hat is the worst ratio; pass iff k_hat <= k_max when a bound is given,
/// otherwise iff every ratio is finite. Also counts perturbations that
/// flipped the deterministic argmax and reports the smallest flipping
/// perturbation. Requires spec.mode == Context.
VerifierReport check_robustness(const ScenarioModel& model, const PerturbationSpec& spec,
                                std::optional<double> k_max, double temperature = 1.0);

/// Alignment: runs the decision engine on every reference scenario and
/// measures (a) exact-agreement rate against the reference actions and
/// (b) the Pearson correlation between the engine's utility of the
/// reference action and its maximum utility, across the corpus.
/// Pass iff agreement > theta (strict).
VerifierReport check_alignment(
    const std::vector<std::pair<ScenarioModel, std::string>>& reference, double theta);

}  // namespace ethos
