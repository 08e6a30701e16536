#include "ethos/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ethos/decision.hpp"
#include "ethos/rng.hpp"
#include "numeric_util.hpp"

namespace ethos {

namespace {

constexpr double kOptimalityTolerance = 1e-9;
constexpr std::size_t kExhaustiveCellLimit = 1000000;
constexpr int kPerturbRetries = 64;

void check_spec(const PerturbationSpec& spec, PerturbMode expected) {
    if (spec.mode != expected)
        throw Error(ErrorKind::InvalidArgument, "perturbation spec has the wrong mode");
    if (!std::isfinite(spec.magnitude) || spec.magnitude < 0.0 || spec.magnitude > 2.0)
        throw Error(ErrorKind::InvalidArgument,
                    "perturbation magnitude must lie in [0, 2] (L1 simplex diameter)");
    if (spec.samples < 1)
        throw Error(ErrorKind::InvalidArgument, "perturbation sample count must be >= 1");
}

// One perturbed distribution within the L1 budget: draw a uniform simplex
// point q (normalized exponentials), then move from p toward q far enough to
// hit a uniformly chosen fraction of the budget. The convex combination stays
// on the simplex, so no explicit projection step is needed afterwards.
// Returns the realized L1 distance, 0.0 if no usable direction was found.
double perturb_simplex(const std::vector<double>& p, double budget, Rng& rng,
                       std::vector<double>& out) {
    out = p;
    if (p.size() < 2 || budget <= 0.0) return 0.0;
    for (int attempt = 0; attempt < kPerturbRetries; ++attempt) {
        std::vector<double> q(p.size());
        double total = 0.0;
        for (double& g : q) {
            g = -std::log(rng.uniform_positive());
            total += g;
        }
        for (double& g : q) g /= total;

        double l1 = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(q[i] - p[i]);
        if (l1 <= 0.0) continue;

        const double target = budget * rng.uniform_positive();
        const double t = std::min(1.0, target / l1);
        double realized = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            out[i] = p[i] + t * (q[i] - p[i]);
            realized += std::abs(out[i] - p[i]);
        }
        if (realized > 0.0) return realized;
    }
    out = p;
    return 0.0;
}

std::vector<double> context_vector(const ScenarioModel& model,
                                   const std::vector<std::string>& dictum_ids) {
    std::vector<double> p;
    p.reserve(dictum_ids.size());
    for (const auto& c : dictum_ids) p.push_back(model.context_probability(c));
    return p;
}

// Prescript marginal P(e) = sum_c P(c) P(e|c) in lexicographic prescript order.
std::vector<double> prescript_marginal(const ScenarioModel& model,
                                       const std::vector<std::string>& dictum_ids,
                                       const std::vector<std::string>& prescript_ids,
                                       const std::vector<double>& context) {
    std::vector<double> marginal(prescript_ids.size(), 0.0);
    for (std::size_t i = 0; i < dictum_ids.size(); ++i) {
        const auto& row = model.conditional.table.at(dictum_ids[i]);
        for (std::size_t j = 0; j < prescript_ids.size(); ++j)
            marginal[j] += context[i] * row.at(prescript_ids[j]);
    }
    return marginal;
}

void set_context(ScenarioModel& model, const std::vector<std::string>& dictum_ids,
                 const std::vector<double>& values) {
    for (std::size_t i = 0; i < dictum_ids.size(); ++i)
        model.context.entries[dictum_ids[i]] = values[i];
}

}  // namespace

VerifierReport check_consistency(const ScenarioModel& model, const PerturbationSpec& spec,
                                 double l_max) {
    require_valid(model);
    check_spec(spec, PerturbMode::Context);
    if (!(l_max > 0.0))
        throw Error(ErrorKind::InvalidArgument, "l_max must be > 0");

    VerifierReport report;
    report.property = "consistency";

    const auto dictum_ids = model.dictum_ids();
    const auto prescript_ids = model.prescript_ids();
    const auto base_context = context_vector(model, dictum_ids);
    const auto base_marginal = prescript_marginal(model, dictum_ids, prescript_ids, base_context);

    double l_hat = 0.0;
    for (int trial = 0; trial < spec.samples; ++trial) {
        const std::uint64_t trial_seed = mix_seed(spec.seed, static_cast<std::uint64_t>(trial));
        Rng rng(trial_seed);
        std::vector<double> perturbed;
        const double l1 = perturb_simplex(base_context, spec.magnitude, rng, perturbed);
        if (l1 <= 0.0) continue;

        const auto marginal =
            prescript_marginal(model, dictum_ids, prescript_ids, perturbed);
        const double tv_context = 0.5 * l1;
        const double ratio = detail::l1_distance(base_marginal, marginal) / tv_context;
        report.trials += 1;
        l_hat = std::max(l_hat, ratio);
        if (ratio > l_max) report.failures.push_back(trial_seed);
    }

    if (report.trials > 0) {
        report.measured["l_hat"] = l_hat;
        report.measured["worst_ratio"] = l_hat;
    }
    report.pass = report.failures.empty();
    return report;
}

VerifierReport check_conditional_consistency(const ScenarioModel& model,
                                             const PerturbationSpec& spec, double l_max) {
    require_valid(model);
    check_spec(spec, PerturbMode::Conditional);
    if (!(l_max > 0.0))
        throw Error(ErrorKind::InvalidArgument, "l_max must be > 0");

    VerifierReport report;
    report.property = "consistency";

    const auto dictum_ids = model.dictum_ids();
    const auto prescript_ids = model.prescript_ids();
    const auto base_context = context_vector(model, dictum_ids);
    const auto base_marginal = prescript_marginal(model, dictum_ids, prescript_ids, base_context);

    double l_hat = 0.0;
    for (int trial = 0; trial < spec.samples; ++trial) {
        const std::uint64_t trial_seed = mix_seed(spec.seed, static_cast<std::uint64_t>(trial));
        Rng rng(trial_seed);

        ScenarioModel perturbed = model;
        double weighted_tv = 0.0;  // sum_c P(c) * TV(row_c, row_c')
        for (std::size_t i = 0; i < dictum_ids.size(); ++i) {
            const auto& row = model.conditional.table.at(dictum_ids[i]);
            std::vector<double> base_row;
            base_row.reserve(prescript_ids.size());
            for (const auto& e : prescript_ids) base_row.push_back(row.at(e));
            std::vector<double> new_row;
            const double l1 = perturb_simplex(base_row, spec.magnitude, rng, new_row);
            weighted_tv += base_context[i] * 0.5 * l1;
            auto& target = perturbed.conditional.table.at(dictum_ids[i]);
            for (std::size_t j = 0; j < prescript_ids.size(); ++j)
                target[prescript_ids[j]] = new_row[j];
        }
        if (weighted_tv <= 0.0) continue;

        const auto marginal =
            prescript_marginal(perturbed, dictum_ids, prescript_ids, base_context);
        const double ratio = detail::l1_distance(base_marginal, marginal) / weighted_tv;
        report.trials += 1;
        l_hat = std::max(l_hat, ratio);
        if (ratio > l_max) report.failures.push_back(trial_seed);
    }

    if (report.trials > 0) {
        report.measured["l_hat"] = l_hat;
        report.measured["worst_ratio"] = l_hat;
    }
    report.pass = report.failures.empty();
    return report;
}

VerifierReport check_optimality(const ScenarioModel& model) {
    require_valid(model);

    const auto action_ids = model.action_ids();
    const auto dictum_ids = model.dictum_ids();
    const auto prescript_ids = model.prescript_ids();
    const std::size_t cells = action_ids.size() * dictum_ids.size() * prescript_ids.size();
    if (cells > kExhaustiveCellLimit)
        throw Error(ErrorKind::TooLarge,
                    "scenario has " + std::to_string(cells) +
                        " utility cells; the exhaustive check allows at most " +
                        std::to_string(kExhaustiveCellLimit));

    const DecisionReport decision = decide(model);

    // Independent oracle: Kahan compensated summation, prescript-major order
    // (the engine accumulates naively in dictum-major order).
    auto oracle_utility = [&](const std::string& action_id) {
        detail::KahanAccumulator acc;
        for (const auto& e : prescript_ids) {
            const double alpha = model.objective_weight(e);
            for (const auto& c : dictum_ids) {
                acc.add(alpha * model.baseline_weight(e, c) * model.context_probability(c) *
                        model.conditional_probability(c, e) * model.utility(action_id, c, e));
            }
        }
        return acc.value();
    };

    VerifierReport report;
    report.property = "optimality";
    report.trials = static_cast<long>(action_ids.size());

    double oracle_max = -std::numeric_limits<double>::infinity();
    std::vector<double> oracle_values(action_ids.size(), 0.0);
    for (std::size_t i = 0; i < action_ids.size(); ++i) {
        oracle_values[i] = oracle_utility(action_ids[i]);
        oracle_max = std::max(oracle_max, oracle_values[i]);
    }

    double chosen_value = 0.0;
    for (std::size_t i = 0; i < action_ids.size(); ++i) {
        if (action_ids[i] == decision.chosen_action) chosen_value = oracle_values[i];
    }
    for (std::size_t i = 0; i < action_ids.size(); ++i) {
        if (oracle_values[i] > chosen_value + kOptimalityTolerance)
            report.failures.push_back(static_cast<std::uint64_t>(i));
    }

    report.measured["gap"] = oracle_max - chosen_value;
    report.measured["oracle_max"] = oracle_max;
    report.pass = report.failures.empty();
    return report;
}

VerifierReport check_robustness(const ScenarioModel& model, const PerturbationSpec& spec,
                                std::optional<double> k_max, double temperature) {
    require_valid(model);
    check_spec(spec, PerturbMode::Context);
    if (!std::isfinite(temperature) || temperature <= 0.0)
        throw Error(ErrorKind::InvalidArgument, "temperature must be finite and > 0");
    if (k_max && !(*k_max > 0.0))
        throw Error(ErrorKind::InvalidArgument, "k_max must be > 0");

    VerifierReport report;
    report.property = "robustness";

    const auto dictum_ids = model.dictum_ids();
    const auto base_context = context_vector(model, dictum_ids);
    const auto base_dist = action_distribution(model, temperature);
    const std::string base_choice = decide(model).chosen_action;

    std::vector<double> base_probs;
    base_probs.reserve(base_dist.size());
    for (const auto& [_, p] : base_dist) base_probs.push_back(p);

    double k_hat = 0.0;
    long flips = 0;
    double min_flip = std::numeric_limits<double>::infinity();

    for (int trial = 0; trial < spec.samples; ++trial) {
        const std::uint64_t trial_seed = mix_seed(spec.seed, static_cast<std::uint64_t>(trial));
        Rng rng(trial_seed);
        std::vector<double> perturbed_context;
        const double l1 = perturb_simplex(base_context, spec.magnitude, rng, perturbed_context);
        if (l1 <= 0.0) continue;

        ScenarioModel perturbed = model;
        set_context(perturbed, dictum_ids, perturbed_context);

        const auto dist = action_distribution(perturbed, temperature);
        std::vector<double> probs;
        probs.reserve(dist.size());
        for (const auto& [_, p] : dist) probs.push_back(p);

        const double ratio = detail::l1_distance(base_probs, probs) / l1;
        report.trials += 1;
        k_hat = std::max(k_hat, ratio);

        const bool over_threshold = k_max ? ratio > *k_max : !std::isfinite(ratio);
        if (over_threshold) report.failures.push_back(trial_seed);

        if (decide(perturbed).chosen_action != base_choice) {
            flips += 1;
            min_flip = std::min(min_flip, l1);
        }
    }

    if (report.trials > 0) {
        report.measured["k_hat"] = k_hat;
        report.measured["worst_ratio"] = k_hat;
    }
    report.measured["argmax_flips"] = static_cast<double>(flips);
    if (flips > 0) report.measured["min_flip_l1"] = min_flip;
    report.measured["temperature"] = temperature;
    report.pass = report.failures.empty();
    return report;
}

VerifierReport check_alignment(
    const std::vector<std::pair<ScenarioModel, std::string>>& reference, double theta) {
    if (reference.empty())
        throw Error(ErrorKind::InvalidArgument, "alignment requires a non-empty reference corpus");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "theta must be in [0, 1]");

    VerifierReport report;
    report.property = "alignment";
    report.trials = static_cast<long>(reference.size());

    long agreements = 0;
    std::vector<double> reference_utility;
    std::vector<double> best_utility;
    reference_utility.reserve(reference.size());
    best_utility.reserve(reference.size());

    for (const auto& [model, reference_action] : reference) {
        if (!model.has_action(reference_action))
            throw Error(ErrorKind::UnknownId, "reference action '" + reference_action +
                                                  "' is not defined in scenario '" + model.name +
                                                  "'");
        const DecisionReport decision = decide(model);
        if (decision.chosen_action == reference_action) agreements += 1;
        reference_utility.push_back(decision.expected_utilities.at(reference_action));
        best_utility.push_back(decision.expected_utilities.at(decision.chosen_action));
    }

    const double n = static_cast<double>(reference.size());
    const double agreement = static_cast<double>(agreements) / n;

    // Pearson correlation between the engine's utility of the reference
    // action and its own best utility. Identical vectors correlate at 1 by
    // convention; a degenerate (zero-variance) side otherwise reports 0.
    double pearson = 0.0;
    {
        bool identical = true;
        for (std::size_t i = 0; i < reference_utility.size() && identical; ++i)
            if (std::abs(reference_utility[i] - best_utility[i]) > 1e-12) identical = false;
        if (identical) {
            pearson = 1.0;
        } else {
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < reference_utility.size(); ++i) {
                mx += reference_utility[i];
                my += best_utility[i];
            }
            mx /= n;
            my /= n;
            double sxy = 0.0, sxx = 0.0, syy = 0.0;
            for (std::size_t i = 0; i < reference_utility.size(); ++i) {
                const double dx = reference_utility[i] - mx;
                const double dy = best_utility[i] - my;
                sxy += dx * dy;
                sxx += dx * dx;
                syy += dy * dy;
            }
            pearson = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
        }
    }

    report.measured["agreement"] = agreement;
    report.measured["pearson"] = pearson;
    report.measured["disagreements"] = static_cast<double>(report.trials - agreements);
    report.pass = agreement > theta;
    return report;
}

}  // namespace ethos
