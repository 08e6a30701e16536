#pragma once

// Scenario data model: contextual dicta, prioritized prescripts, candidate
// actions, the probability tables tying them together, and the validation
// rules every scenario has to satisfy before an engine consumes it.
//
// All types are plain immutable-after-construction value types; nothing in
// this module mutates shared state, so models can be shared freely across
// threads.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ethos/error.hpp"

namespace ethos {

// Absolute tolerance for every probability normalization check.
inline constexpr double kProbabilityTolerance = 1e-9;

// Two expected utilities within this of each other count as tied.
inline constexpr double kTieTolerance = 1e-9;

inline constexpr double kDefaultUtilityBound = 1000.0;
inline constexpr std::size_t kMaxIdLength = 64;

/// A contextual factor ("circumstantial dictum"). Compound situations are
/// encoded as single dicta so the context distribution stays categorical.
struct Dictum {
    std::string id;
    std::string description;
    std::vector<std::string> tags;

    bool operator==(const Dictum&) const = default;
};

/// A prioritized moral objective. priority_rank (1 = highest) is used only
/// for tie-breaking between actions with equal expected utility.
struct Prescript {
    std::string id;
    std::string description;
    int priority_rank = 1;

    bool operator==(const Prescript&) const = default;
};

struct ActionDef {
    std::string id;
    std::string description;

    bool operator==(const ActionDef&) const = default;
};

/// Categorical distribution over dicta; entries must cover every dictum and
/// sum to 1 within kProbabilityTolerance.
struct ContextDistribution {
    std::map<std::string, double> entries;  // dictum id -> probability

    bool operator==(const ContextDistribution&) const = default;
};

/// Per-dictum distribution over prescripts; every row sums to 1.
struct PrescriptConditional {
    // dictum id -> (prescript id -> probability)
    std::map<std::string, std::map<std::string, double>> table;

    bool operator==(const PrescriptConditional&) const = default;
};

/// Dense utility table over action x dictum x prescript. Values are
/// dimensionless and bounded by the scenario's declared utility_bound.
struct UtilityTensor {
    // action id -> dictum id -> prescript id -> utility
    std::map<std::string, std::map<std::string, std::map<std::string, double>>> values;

    bool operator==(const UtilityTensor&) const = default;
};

/// Per-prescript objective weight (alpha). Nonnegative, at least one > 0.
struct ObjectiveWeights {
    std::map<std::string, double> weights;  // prescript id -> weight

    bool operator==(const ObjectiveWeights&) const = default;
};

/// Per-(prescript, dictum) baseline relevance weight. Nonnegative.
struct BaselineWeights {
    // prescript id -> (dictum id -> weight)
    std::map<std::string, std::map<std::string, double>> weights;

    bool operator==(const BaselineWeights&) const = default;
};

struct ScenarioModel {
    std::string name;
    std::string notes;
    double utility_bound = kDefaultUtilityBound;

    // Kept sorted by id (scenario_io sorts on parse; builders should too).
    std::vector<Dictum> dicta;
    std::vector<Prescript> prescripts;
    std::vector<ActionDef> actions;

    ContextDistribution context;
    PrescriptConditional conditional;
    UtilityTensor utilities;

    // Absent weight tables mean 1.0 everywhere, which reduces the weighted
    // utility forms to the plain probability-weighted sums.
    std::optional<ObjectiveWeights> objective_weights;
    std::optional<BaselineWeights> baseline_weights;

    bool operator==(const ScenarioModel&) const = default;

    bool has_dictum(const std::string& id) const;
    bool has_prescript(const std::string& id) const;
    bool has_action(const std::string& id) const;

    // Checked lookups; throw ErrorKind::UnknownId naming the missing id.
    double context_probability(const std::string& dictum_id) const;
    double conditional_probability(const std::string& dictum_id,
                                   const std::string& prescript_id) const;
    double utility(const std::string& action_id, const std::string& dictum_id,
                   const std::string& prescript_id) const;
    int prescript_rank(const std::string& prescript_id) const;

    // Weight lookups fall back to 1.0 when the table is absent.
    double objective_weight(const std::string& prescript_id) const;
    double baseline_weight(const std::string& prescript_id,
                           const std::string& dictum_id) const;

    /// Ids in canonical (lexicographic) order.
    std::vector<std::string> dictum_ids() const;
    std::vector<std::string> prescript_ids() const;
    std::vector<std::string> action_ids() const;

    /// Sorts the three definition lists by id in place.
    void canonicalize();
};

/// One violated invariant. Violations are data, not exceptions.
struct ValidationIssue {
    std::string code;     // stable machine-readable category, e.g. "sum_mismatch"
    std::string subject;  // offending id or section
    std::optional<double> residual;
    std::string message;

    bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool valid() const { return issues.empty(); }

    bool operator==(const ValidationReport&) const = default;
};

/// Thrown by operations whose precondition is a valid scenario.
class ValidationError : public Error {
public:
    explicit ValidationError(ValidationReport report);

    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

/// Checks every scenario invariant and reports each violation with the
/// offending id and, where meaningful, the numeric residual. Pure; returns
/// the same report every time for the same model.
ValidationReport validate_scenario(const ScenarioModel& model);

/// P(c_i, e_j) = P(c_i) * P(e_j | c_i).
double joint_probability(const ScenarioModel& model, const std::string& dictum_id,
                         const std::string& prescript_id);

/// Validates and throws ValidationError if the model is invalid.
void require_valid(const ScenarioModel& model);

}  // namespace ethos
