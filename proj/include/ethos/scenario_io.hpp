#pragma once

// Parsing and serialization for every on-disk artifact: scenario files,
// profile files, weight configurations, reference corpora, clustered
// collections, and machine-format reports. The wire format is JSON with
// lexicographically sorted keys; serialize-then-parse is exact (doubles
// round-trip bit for bit) and re-serializing is byte-stable.
//
// Also bundles the four canonical trolley scenarios as in-code fixtures.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ethos/decision.hpp"
#include "ethos/learning.hpp"
#include "ethos/model.hpp"
#include "ethos/profile.hpp"
#include "ethos/verifier.hpp"

namespace ethos {

inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------------------
// scenarios

/// Structural parse only: no invariant checks beyond shape/type. Lists are
/// sorted into canonical order. Throws Parse/Schema errors with line and
/// section context.
ScenarioModel parse_scenario_text(const std::string& text);

/// parse_scenario_text plus validation; throws ValidationError carrying the
/// full report when any invariant fails.
ScenarioModel parse_scenario(const std::string& text);

ScenarioModel load_scenario(const std::filesystem::path& path);

/// Canonical serialization: sections sorted, lists sorted by id, 2-space
/// indent, trailing newline.
std::string serialize_scenario(const ScenarioModel& model);

void save_scenario(const ScenarioModel& model, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// profiles and collections

std::pair<std::string, ProfileMatrix> parse_profile(const std::string& text);
std::pair<std::string, ProfileMatrix> load_profile(const std::filesystem::path& path);
std::string serialize_profile(const std::string& profile_id, const ProfileMatrix& matrix);
void save_profile(const std::string& profile_id, const ProfileMatrix& matrix,
                  const std::filesystem::path& path);

/// Writes one "<id>.ethp" per profile plus "collection.json" mapping each
/// profile to its cluster and medoid flag.
void save_collection(const ProfileCollection& collection, const std::filesystem::path& dir);
ProfileCollection load_collection(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// weight configurations (used by `decide --weights`)

struct WeightConfig {
    std::string name;
    std::optional<ObjectiveWeights> objective;
    std::optional<BaselineWeights> baseline;
};

WeightConfig parse_weight_config(const std::string& text);
WeightConfig load_weight_config(const std::filesystem::path& path);
std::string serialize_weight_config(const WeightConfig& config);

/// Applies the configured tables onto a copy of the model and revalidates.
ScenarioModel apply_weight_config(const ScenarioModel& model, const WeightConfig& config);

// ---------------------------------------------------------------------------
// reference corpus (alignment checks)

struct CorpusEntry {
    std::string scenario_path;  // as written in the corpus file
    ScenarioModel model;        // loaded and validated
    std::string action_id;
};

/// Loads a corpus file; scenario paths resolve relative to the corpus file's
/// directory.
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// reports (machine format)

std::string serialize_validation_report(const ValidationReport& report);
std::string serialize_decision_report(const DecisionReport& report);
std::string serialize_verifier_report(const VerifierReport& report);
std::string serialize_convergence_report(const ConvergenceReport& report);
std::string serialize_retrieval_result(const RetrievalResult& result);

ValidationReport parse_validation_report(const std::string& text);
DecisionReport parse_decision_report(const std::string& text);
VerifierReport parse_verifier_report(const std::string& text);
ConvergenceReport parse_convergence_report(const std::string& text);
RetrievalResult parse_retrieval_result(const std::string& text);

// ---------------------------------------------------------------------------
// bundled fixtures

/// The four canonical trolley scenarios, in order. Scenario 1 has no
/// pedestrians anywhere; scenario 2 has two on route B; scenario 3 has three
/// on the default route A versus two on route B; scenario 4 adds age and
/// societal-role attributes as compound dicta plus two contested
/// casualty-refinement prescripts.
std::vector<ScenarioModel> bundled_scenarios();

/// The two scenario-4 objective-weight configurations shipped side by side:
/// first favors protecting children, second favors preserving critical
/// societal roles. Neither is applied by default.
std::pair<WeightConfig, WeightConfig> bundled_scenario4_weight_configs();

}  // namespace ethos
