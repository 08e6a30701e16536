#pragma once

// Ethical profile matrices: per-scenario matrices of weighted prescript
// influence, min-max normalization, the L1 metric between normalized
// profiles, k-medoids clustering of a profile collection, nearest-profile
// retrieval, and application of a stored profile back onto a scenario.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ethos/model.hpp"

namespace ethos {

struct ProfileMatrix {
    std::vector<std::string> prescript_ids;          // row labels
    std::vector<std::string> dictum_ids;             // column labels
    std::vector<std::vector<double>> entries;        // rows x cols
    bool normalized = false;

    std::size_t rows() const { return prescript_ids.size(); }
    std::size_t cols() const { return dictum_ids.size(); }

    bool same_shape(const ProfileMatrix& other) const {
        return prescript_ids == other.prescript_ids && dictum_ids == other.dictum_ids;
    }

    bool operator==(const ProfileMatrix&) const = default;
};

/// m[e][c] = w(e, c) * P(e | c) over the scenario's canonical (sorted)
/// prescript x dictum grid. Result is raw (normalized = false).
ProfileMatrix build_profile_matrix(const ScenarioModel& model);

/// Global min-max scaling of all entries into [0, 1]. A constant matrix maps
/// to all zeros, which keeps profile application neutral for flat profiles.
/// Idempotent whenever the input already spans exactly [0, 1].
ProfileMatrix normalize_profile(const ProfileMatrix& matrix);

/// Elementwise L1 distance between two normalized, identically-labelled
/// matrices. A metric: symmetric, zero only at equality, triangle inequality.
double profile_distance(const ProfileMatrix& x, const ProfileMatrix& y);

struct ProfileCollection {
    // Sorted by profile id; every matrix normalized with identical labels.
    std::vector<std::pair<std::string, ProfileMatrix>> profiles;
    std::map<std::string, std::vector<std::string>> clusters;  // cluster id -> member ids
    std::map<std::string, std::string> medoids;                // cluster id -> profile id

    const ProfileMatrix* find(const std::string& profile_id) const;
    std::string cluster_of(const std::string& profile_id) const;
};

/// k-medoids under profile_distance. Initialization is a seeded random first
/// medoid followed by farthest-point completion; then alternating
/// assignment/medoid-update sweeps until stable (at most 100). Total
/// within-cluster distance never increases across sweeps, and a fixed seed
/// reproduces the exact clustering.
ProfileCollection cluster_profiles(std::vector<std::pair<std::string, ProfileMatrix>> profiles,
                                   int k, std::uint64_t seed);

struct RetrievalResult {
    std::string profile_id;
    std::string cluster_id;
    double distance = 0.0;

    bool operator==(const RetrievalResult&) const = default;
};

/// Nearest stored profile for a normalized query. Collections of at most 32
/// profiles are scanned exhaustively (exact nearest neighbor); larger ones
/// route through the nearest medoid's cluster. Distance ties resolve to the
/// lexicographically smallest profile id.
RetrievalResult retrieve_profile(const ProfileCollection& collection,
                                 const ProfileMatrix& query);

/// Returns a copy of the scenario whose baseline weights are replaced by
/// 1 + m[e][c]. The additive-one lift keeps every prescript alive where the
/// profile entry is 0, so an all-zero profile leaves decisions unchanged.
/// The profile's labels must cover the scenario's prescripts and dicta.
ScenarioModel apply_profile(const ScenarioModel& model, const ProfileMatrix& profile);

}  // namespace ethos
