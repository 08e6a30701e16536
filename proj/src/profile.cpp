#include "ethos/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ethos/rng.hpp"

namespace ethos {

namespace {

void require_finite_entries(const ProfileMatrix& m) {
    for (const auto& row : m.entries)
        for (double v : row)
            if (!std::isfinite(v))
                throw Error(ErrorKind::InvalidArgument, "profile matrix entry is not finite");
}

void require_rectangular(const ProfileMatrix& m) {
    if (m.entries.size() != m.rows())
        throw Error(ErrorKind::Mismatch, "profile matrix row count does not match labels");
    for (const auto& row : m.entries)
        if (row.size() != m.cols())
            throw Error(ErrorKind::Mismatch, "profile matrix column count does not match labels");
}

}  // namespace

ProfileMatrix build_profile_matrix(const ScenarioModel& model) {
    require_valid(model);

    ProfileMatrix m;
    m.prescript_ids = model.prescript_ids();
    m.dictum_ids = model.dictum_ids();
    m.entries.assign(m.rows(), std::vector<double>(m.cols(), 0.0));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            m.entries[i][j] = model.baseline_weight(m.prescript_ids[i], m.dictum_ids[j]) *
                              model.conditional_probability(m.dictum_ids[j], m.prescript_ids[i]);
        }
    }
    m.normalized = false;
    return m;
}

ProfileMatrix normalize_profile(const ProfileMatrix& matrix) {
    if (matrix.rows() == 0 || matrix.cols() == 0)
        throw Error(ErrorKind::InvalidArgument, "cannot normalize an empty profile matrix");
    require_rectangular(matrix);
    require_finite_entries(matrix);

    double lo = matrix.entries[0][0];
    double hi = lo;
    for (const auto& row : matrix.entries) {
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    ProfileMatrix out = matrix;
    const double range = hi - lo;
    for (auto& row : out.entries) {
        for (double& v : row) v = range > 0.0 ? (v - lo) / range : 0.0;
    }
    out.normalized = true;
    return out;
}

double profile_distance(const ProfileMatrix& x, const ProfileMatrix& y) {
    if (!x.same_shape(y))
        throw Error(ErrorKind::Mismatch,
                    "profile distance requires identical prescript/dictum orderings");
    if (!x.normalized || !y.normalized)
        throw Error(ErrorKind::Mismatch, "profile distance requires normalized matrices");
    require_rectangular(x);
    require_rectangular(y);

    double d = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
            d += std::abs(x.entries[i][j] - y.entries[i][j]);
    return d;
}

const ProfileMatrix* ProfileCollection::find(const std::string& profile_id) const {
    for (const auto& [id, m] : profiles)
        if (id == profile_id) return &m;
    return nullptr;
}

std::string ProfileCollection::cluster_of(const std::string& profile_id) const {
    for (const auto& [cluster_id, members] : clusters) {
        if (std::find(members.begin(), members.end(), profile_id) != members.end())
            return cluster_id;
    }
    throw Error(ErrorKind::UnknownId, "profile '" + profile_id + "' is not in any cluster");
}

ProfileCollection cluster_profiles(std::vector<std::pair<std::string, ProfileMatrix>> profiles,
                                   int k, std::uint64_t seed) {
    const std::size_t n = profiles.size();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw Error(ErrorKind::InvalidArgument,
                    "cluster count " + std::to_string(k) + " must be in [1, " +
                        std::to_string(n) + "]");

    std::sort(profiles.begin(), profiles.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::set<std::string> ids;
    for (const auto& [id, m] : profiles) {
        if (!ids.insert(id).second)
            throw Error(ErrorKind::InvalidArgument, "duplicate profile id '" + id + "'");
        if (!m.normalized)
            throw Error(ErrorKind::Mismatch, "profile '" + id + "' is not normalized");
        if (!m.same_shape(profiles.front().second))
            throw Error(ErrorKind::Mismatch,
                        "profile '" + id + "' does not share the collection's shape");
    }

    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] = profile_distance(profiles[i].second, profiles[j].second);

    // Seeded first medoid, then farthest-point completion: the next medoid is
    // the profile farthest from its nearest existing medoid (ties -> smaller
    // index). Separated groups therefore always receive a starting medoid.
    std::vector<std::size_t> medoid_idx;
    std::vector<bool> is_medoid(n, false);
    {
        Rng rng(seed);
        const std::size_t first = static_cast<std::size_t>(rng.below(n));
        medoid_idx.push_back(first);
        is_medoid[first] = true;
        while (medoid_idx.size() < static_cast<std::size_t>(k)) {
            std::size_t pick = n;
            double best = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (is_medoid[i]) continue;
                double nearest = std::numeric_limits<double>::infinity();
                for (std::size_t m : medoid_idx) nearest = std::min(nearest, dist[i][m]);
                if (nearest > best) {
                    best = nearest;
                    pick = i;
                }
            }
            medoid_idx.push_back(pick);
            is_medoid[pick] = true;
        }
    }

    std::vector<std::size_t> assignment(n, 0);
    for (int sweep = 0; sweep < 100; ++sweep) {
        // Assignment: nearest medoid; a medoid always hosts itself so no
        // cluster can empty out. Other ties go to the smaller medoid index.
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t pick = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < medoid_idx.size(); ++c) {
                if (medoid_idx[c] == i) {
                    pick = c;
                    break;
                }
                if (dist[i][medoid_idx[c]] < best) {
                    best = dist[i][medoid_idx[c]];
                    pick = c;
                }
            }
            assignment[i] = pick;
        }

        // Update: each cluster's medoid becomes the member minimizing the
        // summed distance to the cluster (ties -> smaller index, i.e. the
        // lexicographically smaller profile id).
        bool changed = false;
        for (std::size_t c = 0; c < medoid_idx.size(); ++c) {
            std::size_t best_member = medoid_idx[c];
            double best_cost = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                if (assignment[i] != c) continue;
                double cost = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    if (assignment[j] == c) cost += dist[i][j];
                if (cost < best_cost) {
                    best_cost = cost;
                    best_member = i;
                }
            }
            if (best_member != medoid_idx[c]) {
                is_medoid[medoid_idx[c]] = false;
                is_medoid[best_member] = true;
                medoid_idx[c] = best_member;
                changed = true;
            }
        }
        if (!changed) break;
    }

    // Final assignment against the settled medoids.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t pick = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < medoid_idx.size(); ++c) {
            if (medoid_idx[c] == i) {
                pick = c;
                break;
            }
            if (dist[i][medoid_idx[c]] < best) {
                best = dist[i][medoid_idx[c]];
                pick = c;
            }
        }
        assignment[i] = pick;
    }

    // Cluster ids follow the sorted order of their medoid profile ids.
    std::vector<std::size_t> order(medoid_idx.size());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return profiles[medoid_idx[a]].first < profiles[medoid_idx[b]].first;
    });

    ProfileCollection collection;
    collection.profiles = std::move(profiles);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const std::size_t c = order[rank];
        const std::string cluster_id = "c" + std::to_string(rank);
        collection.medoids[cluster_id] = collection.profiles[medoid_idx[c]].first;
        auto& members = collection.clusters[cluster_id];
        for (std::size_t i = 0; i < n; ++i)
            if (assignment[i] == c) members.push_back(collection.profiles[i].first);
        std::sort(members.begin(), members.end());
    }
    return collection;
}

namespace {

constexpr std::size_t kExhaustiveRetrievalLimit = 32;

}  // namespace

RetrievalResult retrieve_profile(const ProfileCollection& collection,
                                 const ProfileMatrix& query) {
    if (collection.profiles.empty())
        throw Error(ErrorKind::InvalidArgument, "cannot retrieve from an empty collection");
    if (!query.normalized)
        throw Error(ErrorKind::Mismatch, "retrieval query must be normalized");
    if (!query.same_shape(collection.profiles.front().second))
        throw Error(ErrorKind::Mismatch, "retrieval query does not match the collection shape");

    auto scan = [&](const std::vector<std::string>& candidate_ids) {
        RetrievalResult best;
        best.distance = std::numeric_limits<double>::infinity();
        for (const auto& id : candidate_ids) {
            const ProfileMatrix* m = collection.find(id);
            if (!m) throw Error(ErrorKind::UnknownId, "cluster references missing profile '" + id + "'");
            const double d = profile_distance(*m, query);
            if (d < best.distance || (d == best.distance && id < best.profile_id)) {
                best.profile_id = id;
                best.distance = d;
            }
        }
        return best;
    };

    RetrievalResult result;
    if (collection.profiles.size() <= kExhaustiveRetrievalLimit || collection.medoids.empty()) {
        std::vector<std::string> all;
        all.reserve(collection.profiles.size());
        for (const auto& [id, _] : collection.profiles) all.push_back(id);
        result = scan(all);
    } else {
        // Route through the nearest medoid, then scan only its cluster.
        std::string best_cluster;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [cluster_id, medoid_id] : collection.medoids) {
            const ProfileMatrix* m = collection.find(medoid_id);
            if (!m)
                throw Error(ErrorKind::UnknownId,
                            "collection references missing medoid '" + medoid_id + "'");
            const double d = profile_distance(*m, query);
            if (d < best) {
                best = d;
                best_cluster = cluster_id;
            }
        }
        result = scan(collection.clusters.at(best_cluster));
    }
    result.cluster_id = collection.cluster_of(result.profile_id);
    return result;
}

ScenarioModel apply_profile(const ScenarioModel& model, const ProfileMatrix& profile) {
    require_valid(model);
    require_rectangular(profile);
    require_finite_entries(profile);

    auto row_index = [&](const std::string& prescript_id) {
        auto it = std::find(profile.prescript_ids.begin(), profile.prescript_ids.end(),
                            prescript_id);
        if (it == profile.prescript_ids.end())
            throw Error(ErrorKind::Mismatch,
                        "profile does not cover prescript '" + prescript_id + "'");
        return static_cast<std::size_t>(it - profile.prescript_ids.begin());
    };
    auto col_index = [&](const std::string& dictum_id) {
        auto it = std::find(profile.dictum_ids.begin(), profile.dictum_ids.end(), dictum_id);
        if (it == profile.dictum_ids.end())
            throw Error(ErrorKind::Mismatch, "profile does not cover dictum '" + dictum_id + "'");
        return static_cast<std::size_t>(it - profile.dictum_ids.begin());
    };

    ScenarioModel out = model;
    BaselineWeights lifted;
    for (const auto& prescript_id : model.prescript_ids()) {
        const std::size_t i = row_index(prescript_id);
        auto& row = lifted.weights[prescript_id];
        for (const auto& dictum_id : model.dictum_ids()) {
            row[dictum_id] = 1.0 + profile.entries[i][col_index(dictum_id)];
        }
    }
    out.baseline_weights = std::move(lifted);
    require_valid(out);
    return out;
}

}  // namespace ethos
