#include "ethos/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace ethos {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

bool id_well_formed(const std::string& id) {
    if (id.empty() || id.size() > kMaxIdLength) return false;
    for (unsigned char c : id) {
        if (c <= 0x20 || c >= 0x7f) return false;  // printable ASCII, no whitespace
    }
    return true;
}

[[noreturn]] void throw_unknown(const char* what, const std::string& id) {
    throw Error(ErrorKind::UnknownId, std::string("unknown ") + what + " id '" + id + "'");
}

}  // namespace

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Schema: return "schema";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::UnknownId: return "unknown_id";
        case ErrorKind::Mismatch: return "mismatch";
        case ErrorKind::InvalidArgument: return "invalid_argument";
        case ErrorKind::TooLarge: return "too_large";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

ValidationError::ValidationError(ValidationReport report)
    : Error(ErrorKind::Validation,
            report.issues.empty()
                ? "scenario failed validation"
                : "scenario failed validation: " + report.issues.front().message +
                      (report.issues.size() > 1
                           ? " (+" + std::to_string(report.issues.size() - 1) + " more)"
                           : "")),
      report_(std::move(report)) {}

bool ScenarioModel::has_dictum(const std::string& id) const {
    return std::any_of(dicta.begin(), dicta.end(), [&](const Dictum& d) { return d.id == id; });
}

bool ScenarioModel::has_prescript(const std::string& id) const {
    return std::any_of(prescripts.begin(), prescripts.end(),
                       [&](const Prescript& p) { return p.id == id; });
}

bool ScenarioModel::has_action(const std::string& id) const {
    return std::any_of(actions.begin(), actions.end(),
                       [&](const ActionDef& a) { return a.id == id; });
}

double ScenarioModel::context_probability(const std::string& dictum_id) const {
    auto it = context.entries.find(dictum_id);
    if (it == context.entries.end()) throw_unknown("dictum", dictum_id);
    return it->second;
}

double ScenarioModel::conditional_probability(const std::string& dictum_id,
                                              const std::string& prescript_id) const {
    auto row = conditional.table.find(dictum_id);
    if (row == conditional.table.end()) throw_unknown("dictum", dictum_id);
    auto it = row->second.find(prescript_id);
    if (it == row->second.end()) throw_unknown("prescript", prescript_id);
    return it->second;
}

double ScenarioModel::utility(const std::string& action_id, const std::string& dictum_id,
                              const std::string& prescript_id) const {
    auto block = utilities.values.find(action_id);
    if (block == utilities.values.end()) throw_unknown("action", action_id);
    auto row = block->second.find(dictum_id);
    if (row == block->second.end()) throw_unknown("dictum", dictum_id);
    auto it = row->second.find(prescript_id);
    if (it == row->second.end()) throw_unknown("prescript", prescript_id);
    return it->second;
}

int ScenarioModel::prescript_rank(const std::string& prescript_id) const {
    for (const auto& p : prescripts) {
        if (p.id == prescript_id) return p.priority_rank;
    }
    throw_unknown("prescript", prescript_id);
}

double ScenarioModel::objective_weight(const std::string& prescript_id) const {
    if (!objective_weights) return 1.0;
    auto it = objective_weights->weights.find(prescript_id);
    if (it == objective_weights->weights.end()) throw_unknown("prescript", prescript_id);
    return it->second;
}

double ScenarioModel::baseline_weight(const std::string& prescript_id,
                                      const std::string& dictum_id) const {
    if (!baseline_weights) return 1.0;
    auto row = baseline_weights->weights.find(prescript_id);
    if (row == baseline_weights->weights.end()) throw_unknown("prescript", prescript_id);
    auto it = row->second.find(dictum_id);
    if (it == row->second.end()) throw_unknown("dictum", dictum_id);
    return it->second;
}

std::vector<std::string> ScenarioModel::dictum_ids() const {
    std::vector<std::string> ids;
    ids.reserve(dicta.size());
    for (const auto& d : dicta) ids.push_back(d.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<std::string> ScenarioModel::prescript_ids() const {
    std::vector<std::string> ids;
    ids.reserve(prescripts.size());
    for (const auto& p : prescripts) ids.push_back(p.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<std::string> ScenarioModel::action_ids() const {
    std::vector<std::string> ids;
    ids.reserve(actions.size());
    for (const auto& a : actions) ids.push_back(a.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

void ScenarioModel::canonicalize() {
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(dicta.begin(), dicta.end(), by_id);
    std::sort(prescripts.begin(), prescripts.end(), by_id);
    std::sort(actions.begin(), actions.end(), by_id);
}

namespace {

struct Validator {
    const ScenarioModel& m;
    std::vector<ValidationIssue>& issues;

    void issue(std::string code, std::string subject, std::optional<double> residual,
               std::string message) {
        issues.push_back({std::move(code), std::move(subject), residual, std::move(message)});
    }

    template <typename T>
    std::set<std::string> check_id_list(const std::vector<T>& list, const char* kind) {
        std::set<std::string> seen;
        for (const auto& item : list) {
            if (!id_well_formed(item.id)) {
                issue("bad_id", item.id, std::nullopt,
                      std::string(kind) + " id '" + item.id +
                          "' must be 1-64 printable ASCII characters with no whitespace");
                continue;
            }
            if (!seen.insert(item.id).second) {
                issue("duplicate_id", item.id, std::nullopt,
                      std::string("duplicate ") + kind + " id '" + item.id + "'");
            }
        }
        return seen;
    }

    void check_probability(double p, const std::string& subject, const std::string& where) {
        if (!std::isfinite(p)) {
            issue("not_finite", subject, std::nullopt, where + " is not finite");
        } else if (p < 0.0 || p > 1.0) {
            const double residual = p < 0.0 ? -p : p - 1.0;
            issue("prob_out_of_range", subject, residual,
                  where + " = " + fmt_double(p) + " outside [0, 1]");
        }
    }

    void check_sum(double sum, const std::string& subject, const std::string& what) {
        const double residual = std::abs(sum - 1.0);
        if (!(residual <= kProbabilityTolerance)) {
            issue("sum_mismatch", subject, residual,
                  what + " sum " + fmt_double(sum) + ", residual " + fmt_double(residual));
        }
    }

    void run() {
        const auto dictum_set = check_id_list(m.dicta, "dictum");
        const auto prescript_set = check_id_list(m.prescripts, "prescript");
        const auto action_set = check_id_list(m.actions, "action");

        if (m.dicta.empty())
            issue("missing_entry", "dicta", std::nullopt, "scenario declares no dicta");
        if (m.prescripts.empty())
            issue("missing_entry", "prescripts", std::nullopt, "scenario declares no prescripts");
        if (m.actions.empty())
            issue("missing_entry", "actions", std::nullopt, "scenario declares no actions");

        for (const auto& p : m.prescripts) {
            if (p.priority_rank < 1) {
                issue("bad_rank", p.id, static_cast<double>(p.priority_rank),
                      "prescript '" + p.id + "' priority_rank " +
                          std::to_string(p.priority_rank) + " must be >= 1");
            }
        }

        if (!std::isfinite(m.utility_bound) || m.utility_bound <= 0.0) {
            issue("bad_bound", "meta.u_max", m.utility_bound,
                  "utility bound must be finite and > 0");
        }

        check_context(dictum_set);
        check_conditional(dictum_set, prescript_set);
        check_utilities(dictum_set, prescript_set, action_set);
        check_weights(dictum_set, prescript_set);
    }

    void check_context(const std::set<std::string>& dictum_set) {
        double sum = 0.0;
        for (const auto& [id, p] : m.context.entries) {
            if (!dictum_set.count(id)) {
                issue("unknown_id", id, std::nullopt,
                      "context references unknown dictum id '" + id + "'");
                continue;
            }
            check_probability(p, id, "P(" + id + ")");
            if (std::isfinite(p)) sum += p;
        }
        for (const auto& id : dictum_set) {
            if (!m.context.entries.count(id)) {
                issue("missing_entry", id, std::nullopt,
                      "context is missing an entry for dictum '" + id + "'");
            }
        }
        if (m.context.entries.size() == dictum_set.size() && !dictum_set.empty())
            check_sum(sum, "context", "context");
    }

    void check_conditional(const std::set<std::string>& dictum_set,
                           const std::set<std::string>& prescript_set) {
        for (const auto& [dictum_id, row] : m.conditional.table) {
            if (!dictum_set.count(dictum_id)) {
                issue("unknown_id", dictum_id, std::nullopt,
                      "conditional references unknown dictum id '" + dictum_id + "'");
                continue;
            }
            double sum = 0.0;
            bool complete = true;
            for (const auto& [prescript_id, p] : row) {
                if (!prescript_set.count(prescript_id)) {
                    issue("unknown_id", prescript_id, std::nullopt,
                          "conditional row '" + dictum_id +
                              "' references unknown prescript id '" + prescript_id + "'");
                    continue;
                }
                check_probability(p, dictum_id + "/" + prescript_id,
                                  "P(" + prescript_id + "|" + dictum_id + ")");
                if (std::isfinite(p)) sum += p;
            }
            for (const auto& prescript_id : prescript_set) {
                if (!row.count(prescript_id)) {
                    complete = false;
                    issue("missing_entry", dictum_id + "/" + prescript_id, std::nullopt,
                          "conditional row '" + dictum_id + "' is missing prescript '" +
                              prescript_id + "'");
                }
            }
            if (complete && !prescript_set.empty())
                check_sum(sum, dictum_id, "conditional row '" + dictum_id + "'");
        }
        for (const auto& dictum_id : dictum_set) {
            if (!m.conditional.table.count(dictum_id)) {
                issue("missing_entry", dictum_id, std::nullopt,
                      "conditional is missing the row for dictum '" + dictum_id + "'");
            }
        }
    }

    void check_utilities(const std::set<std::string>& dictum_set,
                         const std::set<std::string>& prescript_set,
                         const std::set<std::string>& action_set) {
        const double bound =
            std::isfinite(m.utility_bound) && m.utility_bound > 0.0 ? m.utility_bound
                                                                    : kDefaultUtilityBound;
        for (const auto& [action_id, block] : m.utilities.values) {
            if (!action_set.count(action_id)) {
                issue("unknown_id", action_id, std::nullopt,
                      "utilities reference unknown action id '" + action_id + "'");
                continue;
            }
            for (const auto& [dictum_id, row] : block) {
                if (!dictum_set.count(dictum_id)) {
                    issue("unknown_id", dictum_id, std::nullopt,
                          "utilities for action '" + action_id +
                              "' reference unknown dictum id '" + dictum_id + "'");
                    continue;
                }
                for (const auto& [prescript_id, u] : row) {
                    const std::string subject =
                        action_id + "/" + dictum_id + "/" + prescript_id;
                    if (!prescript_set.count(prescript_id)) {
                        issue("unknown_id", prescript_id, std::nullopt,
                              "utilities cell '" + subject +
                                  "' references unknown prescript id '" + prescript_id + "'");
                        continue;
                    }
                    if (!std::isfinite(u)) {
                        issue("not_finite", subject, std::nullopt,
                              "utility " + subject + " is not finite");
                    } else if (std::abs(u) > bound) {
                        issue("bound_exceeded", subject, std::abs(u) - bound,
                              "utility " + subject + " = " + fmt_double(u) +
                                  " exceeds bound " + fmt_double(bound));
                    }
                }
                for (const auto& prescript_id : prescript_set) {
                    if (!row.count(prescript_id)) {
                        issue("missing_entry", action_id + "/" + dictum_id + "/" + prescript_id,
                              std::nullopt,
                              "utilities for '" + action_id + "' under '" + dictum_id +
                                  "' are missing prescript '" + prescript_id + "'");
                    }
                }
            }
            for (const auto& dictum_id : dictum_set) {
                if (!block.count(dictum_id)) {
                    issue("missing_entry", action_id + "/" + dictum_id, std::nullopt,
                          "utilities for action '" + action_id + "' are missing dictum '" +
                              dictum_id + "'");
                }
            }
        }
        for (const auto& action_id : action_set) {
            if (!m.utilities.values.count(action_id)) {
                issue("missing_entry", action_id, std::nullopt,
                      "utilities are missing the block for action '" + action_id + "'");
            }
        }
    }

    void check_weights(const std::set<std::string>& dictum_set,
                       const std::set<std::string>& prescript_set) {
        if (m.objective_weights) {
            double max_weight = 0.0;
            for (const auto& [prescript_id, w] : m.objective_weights->weights) {
                if (!prescript_set.count(prescript_id)) {
                    issue("unknown_id", prescript_id, std::nullopt,
                          "objective weights reference unknown prescript id '" + prescript_id +
                              "'");
                    continue;
                }
                if (!std::isfinite(w)) {
                    issue("not_finite", prescript_id, std::nullopt,
                          "objective weight for '" + prescript_id + "' is not finite");
                } else if (w < 0.0) {
                    issue("negative_weight", prescript_id, -w,
                          "objective weight for '" + prescript_id + "' = " + fmt_double(w) +
                              " must be >= 0");
                } else {
                    max_weight = std::max(max_weight, w);
                }
            }
            for (const auto& prescript_id : prescript_set) {
                if (!m.objective_weights->weights.count(prescript_id)) {
                    issue("missing_entry", prescript_id, std::nullopt,
                          "objective weights are missing prescript '" + prescript_id + "'");
                }
            }
            if (!(max_weight > 0.0)) {
                issue("all_zero_weights", "weights.objective", std::nullopt,
                      "objective weights must include at least one weight > 0");
            }
        }
        if (m.baseline_weights) {
            for (const auto& [prescript_id, row] : m.baseline_weights->weights) {
                if (!prescript_set.count(prescript_id)) {
                    issue("unknown_id", prescript_id, std::nullopt,
                          "baseline weights reference unknown prescript id '" + prescript_id +
                              "'");
                    continue;
                }
                for (const auto& [dictum_id, w] : row) {
                    const std::string subject = prescript_id + "/" + dictum_id;
                    if (!dictum_set.count(dictum_id)) {
                        issue("unknown_id", dictum_id, std::nullopt,
                              "baseline weights row '" + prescript_id +
                                  "' references unknown dictum id '" + dictum_id + "'");
                        continue;
                    }
                    if (!std::isfinite(w)) {
                        issue("not_finite", subject, std::nullopt,
                              "baseline weight " + subject + " is not finite");
                    } else if (w < 0.0) {
                        issue("negative_weight", subject, -w,
                              "baseline weight " + subject + " = " + fmt_double(w) +
                                  " must be >= 0");
                    }
                }
                for (const auto& dictum_id : dictum_set) {
                    if (!row.count(dictum_id)) {
                        issue("missing_entry", prescript_id + "/" + dictum_id, std::nullopt,
                              "baseline weights row '" + prescript_id + "' is missing dictum '" +
                                  dictum_id + "'");
                    }
                }
            }
            for (const auto& prescript_id : prescript_set) {
                if (!m.baseline_weights->weights.count(prescript_id)) {
                    issue("missing_entry", prescript_id, std::nullopt,
                          "baseline weights are missing the row for prescript '" + prescript_id +
                              "'");
                }
            }
        }
    }
};

}  // namespace

ValidationReport validate_scenario(const ScenarioModel& model) {
    ValidationReport report;
    Validator{model, report.issues}.run();
    return report;
}

double joint_probability(const ScenarioModel& model, const std::string& dictum_id,
                         const std::string& prescript_id) {
    return model.context_probability(dictum_id) *
           model.conditional_probability(dictum_id, prescript_id);
}

void require_valid(const ScenarioModel& model) {
    ValidationReport report = validate_scenario(model);
    if (!report.valid()) throw ValidationError(std::move(report));
}

}  // namespace ethos
