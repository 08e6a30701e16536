#include "ethos/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ethos {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::Schema, where + ": " + what);
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::string message = e.what();
        // Strip nlohmann's exception-id prefix; it already reports line/column.
        const auto cut = message.find("] ");
        if (cut != std::string::npos) message = message.substr(cut + 2);
        throw Error(ErrorKind::Parse, "syntax error: " + message);
    }
}

const json& member(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(where, std::string("missing required key '") + key + "'");
    return *it;
}

const json* opt_member(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

void require_object(const json& v, const std::string& where) {
    if (!v.is_object()) schema_error(where, "expected an object");
}

void require_array(const json& v, const std::string& where) {
    if (!v.is_array()) schema_error(where, "expected an array");
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) schema_error(where, "expected a string");
    return v.get<std::string>();
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) schema_error(where, "expected a number");
    return v.get<double>();
}

long as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) schema_error(where, "expected an integer");
    return v.get<long>();
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) schema_error(where, "expected a boolean");
    return v.get<bool>();
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known) schema_error(where, "unknown key '" + key + "'");
    }
}

void check_format_version(const json& meta, const std::string& where) {
    const long version = as_integer(member(meta, where, "format_version"),
                                    where + ".format_version");
    if (version != kFormatVersion)
        schema_error(where + ".format_version",
                     "unsupported format_version " + std::to_string(version));
}

std::map<std::string, double> number_map(const json& obj, const std::string& where) {
    require_object(obj, where);
    std::map<std::string, double> out;
    for (const auto& [key, value] : obj.items()) out[key] = as_number(value, where + "." + key);
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error(ErrorKind::Io, "failed reading '" + path.string() + "'");
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::string dump_document(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---------------------------------------------------------------------------
// scenarios

ScenarioModel parse_scenario_text(const std::string& text) {
    const json j = parse_json(text);
    require_object(j, "document");
    reject_unknown_keys(j, "document",
                        {"actions", "conditional", "context", "dicta", "meta", "prescripts",
                         "utilities", "weights"});

    ScenarioModel m;

    const json& meta = member(j, "document", "meta");
    require_object(meta, "meta");
    reject_unknown_keys(meta, "meta", {"format_version", "name", "notes", "u_max"});
    check_format_version(meta, "meta");
    if (const json* v = opt_member(meta, "name")) m.name = as_string(*v, "meta.name");
    if (const json* v = opt_member(meta, "notes")) m.notes = as_string(*v, "meta.notes");
    if (const json* v = opt_member(meta, "u_max"))
        m.utility_bound = as_number(*v, "meta.u_max");

    const json& dicta = member(j, "document", "dicta");
    require_array(dicta, "dicta");
    for (std::size_t i = 0; i < dicta.size(); ++i) {
        const std::string where = "dicta[" + std::to_string(i) + "]";
        const json& item = dicta[i];
        require_object(item, where);
        reject_unknown_keys(item, where, {"description", "id", "tags"});
        Dictum d;
        d.id = as_string(member(item, where, "id"), where + ".id");
        if (const json* v = opt_member(item, "description"))
            d.description = as_string(*v, where + ".description");
        if (const json* v = opt_member(item, "tags")) {
            require_array(*v, where + ".tags");
            for (std::size_t t = 0; t < v->size(); ++t)
                d.tags.push_back(as_string((*v)[t], where + ".tags[" + std::to_string(t) + "]"));
        }
        m.dicta.push_back(std::move(d));
    }

    const json& prescripts = member(j, "document", "prescripts");
    require_array(prescripts, "prescripts");
    for (std::size_t i = 0; i < prescripts.size(); ++i) {
        const std::string where = "prescripts[" + std::to_string(i) + "]";
        const json& item = prescripts[i];
        require_object(item, where);
        reject_unknown_keys(item, where, {"description", "id", "priority_rank"});
        Prescript p;
        p.id = as_string(member(item, where, "id"), where + ".id");
        if (const json* v = opt_member(item, "description"))
            p.description = as_string(*v, where + ".description");
        if (const json* v = opt_member(item, "priority_rank"))
            p.priority_rank = static_cast<int>(as_integer(*v, where + ".priority_rank"));
        m.prescripts.push_back(std::move(p));
    }

    const json& actions = member(j, "document", "actions");
    require_array(actions, "actions");
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const std::string where = "actions[" + std::to_string(i) + "]";
        const json& item = actions[i];
        require_object(item, where);
        reject_unknown_keys(item, where, {"description", "id"});
        ActionDef a;
        a.id = as_string(member(item, where, "id"), where + ".id");
        if (const json* v = opt_member(item, "description"))
            a.description = as_string(*v, where + ".description");
        m.actions.push_back(std::move(a));
    }

    m.context.entries = number_map(member(j, "document", "context"), "context");

    const json& conditional = member(j, "document", "conditional");
    require_object(conditional, "conditional");
    for (const auto& [dictum_id, row] : conditional.items())
        m.conditional.table[dictum_id] = number_map(row, "conditional." + dictum_id);

    const json& utilities = member(j, "document", "utilities");
    require_object(utilities, "utilities");
    for (const auto& [action_id, block] : utilities.items()) {
        require_object(block, "utilities." + action_id);
        for (const auto& [dictum_id, row] : block.items())
            m.utilities.values[action_id][dictum_id] =
                number_map(row, "utilities." + action_id + "." + dictum_id);
    }

    if (const json* weights = opt_member(j, "weights")) {
        require_object(*weights, "weights");
        reject_unknown_keys(*weights, "weights", {"baseline", "objective"});
        if (const json* v = opt_member(*weights, "objective")) {
            ObjectiveWeights w;
            w.weights = number_map(*v, "weights.objective");
            m.objective_weights = std::move(w);
        }
        if (const json* v = opt_member(*weights, "baseline")) {
            require_object(*v, "weights.baseline");
            BaselineWeights w;
            for (const auto& [prescript_id, row] : v->items())
                w.weights[prescript_id] = number_map(row, "weights.baseline." + prescript_id);
            m.baseline_weights = std::move(w);
        }
    }

    m.canonicalize();
    return m;
}

ScenarioModel parse_scenario(const std::string& text) {
    ScenarioModel m = parse_scenario_text(text);
    require_valid(m);
    return m;
}

ScenarioModel load_scenario(const std::filesystem::path& path) {
    try {
        return parse_scenario(read_file(path));
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Schema)
            throw Error(e.kind(), path.string() + ": " + e.what());
        throw;
    }
}

std::string serialize_scenario(const ScenarioModel& model) {
    ScenarioModel m = model;
    m.canonicalize();

    json j;
    j["meta"]["format_version"] = kFormatVersion;
    j["meta"]["name"] = m.name;
    j["meta"]["u_max"] = m.utility_bound;
    if (!m.notes.empty()) j["meta"]["notes"] = m.notes;

    j["dicta"] = json::array();
    for (const auto& d : m.dicta) {
        json item;
        item["id"] = d.id;
        if (!d.description.empty()) item["description"] = d.description;
        if (!d.tags.empty()) item["tags"] = d.tags;
        j["dicta"].push_back(std::move(item));
    }
    j["prescripts"] = json::array();
    for (const auto& p : m.prescripts) {
        json item;
        item["id"] = p.id;
        if (!p.description.empty()) item["description"] = p.description;
        item["priority_rank"] = p.priority_rank;
        j["prescripts"].push_back(std::move(item));
    }
    j["actions"] = json::array();
    for (const auto& a : m.actions) {
        json item;
        item["id"] = a.id;
        if (!a.description.empty()) item["description"] = a.description;
        j["actions"].push_back(std::move(item));
    }

    j["context"] = m.context.entries;
    j["conditional"] = m.conditional.table;
    j["utilities"] = m.utilities.values;

    if (m.objective_weights || m.baseline_weights) {
        if (m.objective_weights) j["weights"]["objective"] = m.objective_weights->weights;
        if (m.baseline_weights) j["weights"]["baseline"] = m.baseline_weights->weights;
    }
    return dump_document(j);
}

void save_scenario(const ScenarioModel& model, const std::filesystem::path& path) {
    write_file(path, serialize_scenario(model));
}

// ---------------------------------------------------------------------------
// profiles

std::pair<std::string, ProfileMatrix> parse_profile(const std::string& text) {
    const json j = parse_json(text);
    require_object(j, "document");
    reject_unknown_keys(j, "document", {"dicta", "entries", "meta", "normalized", "prescripts"});

    const json& meta = member(j, "document", "meta");
    require_object(meta, "meta");
    reject_unknown_keys(meta, "meta", {"format_version", "name"});
    check_format_version(meta, "meta");
    const std::string profile_id = as_string(member(meta, "meta", "name"), "meta.name");

    ProfileMatrix m;
    const json& prescripts = member(j, "document", "prescripts");
    require_array(prescripts, "prescripts");
    for (std::size_t i = 0; i < prescripts.size(); ++i)
        m.prescript_ids.push_back(
            as_string(prescripts[i], "prescripts[" + std::to_string(i) + "]"));
    const json& dicta = member(j, "document", "dicta");
    require_array(dicta, "dicta");
    for (std::size_t i = 0; i < dicta.size(); ++i)
        m.dictum_ids.push_back(as_string(dicta[i], "dicta[" + std::to_string(i) + "]"));

    std::set<std::string> unique_rows(m.prescript_ids.begin(), m.prescript_ids.end());
    std::set<std::string> unique_cols(m.dictum_ids.begin(), m.dictum_ids.end());
    if (unique_rows.size() != m.prescript_ids.size())
        schema_error("prescripts", "duplicate prescript id");
    if (unique_cols.size() != m.dictum_ids.size()) schema_error("dicta", "duplicate dictum id");

    const json& entries = member(j, "document", "entries");
    require_array(entries, "entries");
    if (entries.size() != m.prescript_ids.size())
        schema_error("entries", "expected " + std::to_string(m.prescript_ids.size()) +
                                    " rows, found " + std::to_string(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string where = "entries[" + std::to_string(i) + "]";
        require_array(entries[i], where);
        if (entries[i].size() != m.dictum_ids.size())
            schema_error(where, "expected " + std::to_string(m.dictum_ids.size()) +
                                    " columns, found " + std::to_string(entries[i].size()));
        std::vector<double> row;
        row.reserve(entries[i].size());
        for (std::size_t c = 0; c < entries[i].size(); ++c)
            row.push_back(as_number(entries[i][c], where + "[" + std::to_string(c) + "]"));
        m.entries.push_back(std::move(row));
    }

    m.normalized = as_bool(member(j, "document", "normalized"), "normalized");
    return {profile_id, std::move(m)};
}

std::pair<std::string, ProfileMatrix> load_profile(const std::filesystem::path& path) {
    try {
        return parse_profile(read_file(path));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Schema)
            throw Error(e.kind(), path.string() + ": " + e.what());
        throw;
    }
}

std::string serialize_profile(const std::string& profile_id, const ProfileMatrix& matrix) {
    json j;
    j["meta"]["format_version"] = kFormatVersion;
    j["meta"]["name"] = profile_id;
    j["prescripts"] = matrix.prescript_ids;
    j["dicta"] = matrix.dictum_ids;
    j["entries"] = matrix.entries;
    j["normalized"] = matrix.normalized;
    return dump_document(j);
}

void save_profile(const std::string& profile_id, const ProfileMatrix& matrix,
                  const std::filesystem::path& path) {
    write_file(path, serialize_profile(profile_id, matrix));
}

namespace {

void require_filename_safe(const std::string& id) {
    if (id.empty()) throw Error(ErrorKind::InvalidArgument, "profile id is empty");
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        if (!ok)
            throw Error(ErrorKind::InvalidArgument,
                        "profile id '" + id + "' is not filename-safe ([A-Za-z0-9._-] only)");
    }
    if (id.front() == '.')
        throw Error(ErrorKind::InvalidArgument, "profile id '" + id + "' may not begin with '.'");
}

}  // namespace

void save_collection(const ProfileCollection& collection, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create directory '" + dir.string() + "'");

    json index;
    index["meta"]["format_version"] = kFormatVersion;
    index["profiles"] = json::object();

    std::map<std::string, std::string> cluster_of;
    for (const auto& [cluster_id, members] : collection.clusters)
        for (const auto& id : members) cluster_of[id] = cluster_id;

    for (const auto& [id, matrix] : collection.profiles) {
        require_filename_safe(id);
        const std::string filename = id + ".ethp";
        save_profile(id, matrix, dir / filename);
        auto it = cluster_of.find(id);
        if (it == cluster_of.end())
            throw Error(ErrorKind::Mismatch, "profile '" + id + "' has no cluster assignment");
        json entry;
        entry["cluster"] = it->second;
        entry["file"] = filename;
        entry["medoid"] = collection.medoids.count(it->second) &&
                          collection.medoids.at(it->second) == id;
        index["profiles"][id] = std::move(entry);
    }
    write_file(dir / "collection.json", dump_document(index));
}

ProfileCollection load_collection(const std::filesystem::path& dir) {
    const std::filesystem::path index_path = dir / "collection.json";
    const json j = parse_json(read_file(index_path));
    require_object(j, "collection");
    reject_unknown_keys(j, "collection", {"meta", "profiles"});
    const json& meta = member(j, "collection", "meta");
    require_object(meta, "meta");
    check_format_version(meta, "meta");

    const json& profiles = member(j, "collection", "profiles");
    require_object(profiles, "profiles");

    ProfileCollection collection;
    for (const auto& [id, entry] : profiles.items()) {
        const std::string where = "profiles." + id;
        require_object(entry, where);
        reject_unknown_keys(entry, where, {"cluster", "file", "medoid"});
        const std::string cluster_id = as_string(member(entry, where, "cluster"),
                                                 where + ".cluster");
        const std::string file = as_string(member(entry, where, "file"), where + ".file");
        const bool is_medoid = as_bool(member(entry, where, "medoid"), where + ".medoid");

        auto [loaded_id, matrix] = load_profile(dir / file);
        if (loaded_id != id)
            schema_error(where, "profile file '" + file + "' declares name '" + loaded_id + "'");
        collection.profiles.emplace_back(id, std::move(matrix));
        collection.clusters[cluster_id].push_back(id);
        if (is_medoid) {
            if (collection.medoids.count(cluster_id))
                schema_error(where, "cluster '" + cluster_id + "' has more than one medoid");
            collection.medoids[cluster_id] = id;
        }
    }

    std::sort(collection.profiles.begin(), collection.profiles.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, members] : collection.clusters) std::sort(members.begin(), members.end());
    for (const auto& [cluster_id, members] : collection.clusters) {
        if (!collection.medoids.count(cluster_id))
            throw Error(ErrorKind::Schema,
                        "cluster '" + cluster_id + "' in '" + index_path.string() +
                            "' has no medoid");
    }
    for (const auto& [id, matrix] : collection.profiles) {
        if (!matrix.normalized)
            throw Error(ErrorKind::Mismatch, "stored profile '" + id + "' is not normalized");
        if (!matrix.same_shape(collection.profiles.front().second))
            throw Error(ErrorKind::Mismatch,
                        "stored profile '" + id + "' does not match the collection shape");
    }
    return collection;
}

// ---------------------------------------------------------------------------
// weight configurations

WeightConfig parse_weight_config(const std::string& text) {
    const json j = parse_json(text);
    require_object(j, "document");
    reject_unknown_keys(j, "document", {"baseline", "meta", "objective"});

    const json& meta = member(j, "document", "meta");
    require_object(meta, "meta");
    reject_unknown_keys(meta, "meta", {"format_version", "name"});
    check_format_version(meta, "meta");

    WeightConfig config;
    if (const json* v = opt_member(meta, "name")) config.name = as_string(*v, "meta.name");
    if (const json* v = opt_member(j, "objective")) {
        ObjectiveWeights w;
        w.weights = number_map(*v, "objective");
        config.objective = std::move(w);
    }
    if (const json* v = opt_member(j, "baseline")) {
        require_object(*v, "baseline");
        BaselineWeights w;
        for (const auto& [prescript_id, row] : v->items())
            w.weights[prescript_id] = number_map(row, "baseline." + prescript_id);
        config.baseline = std::move(w);
    }
    if (!config.objective && !config.baseline)
        schema_error("document", "weight configuration needs 'objective' and/or 'baseline'");
    return config;
}

WeightConfig load_weight_config(const std::filesystem::path& path) {
    try {
        return parse_weight_config(read_file(path));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Schema)
            throw Error(e.kind(), path.string() + ": " + e.what());
        throw;
    }
}

std::string serialize_weight_config(const WeightConfig& config) {
    json j;
    j["meta"]["format_version"] = kFormatVersion;
    if (!config.name.empty()) j["meta"]["name"] = config.name;
    if (config.objective) j["objective"] = config.objective->weights;
    if (config.baseline) j["baseline"] = config.baseline->weights;
    return dump_document(j);
}

ScenarioModel apply_weight_config(const ScenarioModel& model, const WeightConfig& config) {
    ScenarioModel out = model;
    if (config.objective) out.objective_weights = config.objective;
    if (config.baseline) out.baseline_weights = config.baseline;
    require_valid(out);
    return out;
}

// ---------------------------------------------------------------------------
// reference corpus

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path) {
    const json j = parse_json(read_file(path));
    require_object(j, "corpus");
    reject_unknown_keys(j, "corpus", {"meta", "records"});
    const json& meta = member(j, "corpus", "meta");
    require_object(meta, "meta");
    check_format_version(meta, "meta");

    const json& records = member(j, "corpus", "records");
    require_array(records, "records");

    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");
    std::vector<CorpusEntry> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::string where = "records[" + std::to_string(i) + "]";
        const json& record = records[i];
        require_object(record, where);
        reject_unknown_keys(record, where, {"action", "scenario"});
        CorpusEntry entry;
        entry.scenario_path = as_string(member(record, where, "scenario"), where + ".scenario");
        entry.action_id = as_string(member(record, where, "action"), where + ".action");
        entry.model = load_scenario(base / entry.scenario_path);
        out.push_back(std::move(entry));
    }
    return out;
}

// ---------------------------------------------------------------------------
// reports

std::string serialize_validation_report(const ValidationReport& report) {
    json j;
    j["report"] = "validation";
    j["format_version"] = kFormatVersion;
    j["valid"] = report.valid();
    j["issues"] = json::array();
    for (const auto& issue : report.issues) {
        json item;
        item["code"] = issue.code;
        item["subject"] = issue.subject;
        if (issue.residual) item["residual"] = *issue.residual;
        item["message"] = issue.message;
        j["issues"].push_back(std::move(item));
    }
    return dump_document(j);
}

std::string serialize_decision_report(const DecisionReport& report) {
    json j;
    j["report"] = "decision";
    j["format_version"] = kFormatVersion;
    j["chosen_action"] = report.chosen_action;
    j["tie"] = report.tie;
    j["tied_actions"] = report.tied_actions;
    j["expected_utilities"] = report.expected_utilities;
    j["objective_breakdown"] = report.objective_breakdown;
    j["mode"] = report.mode;
    if (report.action_distribution) j["action_distribution"] = *report.action_distribution;
    if (report.temperature) j["temperature"] = *report.temperature;
    if (report.seed) j["seed"] = *report.seed;
    if (!report.draws.empty()) j["draws"] = report.draws;
    return dump_document(j);
}

std::string serialize_verifier_report(const VerifierReport& report) {
    json j;
    j["report"] = "verifier";
    j["format_version"] = kFormatVersion;
    j["property"] = report.property;
    j["pass"] = report.pass;
    j["trials"] = report.trials;
    j["measured"] = report.measured;
    j["failures"] = report.failures;
    return dump_document(j);
}

std::string serialize_convergence_report(const ConvergenceReport& report) {
    json j;
    j["report"] = "convergence";
    j["format_version"] = kFormatVersion;
    j["converged"] = report.converged;
    if (report.convergence_step) j["convergence_step"] = *report.convergence_step;
    j["final_probability"] = report.final_probability;
    j["stability_window"] = report.stability_window;
    j["trajectory"] = json::array();
    for (const auto& [t, p] : report.trajectory) j["trajectory"].push_back(json::array({t, p}));
    return dump_document(j);
}

std::string serialize_retrieval_result(const RetrievalResult& result) {
    json j;
    j["report"] = "retrieval";
    j["format_version"] = kFormatVersion;
    j["profile_id"] = result.profile_id;
    j["cluster_id"] = result.cluster_id;
    j["distance"] = result.distance;
    return dump_document(j);
}

namespace {

json parse_report_document(const std::string& text, const char* expected_kind) {
    const json j = parse_json(text);
    require_object(j, "report");
    const std::string kind = as_string(member(j, "report", "report"), "report.report");
    if (kind != expected_kind)
        schema_error("report", std::string("expected a '") + expected_kind + "' report, found '" +
                                   kind + "'");
    const long version = as_integer(member(j, "report", "format_version"),
                                    "report.format_version");
    if (version != kFormatVersion)
        schema_error("report.format_version",
                     "unsupported format_version " + std::to_string(version));
    return j;
}

}  // namespace

ValidationReport parse_validation_report(const std::string& text) {
    const json j = parse_report_document(text, "validation");
    ValidationReport report;
    const json& issues = member(j, "report", "issues");
    require_array(issues, "issues");
    for (std::size_t i = 0; i < issues.size(); ++i) {
        const std::string where = "issues[" + std::to_string(i) + "]";
        const json& item = issues[i];
        require_object(item, where);
        ValidationIssue issue;
        issue.code = as_string(member(item, where, "code"), where + ".code");
        issue.subject = as_string(member(item, where, "subject"), where + ".subject");
        issue.message = as_string(member(item, where, "message"), where + ".message");
        if (const json* v = opt_member(item, "residual"))
            issue.residual = as_number(*v, where + ".residual");
        report.issues.push_back(std::move(issue));
    }
    return report;
}

DecisionReport parse_decision_report(const std::string& text) {
    const json j = parse_report_document(text, "decision");
    DecisionReport report;
    report.chosen_action = as_string(member(j, "report", "chosen_action"), "chosen_action");
    report.tie = as_bool(member(j, "report", "tie"), "tie");
    const json& tied = member(j, "report", "tied_actions");
    require_array(tied, "tied_actions");
    for (std::size_t i = 0; i < tied.size(); ++i)
        report.tied_actions.push_back(as_string(tied[i], "tied_actions"));
    report.expected_utilities = number_map(member(j, "report", "expected_utilities"),
                                           "expected_utilities");
    const json& breakdown = member(j, "report", "objective_breakdown");
    require_object(breakdown, "objective_breakdown");
    for (const auto& [action_id, row] : breakdown.items())
        report.objective_breakdown[action_id] =
            number_map(row, "objective_breakdown." + action_id);
    report.mode = as_string(member(j, "report", "mode"), "mode");
    if (const json* v = opt_member(j, "action_distribution"))
        report.action_distribution = number_map(*v, "action_distribution");
    if (const json* v = opt_member(j, "temperature"))
        report.temperature = as_number(*v, "temperature");
    if (const json* v = opt_member(j, "seed")) {
        if (!v->is_number_unsigned() && !v->is_number_integer())
            schema_error("seed", "expected an integer");
        report.seed = v->get<std::uint64_t>();
    }
    if (const json* v = opt_member(j, "draws")) {
        require_array(*v, "draws");
        for (std::size_t i = 0; i < v->size(); ++i)
            report.draws.push_back(as_string((*v)[i], "draws"));
    }
    return report;
}

VerifierReport parse_verifier_report(const std::string& text) {
    const json j = parse_report_document(text, "verifier");
    VerifierReport report;
    report.property = as_string(member(j, "report", "property"), "property");
    report.pass = as_bool(member(j, "report", "pass"), "pass");
    report.trials = as_integer(member(j, "report", "trials"), "trials");
    report.measured = number_map(member(j, "report", "measured"), "measured");
    const json& failures = member(j, "report", "failures");
    require_array(failures, "failures");
    for (std::size_t i = 0; i < failures.size(); ++i) {
        const json& v = failures[i];
        if (!v.is_number_unsigned() && !v.is_number_integer())
            schema_error("failures", "expected an integer");
        report.failures.push_back(v.get<std::uint64_t>());
    }
    return report;
}

ConvergenceReport parse_convergence_report(const std::string& text) {
    const json j = parse_report_document(text, "convergence");
    ConvergenceReport report;
    report.converged = as_bool(member(j, "report", "converged"), "converged");
    if (const json* v = opt_member(j, "convergence_step"))
        report.convergence_step = as_integer(*v, "convergence_step");
    report.final_probability =
        as_number(member(j, "report", "final_probability"), "final_probability");
    report.stability_window =
        as_integer(member(j, "report", "stability_window"), "stability_window");
    const json& trajectory = member(j, "report", "trajectory");
    require_array(trajectory, "trajectory");
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const std::string where = "trajectory[" + std::to_string(i) + "]";
        const json& point = trajectory[i];
        require_array(point, where);
        if (point.size() != 2) schema_error(where, "expected a [step, probability] pair");
        report.trajectory.emplace_back(as_integer(point[0], where),
                                       as_number(point[1], where));
    }
    return report;
}

RetrievalResult parse_retrieval_result(const std::string& text) {
    const json j = parse_report_document(text, "retrieval");
    RetrievalResult result;
    result.profile_id = as_string(member(j, "report", "profile_id"), "profile_id");
    result.cluster_id = as_string(member(j, "report", "cluster_id"), "cluster_id");
    result.distance = as_number(member(j, "report", "distance"), "distance");
    return result;
}

// ---------------------------------------------------------------------------
// bundled fixtures

namespace {

ScenarioModel trolley_scenario_1() {
    ScenarioModel m;
    m.name = "trolley_scenario_1";
    m.utility_bound = 100.0;
    m.notes =
        "No pedestrians on either route. Route A is the default path but carries loose "
        "debris (1 damage unit dry, 2 wet); route B is clear but needs a steering "
        "intervention (1 interference unit). Casualty cost is 10 per person, damage 1 per "
        "unit, interference 1 per unit, all as negative utilities. Damage concerns dominate "
        "the prescript priorities, so route_B wins: U(route_A) = -0.71, U(route_B) = -0.27.";
    m.dicta = {
        {"clear_dry", "No pedestrians anywhere; dry road surface",
         {"pedestrian-count=0", "surface=dry", "default-path=A"}},
        {"clear_wet", "No pedestrians anywhere; wet road surface",
         {"pedestrian-count=0", "surface=wet", "default-path=A"}},
    };
    m.prescripts = {
        {"X", "Minimize human casualties", 1},
        {"Y", "Minimize physical damage", 2},
        {"Z", "Minimize external interference", 3},
    };
    m.actions = {
        {"route_A", "Stay on the default route A"},
        {"route_B", "Steer onto route B"},
    };
    m.context.entries = {{"clear_dry", 0.7}, {"clear_wet", 0.3}};
    m.conditional.table = {
        {"clear_dry", {{"X", 0.2}, {"Y", 0.5}, {"Z", 0.3}}},
        {"clear_wet", {{"X", 0.2}, {"Y", 0.6}, {"Z", 0.2}}},
    };
    m.utilities.values = {
        {"route_A",
         {{"clear_dry", {{"X", 0.0}, {"Y", -1.0}, {"Z", 0.0}}},
          {"clear_wet", {{"X", 0.0}, {"Y", -2.0}, {"Z", 0.0}}}}},
        {"route_B",
         {{"clear_dry", {{"X", 0.0}, {"Y", 0.0}, {"Z", -1.0}}},
          {"clear_wet", {{"X", 0.0}, {"Y", 0.0}, {"Z", -1.0}}}}},
    };
    m.canonicalize();
    return m;
}

ScenarioModel trolley_scenario_2() {
    ScenarioModel m;
    m.name = "trolley_scenario_2";
    m.utility_bound = 100.0;
    m.notes =
        "Two pedestrians stand on route B; route A is the default path, clear of people "
        "but carrying the same debris as scenario 1. Casualty cost is 10 per person, so "
        "minimizing casualties dominates: U(route_A) = -0.2, U(route_B) = -14.1, and "
        "route_A (also the default) wins.";
    m.dicta = {
        {"two_on_b", "Two pedestrians on route B; route A clear",
         {"pedestrian-count-a=0", "pedestrian-count-b=2", "default-path=A"}},
    };
    m.prescripts = {
        {"X", "Minimize human casualties", 1},
        {"Y", "Minimize physical damage", 2},
        {"Z", "Minimize external interference", 3},
    };
    m.actions = {
        {"route_A", "Stay on the default route A"},
        {"route_B", "Steer onto route B"},
    };
    m.context.entries = {{"two_on_b", 1.0}};
    m.conditional.table = {{"two_on_b", {{"X", 0.7}, {"Y", 0.2}, {"Z", 0.1}}}};
    m.utilities.values = {
        {"route_A", {{"two_on_b", {{"X", 0.0}, {"Y", -1.0}, {"Z", 0.0}}}}},
        {"route_B", {{"two_on_b", {{"X", -20.0}, {"Y", 0.0}, {"Z", -1.0}}}}},
    };
    m.canonicalize();
    return m;
}

ScenarioModel trolley_scenario_3() {
    ScenarioModel m;
    m.name = "trolley_scenario_3";
    m.utility_bound = 100.0;
    m.notes =
        "Route A is the default path with three pedestrians; route B carries two and "
        "requires intervention. The encoding follows the per-route counts (A=3, B=2) even "
        "though the dilemma is sometimes narrated as saving three at the expense of two. "
        "Casualty cost is 10 per person under X, damage 1 under Y, interference 1 under Z; "
        "with P(E|c) = (0.7, 0.2, 0.1) the weighted interference penalty (0.1) is far below "
        "one casualty's weighted cost (7.0), so switching is optimal: U(route_A) = -21.2, "
        "U(route_B) = -14.1. Raise the interference utility above one casualty's cost to "
        "invert the choice.";
    m.dicta = {
        {"three_on_a_two_on_b", "Three pedestrians on default route A; two on route B",
         {"pedestrian-count-a=3", "pedestrian-count-b=2", "default-path=A"}},
    };
    m.prescripts = {
        {"X", "Minimize human casualties", 1},
        {"Y", "Minimize physical damage", 2},
        {"Z", "Minimize external interference", 3},
    };
    m.actions = {
        {"route_A", "Stay on the default route A"},
        {"route_B", "Steer onto route B"},
    };
    m.context.entries = {{"three_on_a_two_on_b", 1.0}};
    m.conditional.table = {{"three_on_a_two_on_b", {{"X", 0.7}, {"Y", 0.2}, {"Z", 0.1}}}};
    m.utilities.values = {
        {"route_A", {{"three_on_a_two_on_b", {{"X", -30.0}, {"Y", -1.0}, {"Z", 0.0}}}}},
        {"route_B", {{"three_on_a_two_on_b", {{"X", -20.0}, {"Y", 0.0}, {"Z", -1.0}}}}},
    };
    m.canonicalize();
    return m;
}

ScenarioModel trolley_scenario_4() {
    ScenarioModel m;
    m.name = "trolley_scenario_4";
    m.utility_bound = 100.0;
    m.notes =
        "Route A (default) carries two children; route B carries three adults, and in one "
        "contextual reading one of them is a critical-care medic. The contested judgments "
        "live in two extra prescripts: XC (avoid harming children) and XR (preserve "
        "critical societal roles). With the neutral default weights (all 1.0) the choice is "
        "route_A: U(route_A) = -12.1, U(route_B) = -13.6. Two objective-weight "
        "configurations ship side by side and are never applied by default: "
        "scenario4_children_first (XC=3, XR=0) flips the choice to route_B, while "
        "scenario4_role_first (XC=0, XR=3) keeps route_A. Neither configuration is "
        "endorsed; they demonstrate how attribute-sensitive weights move the decision.";
    m.dicta = {
        {"children_on_a_adults_on_b",
         "Two children on route A; three adults on route B",
         {"pedestrian-count-a=2", "pedestrian-count-b=3", "ages-a=child", "default-path=A"}},
        {"children_on_a_medic_among_b",
         "Two children on route A; three adults on route B, one a critical-care medic",
         {"pedestrian-count-a=2", "pedestrian-count-b=3", "ages-a=child", "role-b=medic",
          "default-path=A"}},
    };
    m.prescripts = {
        {"X", "Minimize human casualties", 1},
        {"Y", "Minimize physical damage", 2},
        {"Z", "Minimize external interference", 3},
        {"XC", "Avoid harming children", 4},
        {"XR", "Preserve critical societal roles", 5},
    };
    m.actions = {
        {"route_A", "Stay on the default route A"},
        {"route_B", "Steer onto route B"},
    };
    m.context.entries = {{"children_on_a_adults_on_b", 0.5},
                         {"children_on_a_medic_among_b", 0.5}};
    m.conditional.table = {
        {"children_on_a_adults_on_b",
         {{"X", 0.4}, {"XC", 0.2}, {"XR", 0.2}, {"Y", 0.1}, {"Z", 0.1}}},
        {"children_on_a_medic_among_b",
         {{"X", 0.4}, {"XC", 0.2}, {"XR", 0.2}, {"Y", 0.1}, {"Z", 0.1}}},
    };
    m.utilities.values = {
        {"route_A",
         {{"children_on_a_adults_on_b",
           {{"X", -20.0}, {"XC", -20.0}, {"XR", 0.0}, {"Y", -1.0}, {"Z", 0.0}}},
          {"children_on_a_medic_among_b",
           {{"X", -20.0}, {"XC", -20.0}, {"XR", 0.0}, {"Y", -1.0}, {"Z", 0.0}}}}},
        {"route_B",
         {{"children_on_a_adults_on_b",
           {{"X", -30.0}, {"XC", 0.0}, {"XR", 0.0}, {"Y", 0.0}, {"Z", -1.0}}},
          {"children_on_a_medic_among_b",
           {{"X", -30.0}, {"XC", 0.0}, {"XR", -15.0}, {"Y", 0.0}, {"Z", -1.0}}}}},
    };
    m.canonicalize();
    return m;
}

}  // namespace

std::vector<ScenarioModel> bundled_scenarios() {
    return {trolley_scenario_1(), trolley_scenario_2(), trolley_scenario_3(),
            trolley_scenario_4()};
}

std::pair<WeightConfig, WeightConfig> bundled_scenario4_weight_configs() {
    WeightConfig children_first;
    children_first.name = "scenario4_children_first";
    children_first.objective = ObjectiveWeights{
        {{"X", 1.0}, {"XC", 3.0}, {"XR", 0.0}, {"Y", 1.0}, {"Z", 1.0}}};

    WeightConfig role_first;
    role_first.name = "scenario4_role_first";
    role_first.objective = ObjectiveWeights{
        {{"X", 1.0}, {"XC", 0.0}, {"XR", 3.0}, {"Y", 1.0}, {"Z", 1.0}}};

    return {std::move(children_first), std::move(role_first)};
}

}  // namespace ethos
