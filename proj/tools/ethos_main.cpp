// Command-line front end for the full pipeline: validate, decide, sample,
// perturb (robustness), consistency, optimality, align, learn, and the
// profile build/normalize/cluster/retrieve workflow.
//
// Exit codes: 0 success or pass verdict, 1 fail verdict (or violations from
// `validate`), 2 usage/parse/input errors. All randomness flows through an
// explicit --seed; a missing flag means seed 0, never entropy. Machine
// format is the canonical JSON serialization and is byte-stable for fixed
// inputs and seeds.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ethos/decision.hpp"
#include "ethos/learning.hpp"
#include "ethos/model.hpp"
#include "ethos/profile.hpp"
#include "ethos/scenario_io.hpp"
#include "ethos/verifier.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ethos;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct Output {
    std::string format = "human";
    std::string path;  // empty -> stdout

    bool machine() const { return format == "machine"; }

    void emit(const std::string& text) const {
        if (!path.empty()) {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
            out << text;
            if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
        } else {
            std::cout << text;
        }
    }
};

// Single-line machine-parsable error record on the error stream.
void emit_error_record(const std::string& kind, const std::string& message) {
    std::string escaped;
    for (char c : message) {
        switch (c) {
            case '"': escaped += "\\\""; break;
            case '\\': escaped += "\\\\"; break;
            case '\n': escaped += "\\n"; break;
            case '\t': escaped += "\\t"; break;
            default: escaped += c;
        }
    }
    std::cerr << "{\"error\":\"" << kind << "\",\"message\":\"" << escaped << "\"}\n";
}

std::string render_validation(const ValidationReport& report) {
    if (report.valid()) return "valid: yes\n";
    std::string out = "valid: no\nviolations (" + std::to_string(report.issues.size()) + "):\n";
    for (const auto& issue : report.issues) {
        out += "  [" + issue.code + "] " + issue.message + "\n";
    }
    return out;
}

std::string render_decision(const DecisionReport& report) {
    std::string out;
    out += "decision: " + report.chosen_action + "\n";
    out += "mode: " + report.mode + "\n";
    if (report.tie) {
        out += "tie: yes (";
        for (std::size_t i = 0; i < report.tied_actions.size(); ++i) {
            if (i) out += ", ";
            out += report.tied_actions[i];
        }
        out += ")\n";
    } else {
        out += "tie: no\n";
    }
    out += "expected utilities:\n";
    for (const auto& [action, u] : report.expected_utilities)
        out += "  " + action + ": " + fmt(u) + "\n";
    out += "objective breakdown:\n";
    for (const auto& [action, row] : report.objective_breakdown) {
        out += "  " + action + ":";
        for (const auto& [prescript, v] : row) out += " " + prescript + "=" + fmt(v);
        out += "\n";
    }
    if (report.action_distribution) {
        out += "action distribution (temperature " + fmt(*report.temperature) + "):\n";
        for (const auto& [action, p] : *report.action_distribution)
            out += "  " + action + ": " + fmt(p) + "\n";
    }
    if (!report.draws.empty()) {
        std::map<std::string, int> counts;
        for (const auto& a : report.draws) counts[a] += 1;
        out += "draws (" + std::to_string(report.draws.size()) + "):";
        for (const auto& a : report.draws) out += " " + a;
        out += "\ndraw counts:\n";
        for (const auto& [a, n] : counts) out += "  " + a + ": " + std::to_string(n) + "\n";
    }
    return out;
}

std::string render_verifier(const VerifierReport& report) {
    std::string out;
    out += "property: " + report.property + "\n";
    out += std::string("verdict: ") + (report.pass ? "pass" : "fail") + "\n";
    out += "trials: " + std::to_string(report.trials) + "\n";
    out += "measured:\n";
    for (const auto& [key, value] : report.measured)
        out += "  " + key + ": " + fmt(value) + "\n";
    if (!report.failures.empty()) {
        out += "counterexamples (" + std::to_string(report.failures.size()) + "):";
        std::size_t shown = 0;
        for (auto seed : report.failures) {
            if (shown++ == 8) {
                out += " ...";
                break;
            }
            out += " " + std::to_string(seed);
        }
        out += "\n";
    }
    return out;
}

std::string render_convergence(const ConvergenceReport& report) {
    std::string out;
    out += std::string("converged: ") + (report.converged ? "yes" : "no") + "\n";
    if (report.convergence_step)
        out += "convergence step: " + std::to_string(*report.convergence_step) + "\n";
    out += "final probability: " + fmt(report.final_probability) + "\n";
    out += "stability window: " + std::to_string(report.stability_window) + "\n";
    return out;
}

std::string render_retrieval(const RetrievalResult& result) {
    return "profile: " + result.profile_id + "\ncluster: " + result.cluster_id +
           "\ndistance: " + fmt(result.distance) + "\n";
}

std::string render_collection(const ProfileCollection& collection) {
    std::string out = "profiles: " + std::to_string(collection.profiles.size()) + "\n";
    for (const auto& [cluster_id, members] : collection.clusters) {
        out += cluster_id + " (medoid " + collection.medoids.at(cluster_id) + "):";
        for (const auto& id : members) out += " " + id;
        out += "\n";
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "' for reading");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

void write_trace(const std::string& path, const std::vector<EpisodeRecord>& episodes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    out << "t,dictum,action,reward,p_best\n";
    for (const auto& e : episodes) {
        char reward[40], p_best[40];
        std::snprintf(reward, sizeof(reward), "%.17g", e.reward);
        std::snprintf(p_best, sizeof(p_best), "%.17g", e.best_probability);
        out << e.step << ',' << e.dictum_id << ',' << e.action_id << ',' << reward << ','
            << p_best << '\n';
    }
    if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ethos: context-aware probabilistic ethical decision engine"};
    app.require_subcommand(1);

    Output out;
    if (const char* env = std::getenv("ETHOS_FORMAT")) {
        if (std::string(env) == "machine" || std::string(env) == "human") out.format = env;
    }
    app.add_option("--format", out.format, "output format")
        ->check(CLI::IsMember({"human", "machine"}));
    app.add_option("-o,--output", out.path, "write output to a file instead of stdout");

    int exit_code = 0;

    // validate ---------------------------------------------------------------
    auto* cmd_validate = app.add_subcommand("validate", "check every scenario invariant");
    cmd_validate->fallthrough();
    static std::string validate_file;
    cmd_validate->add_option("file", validate_file, "scenario file")->required();
    cmd_validate->callback([&] {
        const ScenarioModel model = parse_scenario_text(read_text_file(validate_file));
        const ValidationReport report = validate_scenario(model);
        out.emit(out.machine() ? serialize_validation_report(report)
                               : render_validation(report));
        exit_code = report.valid() ? 0 : 1;
    });

    // decide -----------------------------------------------------------------
    auto* cmd_decide = app.add_subcommand("decide", "pick the utility-maximal action");
    cmd_decide->fallthrough();
    static std::string decide_file, decide_weights, decide_profile;
    cmd_decide->add_option("file", decide_file, "scenario file")->required();
    cmd_decide->add_option("--weights", decide_weights,
                           "weight configuration overriding the scenario's tables");
    cmd_decide->add_option("--profile", decide_profile,
                           "ethical profile applied as baseline weights before deciding");
    cmd_decide->callback([&] {
        ScenarioModel model = load_scenario(decide_file);
        if (!decide_profile.empty())
            model = apply_profile(model, load_profile(decide_profile).second);
        if (!decide_weights.empty())
            model = apply_weight_config(model, load_weight_config(decide_weights));
        const DecisionReport report = decide(model);
        out.emit(out.machine() ? serialize_decision_report(report) : render_decision(report));
        exit_code = 0;
    });

    // sample -----------------------------------------------------------------
    auto* cmd_sample = app.add_subcommand("sample", "draw from the stochastic action model");
    cmd_sample->fallthrough();
    static std::string sample_file;
    static double sample_temp = 1.0;
    static std::uint64_t sample_seed = 0;
    static int sample_n = 1;
    cmd_sample->add_option("file", sample_file, "scenario file")->required();
    cmd_sample->add_option("--temp", sample_temp, "softmax temperature (> 0)");
    cmd_sample->add_option("--seed", sample_seed, "generator seed");
    cmd_sample->add_option("--n", sample_n, "number of draws")->check(CLI::PositiveNumber);
    cmd_sample->callback([&] {
        const ScenarioModel model = load_scenario(sample_file);
        const DecisionReport report = decide_sampled(model, sample_temp, sample_seed, sample_n);
        out.emit(out.machine() ? serialize_decision_report(report) : render_decision(report));
        exit_code = 0;
    });

    // perturb (robustness) ----------------------------------------------------
    auto* cmd_perturb =
        app.add_subcommand("perturb", "measure decision robustness under context perturbation");
    cmd_perturb->fallthrough();
    static std::string perturb_file;
    static double perturb_delta = 0.1, perturb_temp = 1.0;
    static int perturb_samples = 1000;
    static std::uint64_t perturb_seed = 0;
    static double perturb_kmax = 0.0;
    bool perturb_has_kmax = false;
    cmd_perturb->add_option("file", perturb_file, "scenario file")->required();
    cmd_perturb->add_option("--delta", perturb_delta, "L1 perturbation budget in [0, 2]")
        ->required();
    cmd_perturb->add_option("--samples", perturb_samples, "perturbation count");
    cmd_perturb->add_option("--seed", perturb_seed, "perturbation seed");
    cmd_perturb->add_option("--temp", perturb_temp, "softmax temperature of the decision function");
    cmd_perturb->add_option("--kmax", perturb_kmax, "sensitivity bound for the pass verdict")
        ->trigger_on_parse()
        ->each([&](const std::string&) { perturb_has_kmax = true; });
    cmd_perturb->callback([&] {
        const ScenarioModel model = load_scenario(perturb_file);
        PerturbationSpec spec;
        spec.mode = PerturbMode::Context;
        spec.magnitude = perturb_delta;
        spec.samples = perturb_samples;
        spec.seed = perturb_seed;
        const VerifierReport report = check_robustness(
            model, spec, perturb_has_kmax ? std::optional<double>(perturb_kmax) : std::nullopt,
            perturb_temp);
        out.emit(out.machine() ? serialize_verifier_report(report) : render_verifier(report));
        exit_code = report.pass ? 0 : 1;
    });

    // consistency ---------------------------------------------------------------
    auto* cmd_consistency = app.add_subcommand(
        "consistency", "bound prescript-priority change under context perturbation");
    cmd_consistency->fallthrough();
    static std::string consistency_file, consistency_mode = "context";
    static double consistency_delta = 0.1, consistency_lmax = 0.0;
    static int consistency_samples = 1000;
    static std::uint64_t consistency_seed = 0;
    cmd_consistency->add_option("file", consistency_file, "scenario file")->required();
    cmd_consistency->add_option("--delta", consistency_delta, "L1 perturbation budget in [0, 2]")
        ->required();
    cmd_consistency->add_option("--lmax", consistency_lmax, "sensitivity bound for the verdict")
        ->required();
    cmd_consistency->add_option("--samples", consistency_samples, "perturbation count");
    cmd_consistency->add_option("--seed", consistency_seed, "perturbation seed");
    cmd_consistency->add_option("--mode", consistency_mode, "perturb the context or the table")
        ->check(CLI::IsMember({"context", "conditional"}));
    cmd_consistency->callback([&] {
        const ScenarioModel model = load_scenario(consistency_file);
        PerturbationSpec spec;
        spec.magnitude = consistency_delta;
        spec.samples = consistency_samples;
        spec.seed = consistency_seed;
        VerifierReport report;
        if (consistency_mode == "context") {
            spec.mode = PerturbMode::Context;
            report = check_consistency(model, spec, consistency_lmax);
        } else {
            spec.mode = PerturbMode::Conditional;
            report = check_conditional_consistency(model, spec, consistency_lmax);
        }
        out.emit(out.machine() ? serialize_verifier_report(report) : render_verifier(report));
        exit_code = report.pass ? 0 : 1;
    });

    // optimality ---------------------------------------------------------------
    auto* cmd_optimality =
        app.add_subcommand("optimality", "check the decision against a brute-force oracle");
    cmd_optimality->fallthrough();
    static std::string optimality_file;
    cmd_optimality->add_option("file", optimality_file, "scenario file")->required();
    cmd_optimality->callback([&] {
        const ScenarioModel model = load_scenario(optimality_file);
        const VerifierReport report = check_optimality(model);
        out.emit(out.machine() ? serialize_verifier_report(report) : render_verifier(report));
        exit_code = report.pass ? 0 : 1;
    });

    // align ---------------------------------------------------------------------
    auto* cmd_align =
        app.add_subcommand("align", "compare decisions against a reference corpus");
    cmd_align->fallthrough();
    static std::vector<std::string> align_files;
    static std::string align_corpus;
    static double align_theta = 0.0;
    cmd_align->add_option("files", align_files,
                          "optional scenario files restricting the corpus records");
    cmd_align->add_option("--corpus", align_corpus, "reference corpus file")->required();
    cmd_align->add_option("--theta", align_theta, "agreement threshold in [0, 1]")->required();
    cmd_align->callback([&] {
        std::vector<CorpusEntry> entries = load_corpus(align_corpus);
        if (!align_files.empty()) {
            const fs::path base = fs::path(align_corpus).parent_path();
            std::vector<fs::path> wanted;
            for (const auto& f : align_files) wanted.push_back(fs::weakly_canonical(f));
            std::vector<CorpusEntry> kept;
            for (auto& entry : entries) {
                const fs::path resolved = fs::weakly_canonical(base / entry.scenario_path);
                for (const auto& w : wanted) {
                    if (resolved == w) {
                        kept.push_back(std::move(entry));
                        break;
                    }
                }
            }
            if (kept.empty())
                throw Error(ErrorKind::InvalidArgument,
                            "no corpus records match the given scenario files");
            entries = std::move(kept);
        }
        std::vector<std::pair<ScenarioModel, std::string>> reference;
        reference.reserve(entries.size());
        for (auto& entry : entries)
            reference.emplace_back(std::move(entry.model), entry.action_id);
        const VerifierReport report = check_alignment(reference, align_theta);
        out.emit(out.machine() ? serialize_verifier_report(report) : render_verifier(report));
        exit_code = report.pass ? 0 : 1;
    });

    // learn -----------------------------------------------------------------------
    auto* cmd_learn =
        app.add_subcommand("learn", "run the policy-learning loop and report convergence");
    cmd_learn->fallthrough();
    static std::string learn_file, learn_trace;
    static LearningParams learn_params;
    cmd_learn->add_option("file", learn_file, "scenario file")->required();
    cmd_learn->add_option("--episodes", learn_params.episodes, "episode count")->required();
    cmd_learn->add_option("--seed", learn_params.seed, "generator seed");
    cmd_learn->add_option("--eps-conv", learn_params.eps_conv,
                          "convergence slack: require P(best) >= 1 - eps");
    cmd_learn->add_option("--window", learn_params.window, "stability window (episodes)");
    cmd_learn->add_option("--tau0", learn_params.tau0, "initial exploration temperature");
    cmd_learn->add_option("--tau-min", learn_params.tau_min, "temperature floor");
    cmd_learn->add_option("--noise", learn_params.noise_amplitude,
                          "zero-mean uniform reward noise amplitude");
    cmd_learn->add_option("--trace", learn_trace, "write per-episode rows as CSV to this file");
    cmd_learn->callback([&] {
        const ScenarioModel model = load_scenario(learn_file);
        LearningParams params = learn_params;
        params.record_episodes = !learn_trace.empty();
        const LearningResult result = run_learning(model, params);
        if (!learn_trace.empty()) write_trace(learn_trace, result.episodes);
        out.emit(out.machine() ? serialize_convergence_report(result.report)
                               : render_convergence(result.report));
        exit_code = result.report.converged ? 0 : 1;
    });

    // profile ------------------------------------------------------------------
    auto* cmd_profile = app.add_subcommand("profile", "ethical profile matrix workflow");
    cmd_profile->require_subcommand(1);
    cmd_profile->fallthrough();

    auto* cmd_build = cmd_profile->add_subcommand("build", "extract a profile from a scenario");
    cmd_build->fallthrough();
    static std::string build_file, build_name;
    cmd_build->add_option("file", build_file, "scenario file")->required();
    cmd_build->add_option("--name", build_name, "profile id (defaults to the scenario name)");
    cmd_build->callback([&] {
        const ScenarioModel model = load_scenario(build_file);
        const ProfileMatrix matrix = build_profile_matrix(model);
        const std::string id = build_name.empty() ? model.name : build_name;
        out.emit(serialize_profile(id, matrix));
        exit_code = 0;
    });

    auto* cmd_normalize =
        cmd_profile->add_subcommand("normalize", "min-max scale a profile into [0, 1]");
    cmd_normalize->fallthrough();
    static std::string normalize_file;
    cmd_normalize->add_option("file", normalize_file, "profile file")->required();
    cmd_normalize->callback([&] {
        auto [id, matrix] = load_profile(normalize_file);
        out.emit(serialize_profile(id, normalize_profile(matrix)));
        exit_code = 0;
    });

    auto* cmd_cluster =
        cmd_profile->add_subcommand("cluster", "k-medoids clustering of normalized profiles");
    cmd_cluster->fallthrough();
    static std::vector<std::string> cluster_files;
    static int cluster_k = 1;
    static std::uint64_t cluster_seed = 0;
    static std::string cluster_out;
    cmd_cluster->add_option("files", cluster_files, "normalized profile files")->required();
    cmd_cluster->add_option("-k,--clusters", cluster_k, "cluster count")->required();
    cmd_cluster->add_option("--seed", cluster_seed, "initialization seed");
    cmd_cluster->add_option("--out", cluster_out, "directory for the stored collection")
        ->required();
    cmd_cluster->callback([&] {
        std::vector<std::pair<std::string, ProfileMatrix>> profiles;
        profiles.reserve(cluster_files.size());
        for (const auto& f : cluster_files) profiles.push_back(load_profile(f));
        const ProfileCollection collection = cluster_profiles(std::move(profiles), cluster_k,
                                                              cluster_seed);
        save_collection(collection, cluster_out);
        out.emit(out.machine() ? read_text_file((fs::path(cluster_out) / "collection.json").string())
                               : render_collection(collection));
        exit_code = 0;
    });

    auto* cmd_retrieve =
        cmd_profile->add_subcommand("retrieve", "nearest stored profile for a query");
    cmd_retrieve->fallthrough();
    static std::string retrieve_dir, retrieve_query;
    cmd_retrieve->add_option("collection", retrieve_dir, "collection directory")->required();
    cmd_retrieve->add_option("query", retrieve_query, "normalized query profile file")
        ->required();
    cmd_retrieve->callback([&] {
        const ProfileCollection collection = load_collection(retrieve_dir);
        const auto [_, query] = load_profile(retrieve_query);
        const RetrievalResult result = retrieve_profile(collection, query);
        out.emit(out.machine() ? serialize_retrieval_result(result) : render_retrieval(result));
        exit_code = 0;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error_record("usage", e.what());
        return 2;
    } catch (const ValidationError& e) {
        emit_error_record(error_kind_name(e.kind()), e.what());
        return 2;
    } catch (const Error& e) {
        emit_error_record(error_kind_name(e.kind()), e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error_record("internal", e.what());
        return 2;
    }
    return exit_code;
}
