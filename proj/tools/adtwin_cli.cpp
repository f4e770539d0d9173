// Command-line front end: run episodes and clusters of the bridge twin,
// emit the generative-model document, and inspect model files.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "adt/bridge.hpp"
#include "adt/harness.hpp"
#include "adt/trace_io.hpp"

namespace {

using adt::bridge::BridgeConfig;
using nlohmann::json;

struct CliOptions {
    BridgeConfig config;
    std::string mode = "mixed";
    std::optional<bool> with_re;
    std::size_t n = 100;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "rows";
    std::string model_path;
    bool traces = false;
    std::size_t jobs = 1;
};

// Applies a JSON config file before flag parsing; flags override the file.
void apply_config_file(const std::string& path, CliOptions& opt) {
    const json j = json::parse(adt::harness::read_file(path));
    auto get = [&j](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("mode", opt.mode);
    get("alpha", opt.config.alpha);
    get("gamma", opt.config.gamma);
    get("horizon", opt.config.horizon);
    get("steps", opt.config.episode_length);
    get("eta_b", opt.config.eta_b);
    get("accuracy", opt.config.confusion_accuracy);
    get("seed", opt.seed);
    get("n", opt.n);
    get("out", opt.out);
    get("format", opt.format);
    get("traces", opt.traces);
    get("full_g", opt.config.full_g);
    get("top_k", opt.config.top_k);
    get("jobs", opt.jobs);
    if (j.contains("with_re")) opt.with_re = j.at("with_re").get<bool>();
}

void finalize(CliOptions& opt) {
    opt.config.mode = adt::bridge::mode_from_string(opt.mode);
    opt.config.seed = opt.seed;
    opt.config.include_re = opt.with_re;
    adt::bridge::check_config(opt.config);
}

void write_or_print(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-")
        std::cout << content;
    else
        adt::harness::write_file(out, content);
}

int cmd_run(CliOptions& opt) {
    finalize(opt);
    const adt::harness::TwinTrace trace = adt::harness::run_episode(opt.config);
    const std::string content = opt.format == "document"
                                    ? adt::harness::trace_to_document(trace)
                                    : adt::harness::trace_to_rows(trace);
    write_or_print(opt.out, content);
    std::cerr << "episode seed " << trace.seed << ": " << trace.steps.size() << " steps, "
              << (trace.failed ? "failed" : "completed") << "\n";
    return 0;
}

int cmd_cluster(CliOptions& opt) {
    finalize(opt);
    const auto traces = adt::harness::run_cluster_traces(opt.config, opt.n, opt.seed, opt.jobs);
    std::size_t total_steps = 0;
    for (const auto& t : traces) total_steps += t.steps.size();
    const adt::harness::ClusterReport report =
        adt::harness::summarize_cluster(traces, opt.config, opt.seed, 0.0);

    const std::string base = opt.out.empty() ? "." : opt.out;
    adt::harness::write_file(base + "/report.json", adt::harness::report_to_json(report));
    if (opt.traces) {
        for (std::size_t i = 0; i < traces.size(); ++i) {
            const std::string path = base + "/trace_" + std::to_string(opt.seed + i) +
                                     (opt.format == "document" ? ".json" : ".csv");
            adt::harness::write_file(path, opt.format == "document"
                                               ? adt::harness::trace_to_document(traces[i])
                                               : adt::harness::trace_to_rows(traces[i]));
        }
    }
    std::cerr << "cluster: " << report.failures << "/" << report.n_episodes << " failures\n";
    return 0;
}

int cmd_build_model(CliOptions& opt) {
    finalize(opt);
    adt::Rng rng(opt.config.seed);
    const adt::GenerativeModel model = adt::bridge::build_bridge_model(opt.config, rng);
    write_or_print(opt.out, adt::serialize(model));
    return 0;
}

int cmd_inspect(CliOptions& opt) {
    const adt::GenerativeModel model =
        adt::deserialize(adt::harness::read_file(opt.model_path));
    const adt::ValidationReport report = adt::validate(model);
    std::cout << "factors:";
    for (const auto& f : model.factors) std::cout << " " << f.name << "(" << f.cardinality << ")";
    std::cout << "\nmodalities:";
    for (const auto& m : model.modalities)
        std::cout << " " << m.name << "(" << m.cardinality << ")";
    std::cout << "\nactions: " << model.num_actions() << "\n";
    if (report.ok()) {
        std::cout << "validation: ok\n";
        return 0;
    }
    std::cout << "validation: " << report.violations.size() << " violation(s)\n";
    for (const auto& v : report.violations) std::cout << "  - " << v.where << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active-inference digital twin for bridge maintenance simulation"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string config_path;

    // The config file must be applied before flag values land, so scan for
    // --config ahead of the main parse.
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    if (!config_path.empty()) {
        try {
            apply_config_file(config_path, opt);
        } catch (const std::exception& e) {
            std::cerr << "error reading config file: " << e.what() << "\n";
            return 1;
        }
    }

    bool re_on = false;
    bool re_off = false;
    auto add_shared = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file mirroring these flags");
        cmd->add_option("--mode", opt.mode, "pragmatic_only | mixed | mixed_learning")
            ->capture_default_str();
        cmd->add_option("--alpha", opt.config.alpha, "likelihood entropy mix in [0,1]")
            ->capture_default_str();
        cmd->add_option("--gamma", opt.config.gamma, "policy precision")->capture_default_str();
        cmd->add_option("--horizon", opt.config.horizon, "policy horizon")->capture_default_str();
        cmd->add_option("--steps", opt.config.episode_length, "episode length")
            ->capture_default_str();
        cmd->add_option("--eta-b", opt.config.eta_b, "transition learning rate")
            ->capture_default_str();
        cmd->add_option("--accuracy", opt.config.confusion_accuracy,
                        "confusion channel accuracy in (0,1]")
            ->capture_default_str();
        cmd->add_option("--seed", opt.seed, "base random seed")->capture_default_str();
        cmd->add_option("--out", opt.out, "output file or directory");
        cmd->add_option("--format", opt.format, "rows | document")->capture_default_str();
        cmd->add_option("--top-k", opt.config.top_k, "policies logged per step")
            ->capture_default_str();
        cmd->add_flag("--full-g", opt.config.full_g, "log the full G vector per step");
        cmd->add_flag("--with-re", re_on, "force the RE action into the action set");
        cmd->add_flag("--no-re", re_off, "remove the RE action from the action set");
    };

    CLI::App* run = app.add_subcommand("run", "simulate a single episode");
    add_shared(run);
    CLI::App* cluster = app.add_subcommand("cluster", "simulate a cluster of episodes");
    add_shared(cluster);
    cluster->add_option("--n", opt.n, "number of episodes")->capture_default_str();
    cluster->add_flag("--traces", opt.traces, "write one trace file per episode");
    cluster->add_option("--jobs", opt.jobs, "episodes to run concurrently")
        ->capture_default_str();
    CLI::App* build = app.add_subcommand("build-model", "emit the bridge model document");
    add_shared(build);
    CLI::App* inspect = app.add_subcommand("inspect", "validate and summarize a model document");
    inspect->add_option("--model", opt.model_path, "model document path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    if (re_on && re_off) {
        std::cerr << "--with-re and --no-re are mutually exclusive\n";
        return 1;
    }
    if (re_on) opt.with_re = true;
    if (re_off) opt.with_re = false;

    try {
        if (run->parsed()) return cmd_run(opt);
        if (cluster->parsed()) return cmd_cluster(opt);
        if (build->parsed()) return cmd_build_model(opt);
        if (inspect->parsed()) return cmd_inspect(opt);
    } catch (const adt::SchemaError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 2;
    } catch (const adt::InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
