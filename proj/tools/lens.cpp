// lens: train toy models, attack their attributions and evaluate
// locality-sensitive robustness metrics.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.

#include <CLI11.hpp>

#include <iostream>

#include "lens/error.hpp"
#include "lens/harness/config.hpp"
#include "lens/harness/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> samples;

    lens::harness::ExperimentConfig load() const {
        lens::harness::Overrides o;
        o.seed = seed;
        if (out) o.out = std::filesystem::path(*out);
        o.samples = samples;
        return lens::harness::load_config(config, o);
    }
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, CommonArgs& args) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", args.config, "experiment config (key = value)")->required();
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--out", args.out, "override the output directory");
    cmd->add_option("--samples", args.samples, "override the number of evaluated images");
    return cmd;
}

void print_paths(const lens::harness::ExperimentConfig& cfg, const char* what) {
    std::cout << what << " written under " << cfg.out.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Locality-sensitive attributional robustness toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    auto* train = add_command(app, "train", "train natural and/or PGD toy models", args);
    auto* attack = add_command(app, "attack", "run the configured attacks and write attacks.csv", args);
    auto* evaluate = add_command(app, "evaluate", "attack + metric sweep with aggregates", args);
    auto* sweep_w = add_command(app, "sweep-w", "evaluate and emit w-sweep plot data", args);
    auto* sweep_k = add_command(app, "sweep-k", "evaluate and emit k-sweep plot data", args);
    auto* report = add_command(app, "report", "render aggregate.csv as text tables", args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const auto cfg = args.load();
        if (*train) {
            for (const auto& t : lens::harness::cmd_train(cfg)) {
                const auto& last = t.log.empty() ? lens::EpochStats{} : t.log.back();
                std::cout << lens::harness::to_string(t.regime) << ": " << t.checkpoint.string()
                          << " (train accuracy " << last.accuracy << ")\n";
            }
        } else if (*attack) {
            lens::harness::cmd_attack(cfg);
            print_paths(cfg, "attack summaries");
        } else if (*evaluate) {
            lens::harness::cmd_evaluate(cfg);
            print_paths(cfg, "metrics and aggregates");
        } else if (*sweep_w) {
            lens::harness::cmd_sweep_w(cfg);
            print_paths(cfg, "w-sweep data");
        } else if (*sweep_k) {
            lens::harness::cmd_sweep_k(cfg);
            print_paths(cfg, "k-sweep data");
        } else if (*report) {
            std::cout << lens::harness::cmd_report(cfg.out);
        }
    } catch (const lens::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const lens::TrainingDivergenceError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const lens::UndefinedCorrelationError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const lens::Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
