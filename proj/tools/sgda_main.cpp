// sgda — signature-guided data augmentation toolkit for induction-motor
// current diagnostics: fault frequency tables, synthetic signals, spectrum
// preprocessing, healthy-only training, and majority-vote diagnosis.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sgda/cli.hpp"
#include "sgda/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

struct CommonFlags {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--override", flags.overrides,
                    "override a config leaf, e.g. model.max_epochs=10 (repeatable)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&flags](std::uint64_t v) { flags.seed = v; }, "override the top-level seed");
    cmd->add_option_function<std::string>(
        "--out", [&flags](const std::string& v) { flags.out_dir = v; },
        "override the output directory");
}

sgda::RunConfig load(const CommonFlags& flags) {
    return sgda::load_run_config(flags.config_path, flags.overrides, flags.seed, flags.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"signature-guided data augmentation for induction-motor diagnostics"};
    app.require_subcommand(1);

    CommonFlags freqs_flags, synth_flags, pre_flags, train_flags, diag_flags, eval_flags;
    std::vector<std::string> pre_signals, diag_signals;
    std::string eval_manifest;

    CLI::App* cmd_freqs = app.add_subcommand("freqs", "print the fault frequency table");
    add_common(cmd_freqs, freqs_flags);

    CLI::App* cmd_synth = app.add_subcommand("synth", "generate synthetic current signals");
    add_common(cmd_synth, synth_flags);

    CLI::App* cmd_pre = app.add_subcommand("preprocess", "segment signals into normalized spectra");
    add_common(cmd_pre, pre_flags);
    cmd_pre->add_option("signals", pre_signals, "signal CSV files (default: paths.input_dir)");

    CLI::App* cmd_train = app.add_subcommand("train", "train a classifier on healthy signals");
    add_common(cmd_train, train_flags);

    CLI::App* cmd_diag = app.add_subcommand("diagnose", "classify signals via majority voting");
    add_common(cmd_diag, diag_flags);
    cmd_diag->add_option("signals", diag_signals, "signal CSV files")->required();

    CLI::App* cmd_eval = app.add_subcommand("evaluate", "score a labeled manifest of signals");
    add_common(cmd_eval, eval_flags);
    cmd_eval->add_option("manifest", eval_manifest, "manifest.json with files and labels")
        ->required()
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (cmd_freqs->parsed()) {
            sgda::cli::run_freqs(load(freqs_flags), std::cout);
        } else if (cmd_synth->parsed()) {
            sgda::cli::run_synth(load(synth_flags), std::cout);
        } else if (cmd_pre->parsed()) {
            sgda::cli::run_preprocess(load(pre_flags), pre_signals, std::cout);
        } else if (cmd_train->parsed()) {
            sgda::cli::run_train(load(train_flags), std::cout);
        } else if (cmd_diag->parsed()) {
            sgda::cli::run_diagnose(load(diag_flags), diag_signals, std::cout);
        } else if (cmd_eval->parsed()) {
            sgda::cli::run_evaluate(load(eval_flags), eval_manifest, std::cout);
        }
    } catch (const sgda::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const sgda::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
