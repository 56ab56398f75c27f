#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "ordpick/pipeline.hpp"
#include "ordpick/util.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitMissingDependency = 3;
constexpr int kExitStageFailure = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ordpick - learn variable orderings for ordering-sensitive polynomial algorithms"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "Run pipeline stages");
    std::string config_path, stages_text = "all";
    std::string oracle_text, cv_text, models_text, out_dir, stamp, train_input, test_input;
    std::string timeout_text, seed_text, generate_text;
    std::vector<std::string> extra_settings;

    run_cmd->add_option("--config", config_path, "Config file (key = value lines)");
    run_cmd->add_option("--stages", stages_text,
                        "Comma-separated stages among 1a,1b,1c,1d,2a,2b,2c,2d,2e (or all/none)");
    run_cmd->add_option("--seed", seed_text, "Master seed");
    run_cmd->add_option("--oracle", oracle_text, "Cost oracle: surrogate|external");
    run_cmd->add_option("--cv", cv_text, "Cross-validation objective: accuracy|time");
    run_cmd->add_option("--models", models_text, "Model families, e.g. DT,KNN,MLP,SVM");
    run_cmd->add_option("--timeout", timeout_text, "Oracle timeout in seconds");
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_option("--stamp", stamp, "File-name stamp (defaults to D<MM>_<DD>_T<HH>_<MM>)");
    run_cmd->add_option("--generate", generate_text,
                        "Generate COUNT random problems (2/3 train, 1/3 test)");
    run_cmd->add_option("--train-input", train_input, "Training problems, terms format");
    run_cmd->add_option("--test-input", test_input, "Testing problems, terms format");
    run_cmd->add_option("--set", extra_settings, "Extra config entries as key=value")
        ->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        ordpick::PipelineConfig cfg;
        if (!config_path.empty()) cfg = ordpick::parse_config_file(config_path);
        auto apply = [&cfg](const std::string& key, const std::string& value) {
            ordpick::apply_config_entry(cfg, key, value);
        };
        if (!seed_text.empty()) apply("seed", seed_text);
        if (!oracle_text.empty()) apply("oracle", oracle_text);
        if (!cv_text.empty()) apply("cv", cv_text);
        if (!models_text.empty()) apply("models", models_text);
        if (!timeout_text.empty()) apply("timeout", timeout_text);
        if (!out_dir.empty()) apply("out_dir", out_dir);
        if (!stamp.empty()) apply("stamp", stamp);
        if (!generate_text.empty()) apply("generate", generate_text);
        if (!train_input.empty()) apply("train_input", train_input);
        if (!test_input.empty()) apply("test_input", test_input);
        for (const std::string& setting : extra_settings) {
            std::size_t eq = setting.find('=');
            if (eq == std::string::npos)
                throw ordpick::ConfigError("--set expects key=value, got '" + setting + "'");
            apply(ordpick::trim(setting.substr(0, eq)), ordpick::trim(setting.substr(eq + 1)));
        }

        ordpick::run(cfg, ordpick::parse_stage_list(stages_text));
        return kExitOk;
    } catch (const ordpick::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const ordpick::MissingDependency& e) {
        std::cerr << "dependency error: " << e.what() << '\n';
        return kExitMissingDependency;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStageFailure;
    }
}
