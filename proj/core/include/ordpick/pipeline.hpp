#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ordpick/mlcore.hpp"
#include "ordpick/oracle.hpp"
#include "ordpick/polysys.hpp"

namespace ordpick {

// The nine runnable stages of the train/test workflow:
//   1a measure training runtimes        1b parse + best labels
//   1c feature generation               1d cross-validation + model fitting
//   2a parse test set                   2b test features
//   2c ML predictions                   2d Brown/sotd predictions
//   2e test runtimes + comparative report
enum class StageId { s1a, s1b, s1c, s1d, s2a, s2b, s2c, s2d, s2e };

std::string stage_name(StageId s);
std::optional<StageId> stage_from_name(std::string_view name);
std::set<StageId> all_stages();
// Comma-separated names, or "all" / "none".
std::set<StageId> parse_stage_list(std::string_view csv);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A required intermediate file is absent; `producing_stage` names the stage
// that writes it.
struct MissingDependency : std::runtime_error {
    MissingDependency(const std::string& file, const std::string& stage)
        : std::runtime_error("missing dependency file '" + file + "' (produced by stage " +
                             stage + ")"),
          producing_stage(stage) {}
    std::string producing_stage;
};

struct StageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    std::filesystem::path train_input;
    std::filesystem::path test_input;
    std::filesystem::path out_dir = "out";
    std::string stamp;  // empty: current D<MM>_<DD>_T<HH>_<MM>

    OracleConfig oracle;
    int cv_folds = 5;
    int cv_candidates = 20;
    CvObjective cv_objective = CvObjective::accuracy;
    std::vector<ModelFamily> families = {ModelFamily::dt, ModelFamily::knn, ModelFamily::mlp,
                                         ModelFamily::lsvm};
    std::vector<double> within_x = {0, 10, 20, 50};
    std::uint64_t master_seed = 0;

    // When generate_count > 0, a synthetic dataset is written to the output
    // directory (2/3 train, 1/3 test) and used as the input files. The
    // generator seed derives from master_seed, not from generator.seed.
    std::optional<GenConfig> generator;
    int generate_count = 0;

    bool per_problem_timings = false;
    int ordering_cap = kDefaultOrderingCap;
};

// `key = value` lines, '#' comments. Unknown keys are errors.
PipelineConfig parse_config_file(const std::filesystem::path& path);
// Applies one key=value pair (the CLI funnels its flags through this).
void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value);

// Executes the requested stages in dependency order. Throws ConfigError,
// MissingDependency or StageFailure.
void run(const PipelineConfig& cfg, const std::set<StageId>& stages);

std::vector<int> baseline_random(const std::vector<TimingRecord>& t, std::uint64_t seed);
// kind=true: virtual best (per-problem argmin); kind=false: virtual worst.
std::vector<int> baseline_virtual(const std::vector<TimingRecord>& t, bool best);

struct SolverResult {
    std::string name;
    double prediction_seconds = 0.0;
    std::vector<int> predictions;
};

struct ComparativeReport {
    std::vector<std::string> solvers;
    std::vector<double> prediction_seconds;
    std::vector<double> cad_seconds;
    std::vector<double> total_seconds;
    std::vector<double> within_x;               // the configured x values
    std::vector<std::vector<double>> within;    // within[x_index][solver]
};

ComparativeReport build_report(const std::vector<SolverResult>& solvers,
                               const std::vector<TimingRecord>& timings,
                               const std::vector<double>& within_x);
void write_report_text(std::ostream& out, const ComparativeReport& r);
void write_report_csv(std::ostream& out, const ComparativeReport& r);
ComparativeReport read_report_csv(std::istream& in, const std::string& path_for_errors);

// Shared file helpers (also used by the tests).
std::vector<PolySystem> read_problem_file(const std::filesystem::path& path);
void write_problem_file(const std::filesystem::path& path, const std::vector<PolySystem>& problems);
FeatureMatrix read_feature_file(const std::filesystem::path& path);
void write_feature_file(const std::filesystem::path& path, const FeatureMatrix& m);
std::vector<int> read_label_file(const std::filesystem::path& path);
void write_label_file(const std::filesystem::path& path, const std::vector<int>& labels);

}  // namespace ordpick
