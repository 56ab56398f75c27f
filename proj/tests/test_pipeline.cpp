#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include "ordpick/pipeline.hpp"
#include "ordpick/util.hpp"

using namespace ordpick;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::path("ordpick_test_tmp") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

PipelineConfig small_config(const fs::path& out_dir) {
    PipelineConfig cfg;
    cfg.out_dir = out_dir;
    cfg.stamp = "t";
    cfg.master_seed = 424242;
    cfg.generate_count = 30;
    cfg.generator = GenConfig{};
    cfg.cv_folds = 2;
    cfg.cv_candidates = 2;
    cfg.families = {ModelFamily::dt, ModelFamily::knn};
    cfg.within_x = {0, 20};
    return cfg;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(ORDPICK_CLI) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("stage names parse") {
    CHECK(parse_stage_list("all").size() == 9);
    CHECK(parse_stage_list("").size() == 9);
    CHECK(parse_stage_list("none").empty());
    auto some = parse_stage_list("1a, 2e");
    CHECK(some.size() == 2);
    CHECK(some.count(StageId::s1a) == 1);
    CHECK(some.count(StageId::s2e) == 1);
    CHECK_THROWS_AS(parse_stage_list("1a,9z"), ConfigError);
    for (StageId s : all_stages()) CHECK(stage_from_name(stage_name(s)) == s);
}

TEST_CASE("config files parse with overrides") {
    fs::path dir = fresh_dir("config");
    fs::path path = dir / "pipeline.cfg";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "seed = 7\n";
        out << "oracle = surrogate\n";
        out << "timeout = 120.5\n";
        out << "surrogate_unit = 0.002\n";
        out << "cv = time\n";
        out << "folds = 3\n";
        out << "candidates = 4\n";
        out << "models = DT,SVM\n";
        out << "within_x = 0,10,50\n";
        out << "generate = 60\n";
        out << "gen_n_vars = 3\n";
        out << "gen_deg_cap = 2  # inline comment\n";
        out << "out_dir = " << (dir / "out").string() << "\n";
        out << "stamp = fixed\n";
    }
    PipelineConfig cfg = parse_config_file(path);
    CHECK(cfg.master_seed == 7);
    CHECK(cfg.oracle.timeout_seconds == 120.5);
    CHECK(cfg.oracle.surrogate_unit == 0.002);
    CHECK(cfg.cv_objective == CvObjective::time);
    CHECK(cfg.cv_folds == 3);
    CHECK(cfg.cv_candidates == 4);
    REQUIRE(cfg.families.size() == 2);
    CHECK(cfg.families[0] == ModelFamily::dt);
    CHECK(cfg.families[1] == ModelFamily::lsvm);
    CHECK(cfg.within_x == std::vector<double>{0, 10, 50});
    CHECK(cfg.generate_count == 60);
    REQUIRE(cfg.generator.has_value());
    CHECK(cfg.generator->n_vars == 3);
    CHECK(cfg.generator->degree_cap == 2);
    CHECK(cfg.stamp == "fixed");

    // CLI-style overrides win.
    apply_config_entry(cfg, "cv", "accuracy");
    CHECK(cfg.cv_objective == CvObjective::accuracy);

    {
        std::ofstream out(path, std::ios::app);
        out << "no_such_key = 1\n";
    }
    CHECK_THROWS_AS(parse_config_file(path), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "folds", "two"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "oracle", "psychic"), ConfigError);
}

TEST_CASE("baselines") {
    std::vector<TimingRecord> t(3);
    t[0].costs = {2.0, 5.0};
    t[1].costs = {4.0, 4.0};
    t[2].costs = {9.0, 1.0};
    for (auto& r : t) r.timed_out.assign(r.costs.size(), 0);

    CHECK(baseline_virtual(t, true) == std::vector<int>{0, 0, 1});
    CHECK(baseline_virtual(t, false) == std::vector<int>{1, 0, 0});
    CHECK(metric_total_time(baseline_virtual(t, true), t, 0) <=
          metric_total_time(baseline_virtual(t, false), t, 0));

    CHECK(baseline_random(t, 5) == baseline_random(t, 5));

    std::vector<TimingRecord> singleton(4);
    for (auto& r : singleton) {
        r.costs = {1.0};
        r.timed_out = {0};
    }
    CHECK(baseline_random(singleton, 9) == std::vector<int>{0, 0, 0, 0});

    // Monte-Carlo: the mean random cost approaches the mean of per-problem
    // mean costs (within 5% over 200 seeds).
    double expected = 0;
    for (const TimingRecord& r : t) {
        double mean = 0;
        for (double c : r.costs) mean += c;
        expected += mean / static_cast<double>(r.costs.size());
    }
    double observed = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
        observed += metric_total_time(baseline_random(t, seed), t, 0);
    observed /= 200.0;
    CHECK(observed == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("report writer round-trips and keeps the table shape") {
    std::vector<TimingRecord> t(2);
    t[0].costs = {1.0, 3.0};
    t[1].costs = {2.0, 0.5};
    for (auto& r : t) r.timed_out.assign(2, 0);

    std::vector<SolverResult> solvers{
        {"DT", 0.25, {0, 1}},
        {"VB", 0.0, baseline_virtual(t, true)},
        {"VW", 0.0, baseline_virtual(t, false)},
    };
    ComparativeReport report = build_report(solvers, t, {0, 20});
    CHECK(report.cad_seconds[0] == 1.5);
    CHECK(report.total_seconds[0] == 1.75);
    CHECK(report.cad_seconds[1] == 1.5);
    CHECK(report.within[0][1] == 1.0);  // VB is always within 0%

    std::ostringstream csv;
    write_report_csv(csv, report);
    std::istringstream reread(csv.str());
    ComparativeReport back = read_report_csv(reread, "report.csv");
    CHECK(back.solvers == report.solvers);
    CHECK(back.within_x == report.within_x);
    CHECK(back.prediction_seconds == report.prediction_seconds);
    CHECK(back.cad_seconds == report.cad_seconds);
    CHECK(back.total_seconds == report.total_seconds);
    for (std::size_t xi = 0; xi < report.within.size(); ++xi)
        CHECK(back.within[xi] == report.within[xi]);

    std::ostringstream text;
    write_report_text(text, report);
    std::string table = text.str();
    CHECK(table.find("Prediction time (s)") != std::string::npos);
    CHECK(table.find("Total time (s)") != std::string::npos);
    CHECK(table.find("DT") != std::string::npos);
    CHECK(table.find("VW") != std::string::npos);

    std::vector<SolverResult> bad = solvers;
    bad[0].predictions.pop_back();
    CHECK_THROWS_AS(build_report(bad, t, {0}), StageFailure);
}

TEST_CASE("full pipeline produces schema-valid artifacts") {
    fs::path dir = fresh_dir("e2e");
    PipelineConfig cfg = small_config(dir);
    run(cfg, all_stages());

    for (const char* name :
         {"terms_train.txt", "terms_test.txt", "y_train.txt", "features_descriptions.txt",
          "features_descriptions_final.txt", "features_train_raw.txt", "features_train.txt",
          "features_test.txt", "hyperpar_t.txt", "par_t.txt", "y_DT_t_test.txt",
          "y_KNN_t_test.txt", "y_brown_test.txt", "y_sotd_test.txt", "timings_train.csv",
          "timings_test.csv", "comparative_results_t.txt", "comparative_results_t.csv",
          "prediction_times_ml_t.txt", "prediction_times_heuristics_t.txt"}) {
        CAPTURE(name);
        CHECK(fs::exists(dir / name));
    }

    auto train = read_problem_file(dir / "terms_train.txt");
    auto test = read_problem_file(dir / "terms_test.txt");
    CHECK(train.size() == 20);
    CHECK(test.size() == 10);

    auto y_train = read_label_file(dir / "y_train.txt");
    REQUIRE(y_train.size() == 20);
    for (int label : y_train) {
        CHECK(label >= 0);
        CHECK(label < 6);
    }

    FeatureMatrix features = read_feature_file(dir / "features_train.txt");
    CHECK(features.n_rows == 20);
    FeatureMatrix raw = read_feature_file(dir / "features_train_raw.txt");
    CHECK(raw.n_cols == 216);
    CHECK(features.n_cols < raw.n_cols);
    CHECK(read_feature_file(dir / "features_test.txt").n_cols == features.n_cols);

    std::ifstream csv(dir / "comparative_results_t.csv");
    ComparativeReport report = read_report_csv(csv, "comparative_results_t.csv");
    CHECK(report.solvers ==
          std::vector<std::string>{"DT", "KNN", "Brown", "sotd", "rand", "VB", "VW"});

    std::map<std::string, double> cad;
    for (std::size_t i = 0; i < report.solvers.size(); ++i)
        cad[report.solvers[i]] = report.cad_seconds[i];
    for (const auto& [solver, seconds] : cad) {
        CHECK(cad["VB"] <= seconds);
        CHECK(seconds <= cad["VW"]);
    }
    // Surrogate oracle: sotd's CAD component equals the virtual best's.
    CHECK(cad["sotd"] == cad["VB"]);

    // Report consistency: total = prediction + cad, recomputable from files.
    for (std::size_t i = 0; i < report.solvers.size(); ++i)
        CHECK(report.total_seconds[i] ==
              doctest::Approx(report.prediction_seconds[i] + report.cad_seconds[i])
                  .epsilon(1e-12));
    std::ifstream timings_in(dir / "timings_test.csv");
    auto timings = read_timings_csv(timings_in, "timings_test.csv");
    auto y_sotd = read_label_file(dir / "y_sotd_test.txt");
    CHECK(metric_total_time(y_sotd, timings, 0.0) == doctest::Approx(cad["sotd"]).epsilon(1e-12));

    // VB prediction time is exactly zero in the table.
    auto vb_at = std::find(report.solvers.begin(), report.solvers.end(), "VB");
    CHECK(report.prediction_seconds[static_cast<std::size_t>(
              vb_at - report.solvers.begin())] == 0.0);
}

TEST_CASE("per-problem timing files are written behind the flag") {
    fs::path dir = fresh_dir("perproblem");
    PipelineConfig cfg = small_config(dir);
    cfg.generate_count = 9;
    cfg.per_problem_timings = true;
    run(cfg, parse_stage_list("1a"));
    CHECK(fs::exists(dir / "timings_train.csv"));
    for (int i = 0; i < 6; ++i) {
        fs::path per = dir / ("timings_train_p" + std::to_string(i) + ".csv");
        CAPTURE(per.string());
        REQUIRE(fs::exists(per));
        std::ifstream in(per);
        std::string line;
        REQUIRE(std::getline(in, line));
        CHECK(line == "problem_id,ordering_index,cost_seconds,timed_out");
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            CHECK(line.rfind(std::to_string(i) + ",", 0) == 0);
            ++rows;
        }
        CHECK(rows == 6);  // one per ordering
    }
}

TEST_CASE("paper-scale generation splits 7500 into 5000/2500") {
    fs::path dir = fresh_dir("scale");
    PipelineConfig cfg = small_config(dir);
    cfg.generate_count = 7500;
    run(cfg, parse_stage_list("none"));
    CHECK(read_problem_file(dir / "terms_train.txt").size() == 5000);
    CHECK(read_problem_file(dir / "terms_test.txt").size() == 2500);
}

TEST_CASE("stages are idempotent and file-mediated") {
    fs::path dir = fresh_dir("idempotent");
    PipelineConfig cfg = small_config(dir);
    run(cfg, all_stages());

    std::map<std::string, std::string> before;
    for (const char* name : {"terms_train.txt", "y_train.txt", "features_descriptions.txt",
                             "features_descriptions_final.txt", "features_train_raw.txt",
                             "features_train.txt"})
        before[name] = slurp(dir / name);

    run(cfg, parse_stage_list("1b,1c"));
    for (const auto& [name, content] : before) {
        CAPTURE(name);
        CHECK(slurp(dir / name) == content);
    }
}

TEST_CASE("missing dependencies name the producing stage") {
    fs::path dir = fresh_dir("deps");
    PipelineConfig cfg = small_config(dir);
    try {
        run(cfg, parse_stage_list("2c"));
        FAIL("expected MissingDependency");
    } catch (const MissingDependency& e) {
        CHECK(e.producing_stage == "1d");
    }

    // Without the generator, a missing canonical terms file points at 1b.
    fs::path dir2 = fresh_dir("deps2");
    PipelineConfig manual;
    manual.out_dir = dir2;
    manual.stamp = "t";
    {
        std::ofstream out(dir2 / "input.txt");
        out << "[[((1,0),1),((0,1),2)]]\n";
    }
    manual.train_input = dir2 / "input.txt";
    manual.test_input = dir2 / "input.txt";
    try {
        run(manual, parse_stage_list("1c"));
        FAIL("expected MissingDependency");
    } catch (const MissingDependency& e) {
        CHECK(e.producing_stage == "1b");
    }
}

TEST_CASE("invalid configs are rejected up front") {
    PipelineConfig cfg = small_config(fresh_dir("badcfg"));
    cfg.cv_folds = 1;
    CHECK_THROWS_AS(run(cfg, all_stages()), ConfigError);

    cfg = small_config(fresh_dir("badcfg2"));
    cfg.oracle.kind = OracleKind::external;
    cfg.oracle.command_template.clear();
    CHECK_THROWS_AS(run(cfg, all_stages()), ConfigError);

    cfg = small_config(fresh_dir("badcfg3"));
    cfg.generate_count = 0;
    cfg.train_input = "no_such_file.txt";
    CHECK_THROWS_AS(run(cfg, parse_stage_list("1a")), ConfigError);
}

#ifdef ORDPICK_CLI

TEST_CASE("cli exit codes") {
    fs::path dir = fresh_dir("cli");
    fs::path cfg_path = dir / "run.cfg";
    {
        std::ofstream out(cfg_path);
        out << "seed = 1\ngenerate = 12\ngen_n_vars = 2\nfolds = 2\ncandidates = 1\n";
        out << "models = DT\nout_dir = " << (dir / "out").string() << "\nstamp = cli\n";
    }
    CHECK(run_cli("run --config " + cfg_path.string() + " --stages none") == 0);
    CHECK(run_cli("run --config " + cfg_path.string() + " --stages 1a,1b") == 0);
    CHECK(fs::exists(dir / "out" / "timings_train.csv"));

    // Unknown stage and unknown config key are config errors.
    CHECK(run_cli("run --config " + cfg_path.string() + " --stages 9q") == 2);
    {
        std::ofstream out(cfg_path, std::ios::app);
        out << "definitely_not_a_key = 1\n";
    }
    CHECK(run_cli("run --config " + cfg_path.string()) == 2);

    // Missing dependency: stage 2c without a trained model.
    fs::path dir2 = fresh_dir("cli2");
    fs::path cfg2 = dir2 / "run.cfg";
    {
        std::ofstream out(cfg2);
        out << "seed = 1\ngenerate = 12\ngen_n_vars = 2\nfolds = 2\ncandidates = 1\n";
        out << "models = DT\nout_dir = " << (dir2 / "out").string() << "\nstamp = cli\n";
    }
    CHECK(run_cli("run --config " + cfg2.string() + " --stages 2c") == 3);

    // Stage failure: malformed intermediate file.
    fs::path dir3 = fresh_dir("cli3");
    fs::create_directories(dir3 / "out");
    {
        std::ofstream out(dir3 / "out" / "timings_train.csv");
        out << "problem_id,ordering_index,cost_seconds,timed_out\nnot,a,number,row\n";
    }
    fs::path cfg3 = dir3 / "run.cfg";
    {
        std::ofstream out(cfg3);
        out << "seed = 1\ngenerate = 12\ngen_n_vars = 2\nfolds = 2\ncandidates = 1\n";
        out << "models = DT\nout_dir = " << (dir3 / "out").string() << "\nstamp = cli\n";
    }
    CHECK(run_cli("run --config " + cfg3.string() + " --stages 1b") == 4);

    CHECK(run_cli("run --set oracle=psychic") == 2);
    CHECK(run_cli("--help") == 0);
}

#endif  // ORDPICK_CLI
