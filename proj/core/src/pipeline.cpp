#include "ordpick/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "ordpick/featgen.hpp"
#include "ordpick/projection.hpp"
#include "ordpick/util.hpp"

namespace ordpick {

namespace fs = std::filesystem;

std::string stage_name(StageId s) {
    switch (s) {
        case StageId::s1a: return "1a";
        case StageId::s1b: return "1b";
        case StageId::s1c: return "1c";
        case StageId::s1d: return "1d";
        case StageId::s2a: return "2a";
        case StageId::s2b: return "2b";
        case StageId::s2c: return "2c";
        case StageId::s2d: return "2d";
        case StageId::s2e: return "2e";
    }
    return "";
}

std::optional<StageId> stage_from_name(std::string_view name) {
    for (StageId s : all_stages())
        if (stage_name(s) == name) return s;
    return std::nullopt;
}

std::set<StageId> all_stages() {
    return {StageId::s1a, StageId::s1b, StageId::s1c, StageId::s1d, StageId::s2a,
            StageId::s2b, StageId::s2c, StageId::s2d, StageId::s2e};
}

std::set<StageId> parse_stage_list(std::string_view csv) {
    std::string text = trim(csv);
    if (text.empty() || text == "all") return all_stages();
    if (text == "none") return {};
    std::set<StageId> stages;
    for (const std::string& piece : split(text, ',')) {
        auto s = stage_from_name(trim(piece));
        if (!s) throw ConfigError("unknown stage '" + trim(piece) + "'");
        stages.insert(*s);
    }
    return stages;
}

// ---------------------------------------------------------------------------
// file helpers

std::vector<PolySystem> read_problem_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw StageFailure("cannot open problem file '" + path.string() + "'");
    std::vector<PolySystem> problems;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            problems.push_back(parse_problem(line));
        } catch (const std::exception& e) {
            throw StageFailure(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (problems.empty())
        throw StageFailure("problem file '" + path.string() + "' contains no problems");
    for (const PolySystem& s : problems)
        if (s.n_vars != problems.front().n_vars)
            throw StageFailure("problem file '" + path.string() +
                               "' mixes different variable counts");
    return problems;
}

void write_problem_file(const fs::path& path, const std::vector<PolySystem>& problems) {
    std::ofstream out(path);
    if (!out) throw StageFailure("cannot write '" + path.string() + "'");
    for (const PolySystem& s : problems) out << serialize_problem(s) << '\n';
}

FeatureMatrix read_feature_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw StageFailure("cannot open feature file '" + path.string() + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::istringstream stream(line);
        std::string token;
        while (stream >> token) {
            try {
                row.push_back(text_to_double(token));
            } catch (const std::exception& e) {
                throw StageFailure(path.string() + ":" + std::to_string(line_no) + ": " +
                                   e.what());
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw StageFailure(path.string() + ":" + std::to_string(line_no) +
                               ": ragged feature row");
        rows.push_back(std::move(row));
    }
    FeatureMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < m.n_cols; ++c) m.at(r, c) = rows[r][c];
    return m;
}

void write_feature_file(const fs::path& path, const FeatureMatrix& m) {
    std::ofstream out(path);
    if (!out) throw StageFailure("cannot write '" + path.string() + "'");
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t c = 0; c < m.n_cols; ++c) {
            if (c) out << ' ';
            out << double_to_text(m.at(r, c));
        }
        out << '\n';
    }
}

std::vector<int> read_label_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw StageFailure("cannot open label file '" + path.string() + "'");
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string text = trim(line);
        if (text.empty()) continue;
        try {
            labels.push_back(std::stoi(text));
        } catch (const std::exception&) {
            throw StageFailure(path.string() + ":" + std::to_string(line_no) +
                               ": bad label '" + text + "'");
        }
    }
    return labels;
}

void write_label_file(const fs::path& path, const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw StageFailure("cannot write '" + path.string() + "'");
    for (int label : labels) out << label << '\n';
}

// ---------------------------------------------------------------------------
// config

namespace {

std::vector<ModelFamily> parse_family_list(const std::string& text) {
    std::vector<ModelFamily> families;
    for (const std::string& piece : split(text, ',')) {
        auto f = family_from_name(trim(piece));
        if (!f) throw ConfigError("unknown model family '" + trim(piece) + "'");
        if (std::find(families.begin(), families.end(), *f) == families.end())
            families.push_back(*f);
    }
    if (families.empty()) throw ConfigError("empty model family list");
    return families;
}

GenConfig& ensure_generator(PipelineConfig& cfg) {
    if (!cfg.generator) cfg.generator = GenConfig{};
    return *cfg.generator;
}

long to_long(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer for '" + key + "': '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        return text_to_double(value);
    } catch (const std::exception&) {
        throw ConfigError("bad number for '" + key + "': '" + value + "'");
    }
}

}  // namespace

void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "train_input") {
        cfg.train_input = value;
    } else if (key == "test_input") {
        cfg.test_input = value;
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else if (key == "stamp") {
        cfg.stamp = value;
    } else if (key == "seed") {
        cfg.master_seed = static_cast<std::uint64_t>(to_long(key, value));
    } else if (key == "oracle") {
        if (value == "surrogate")
            cfg.oracle.kind = OracleKind::surrogate;
        else if (value == "external")
            cfg.oracle.kind = OracleKind::external;
        else
            throw ConfigError("oracle must be 'surrogate' or 'external', got '" + value + "'");
    } else if (key == "timeout") {
        cfg.oracle.timeout_seconds = to_double(key, value);
        if (cfg.oracle.timeout_seconds <= 0) throw ConfigError("timeout must be positive");
    } else if (key == "command_template") {
        cfg.oracle.command_template = value;
    } else if (key == "surrogate_unit") {
        cfg.oracle.surrogate_unit = to_double(key, value);
        if (cfg.oracle.surrogate_unit <= 0) throw ConfigError("surrogate_unit must be positive");
    } else if (key == "max_polys") {
        cfg.oracle.caps.max_polys = static_cast<std::size_t>(to_long(key, value));
    } else if (key == "max_tdeg") {
        cfg.oracle.caps.max_tdeg = static_cast<int>(to_long(key, value));
    } else if (key == "cv") {
        if (value == "accuracy")
            cfg.cv_objective = CvObjective::accuracy;
        else if (value == "time")
            cfg.cv_objective = CvObjective::time;
        else
            throw ConfigError("cv must be 'accuracy' or 'time', got '" + value + "'");
    } else if (key == "folds") {
        cfg.cv_folds = static_cast<int>(to_long(key, value));
    } else if (key == "candidates") {
        cfg.cv_candidates = static_cast<int>(to_long(key, value));
    } else if (key == "models") {
        cfg.families = parse_family_list(value);
    } else if (key == "within_x") {
        cfg.within_x.clear();
        for (const std::string& piece : split(value, ','))
            cfg.within_x.push_back(to_double(key, trim(piece)));
    } else if (key == "generate") {
        cfg.generate_count = static_cast<int>(to_long(key, value));
        ensure_generator(cfg);
    } else if (key == "ordering_cap") {
        cfg.ordering_cap = static_cast<int>(to_long(key, value));
    } else if (key == "per_problem_timings") {
        cfg.per_problem_timings = to_long(key, value) != 0;
    } else if (key == "gen_n_vars") {
        ensure_generator(cfg).n_vars = static_cast<int>(to_long(key, value));
    } else if (key == "gen_deg_mean") {
        ensure_generator(cfg).degree_mean = to_double(key, value);
    } else if (key == "gen_deg_std") {
        ensure_generator(cfg).degree_stddev = to_double(key, value);
    } else if (key == "gen_deg_cap") {
        ensure_generator(cfg).degree_cap = static_cast<int>(to_long(key, value));
    } else if (key == "gen_coeff_mean") {
        ensure_generator(cfg).coeff_mean = to_double(key, value);
    } else if (key == "gen_coeff_std") {
        ensure_generator(cfg).coeff_stddev = to_double(key, value);
    } else if (key == "gen_coeff_cap") {
        ensure_generator(cfg).coeff_cap = static_cast<int>(to_long(key, value));
    } else if (key == "gen_terms_mean") {
        ensure_generator(cfg).terms_mean = to_double(key, value);
    } else if (key == "gen_terms_std") {
        ensure_generator(cfg).terms_stddev = to_double(key, value);
    } else if (key == "gen_terms_cap") {
        ensure_generator(cfg).terms_cap = static_cast<int>(to_long(key, value));
    } else if (key == "gen_polys_mean") {
        ensure_generator(cfg).polys_mean = to_double(key, value);
    } else if (key == "gen_polys_std") {
        ensure_generator(cfg).polys_stddev = to_double(key, value);
    } else if (key == "gen_polys_cap") {
        ensure_generator(cfg).polys_cap = static_cast<int>(to_long(key, value));
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

PipelineConfig parse_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    PipelineConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string text = trim(line.substr(0, line.find('#')));
        if (text.empty()) continue;
        std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        try {
            apply_config_entry(cfg, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// baselines and report

std::vector<int> baseline_random(const std::vector<TimingRecord>& t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> out;
    out.reserve(t.size());
    for (const TimingRecord& record : t) {
        auto n = static_cast<std::uint64_t>(record.costs.size());
        out.push_back(static_cast<int>(rng() % n));
    }
    return out;
}

std::vector<int> baseline_virtual(const std::vector<TimingRecord>& t, bool best) {
    std::vector<int> out;
    out.reserve(t.size());
    for (const TimingRecord& record : t) {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < record.costs.size(); ++i) {
            if (best ? record.costs[i] < record.costs[pick]
                     : record.costs[i] > record.costs[pick])
                pick = i;
        }
        out.push_back(static_cast<int>(pick));
    }
    return out;
}

ComparativeReport build_report(const std::vector<SolverResult>& solvers,
                               const std::vector<TimingRecord>& timings,
                               const std::vector<double>& within_x) {
    ComparativeReport r;
    r.within_x = within_x;
    r.within.resize(within_x.size());
    for (const SolverResult& s : solvers) {
        if (s.predictions.size() != timings.size())
            throw StageFailure("solver '" + s.name + "' prediction count mismatch");
        r.solvers.push_back(s.name);
        double cad = metric_total_time(s.predictions, timings, 0.0);
        r.prediction_seconds.push_back(s.prediction_seconds);
        r.cad_seconds.push_back(cad);
        r.total_seconds.push_back(s.prediction_seconds + cad);
        for (std::size_t xi = 0; xi < within_x.size(); ++xi)
            r.within[xi].push_back(metric_accuracy_within(s.predictions, timings, within_x[xi]));
    }
    return r;
}

void write_report_text(std::ostream& out, const ComparativeReport& r) {
    auto cell = [](double v) {
        char buffer[64];
        std::snprintf(buffer, sizeof buffer, "%.6f", v);
        return std::string(buffer);
    };
    const int name_width = 20;
    std::size_t column = 12;
    for (const std::string& s : r.solvers) column = std::max(column, s.size() + 2);

    auto pad = [](const std::string& text, std::size_t width) {
        return std::string(width > text.size() ? width - text.size() : 1, ' ') + text;
    };
    out << std::string(name_width, ' ');
    for (const std::string& s : r.solvers) out << pad(s, column);
    out << '\n';
    out << "Prediction time (s) ";
    for (std::size_t i = 0; i < r.solvers.size(); ++i)
        out << pad(r.prediction_seconds[i] == 0.0 ? "0" : cell(r.prediction_seconds[i]),
                   column);
    out << '\n';
    out << "Total time (s)      ";
    for (std::size_t i = 0; i < r.solvers.size(); ++i) out << pad(cell(r.total_seconds[i]), column);
    out << '\n';
    out << '\n';
    out << "Accuracy within x% of the minimum runtime\n";
    for (std::size_t xi = 0; xi < r.within_x.size(); ++xi) {
        std::ostringstream label;
        label << "x=" << double_to_text(r.within_x[xi]);
        out << pad(label.str(), name_width);
        for (double v : r.within[xi]) out << pad(cell(v), column);
        out << '\n';
    }
}

void write_report_csv(std::ostream& out, const ComparativeReport& r) {
    out << "# columns prediction_seconds and total_seconds are wall-clock measurements and "
           "not reproducible run to run\n";
    out << "solver,prediction_seconds,cad_seconds,total_seconds";
    for (double x : r.within_x) out << ",within_" << double_to_text(x);
    out << '\n';
    for (std::size_t i = 0; i < r.solvers.size(); ++i) {
        out << r.solvers[i] << ',' << double_to_text(r.prediction_seconds[i]) << ','
            << double_to_text(r.cad_seconds[i]) << ',' << double_to_text(r.total_seconds[i]);
        for (std::size_t xi = 0; xi < r.within_x.size(); ++xi)
            out << ',' << double_to_text(r.within[xi][i]);
        out << '\n';
    }
}

ComparativeReport read_report_csv(std::istream& in, const std::string& where) {
    ComparativeReport r;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line, ',');
        if (!header_seen) {
            if (fields.size() < 4 || fields[0] != "solver")
                throw std::runtime_error(where + ": bad report header");
            for (std::size_t i = 4; i < fields.size(); ++i) {
                if (fields[i].rfind("within_", 0) != 0)
                    throw std::runtime_error(where + ": bad within column '" + fields[i] + "'");
                r.within_x.push_back(text_to_double(fields[i].substr(7)));
            }
            r.within.resize(r.within_x.size());
            header_seen = true;
            continue;
        }
        if (fields.size() != 4 + r.within_x.size())
            throw std::runtime_error(where + ":" + std::to_string(line_no) + ": bad field count");
        r.solvers.push_back(fields[0]);
        r.prediction_seconds.push_back(text_to_double(fields[1]));
        r.cad_seconds.push_back(text_to_double(fields[2]));
        r.total_seconds.push_back(text_to_double(fields[3]));
        for (std::size_t xi = 0; xi < r.within_x.size(); ++xi)
            r.within[xi].push_back(text_to_double(fields[4 + xi]));
    }
    if (!header_seen) throw std::runtime_error(where + ": empty report");
    return r;
}

// ---------------------------------------------------------------------------
// stage execution

namespace {

struct StageContext {
    const PipelineConfig& cfg;
    fs::path out;
    std::string stamp;

    fs::path artifact(const std::string& name) const { return out / name; }

    void require(const fs::path& file, const std::string& producing_stage) const {
        if (!fs::exists(file)) throw MissingDependency(file.string(), producing_stage);
    }

    fs::path par_file() const { return artifact("par_" + stamp + ".txt"); }
    fs::path hyperpar_file() const { return artifact("hyperpar_" + stamp + ".txt"); }
    fs::path y_ml_file(ModelFamily f) const {
        return artifact("y_" + family_name(f) + "_" + stamp + "_test.txt");
    }
    fs::path ml_times_file() const { return artifact("prediction_times_ml_" + stamp + ".txt"); }
    fs::path heuristic_times_file() const {
        return artifact("prediction_times_heuristics_" + stamp + ".txt");
    }
    fs::path report_file(const char* ext) const {
        return artifact("comparative_results_" + stamp + ext);
    }
};

std::string default_stamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "D%02d_%02d_T%02d_%02d", tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min);
    return buffer;
}

std::vector<TimingRecord> measure_dataset(const StageContext& ctx, const fs::path& input,
                                          const std::string& csv_name) {
    auto problems = read_problem_file(input);
    std::vector<TimingRecord> records;
    records.reserve(problems.size());
    std::size_t all_timeout = 0;
    for (std::size_t i = 0; i < problems.size(); ++i) {
        records.push_back(measure_all_orderings(problems[i], static_cast<int>(i), ctx.cfg.oracle,
                                                ctx.cfg.ordering_cap));
        const TimingRecord& r = records.back();
        if (std::all_of(r.timed_out.begin(), r.timed_out.end(), [](auto f) { return f != 0; }))
            ++all_timeout;
    }
    if (all_timeout > 0)
        std::cerr << "[ordpick] warning: " << all_timeout << " problem(s) in " << csv_name
                  << " timed out under every ordering\n";
    std::ofstream out(ctx.artifact(csv_name));
    if (!out) throw StageFailure("cannot write '" + ctx.artifact(csv_name).string() + "'");
    write_timings_csv(out, records);
    if (ctx.cfg.per_problem_timings) {
        for (const TimingRecord& r : records) {
            std::string name = csv_name.substr(0, csv_name.find('.')) + "_p" +
                               std::to_string(r.problem_id) + ".csv";
            std::ofstream file(ctx.artifact(name));
            write_timings_csv(file, {r});
        }
    }
    return records;
}

std::vector<TimingRecord> load_timings(const StageContext& ctx, const std::string& csv_name,
                                       const std::string& producing_stage) {
    fs::path path = ctx.artifact(csv_name);
    ctx.require(path, producing_stage);
    std::ifstream in(path);
    return read_timings_csv(in, path.string());
}

void stage_1a(const StageContext& ctx) {
    if (!fs::exists(ctx.cfg.train_input))
        throw ConfigError("train input '" + ctx.cfg.train_input.string() + "' does not exist");
    measure_dataset(ctx, ctx.cfg.train_input, "timings_train.csv");
}

void stage_1b(const StageContext& ctx) {
    if (!fs::exists(ctx.cfg.train_input))
        throw ConfigError("train input '" + ctx.cfg.train_input.string() + "' does not exist");
    auto problems = read_problem_file(ctx.cfg.train_input);
    write_problem_file(ctx.artifact("terms_train.txt"), problems);
    auto timings = load_timings(ctx, "timings_train.csv", "1a");
    if (timings.size() != problems.size())
        throw StageFailure("timings_train.csv covers " + std::to_string(timings.size()) +
                           " problems, expected " + std::to_string(problems.size()));
    std::vector<int> labels;
    labels.reserve(timings.size());
    for (const TimingRecord& r : timings) labels.push_back(label_best(r));
    write_label_file(ctx.artifact("y_train.txt"), labels);
}

void stage_1c(const StageContext& ctx) {
    ctx.require(ctx.artifact("terms_train.txt"), "1b");
    auto problems = read_problem_file(ctx.artifact("terms_train.txt"));
    int n_vars = problems.front().n_vars;

    DescriptorSet raw = generate_raw_descriptors(n_vars);
    {
        std::ofstream out(ctx.artifact("features_descriptions.txt"));
        if (!out) throw StageFailure("cannot write features_descriptions.txt");
        for (const FeatureDescriptor& d : raw) out << serialize_descriptor(d) << '\n';
    }
    FeatureMatrix raw_matrix = evaluate_matrix(raw, problems);
    write_feature_file(ctx.artifact("features_train_raw.txt"), raw_matrix);

    DescriptorSet final_set = simplify_descriptors(raw, raw_matrix);
    {
        std::ofstream out(ctx.artifact("features_descriptions_final.txt"));
        if (!out) throw StageFailure("cannot write features_descriptions_final.txt");
        for (const FeatureDescriptor& d : final_set) out << serialize_descriptor(d) << '\n';
    }
    // Re-evaluated from the final descriptions on purpose: users may edit
    // features_descriptions_final.txt and rerun from this stage.
    write_feature_file(ctx.artifact("features_train.txt"), evaluate_matrix(final_set, problems));
}

DescriptorSet load_final_descriptors(const StageContext& ctx, int n_vars) {
    fs::path path = ctx.artifact("features_descriptions_final.txt");
    ctx.require(path, "1c");
    std::ifstream in(path);
    DescriptorSet ds;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        try {
            ds.push_back(parse_descriptor(text, n_vars));
        } catch (const std::exception& e) {
            throw StageFailure(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (ds.empty()) throw StageFailure(path.string() + ": no descriptors");
    return ds;
}

void stage_1d(const StageContext& ctx) {
    ctx.require(ctx.artifact("features_train.txt"), "1c");
    ctx.require(ctx.artifact("y_train.txt"), "1b");
    TrainingSet data;
    data.x = read_feature_file(ctx.artifact("features_train.txt"));
    data.y = read_label_file(ctx.artifact("y_train.txt"));
    data.timings = load_timings(ctx, "timings_train.csv", "1a");
    if (data.x.n_rows != data.y.size() || data.x.n_rows != data.timings.size())
        throw StageFailure("training artifacts disagree on problem count");

    CVConfig cv;
    cv.folds = ctx.cfg.cv_folds;
    cv.n_candidates = ctx.cfg.cv_candidates;
    cv.objective = ctx.cfg.cv_objective;
    cv.seed = derive_seed(ctx.cfg.master_seed, "cv");

    int n_labels = static_cast<int>(data.timings.front().costs.size());
    std::ofstream hyper(ctx.hyperpar_file());
    std::ofstream par(ctx.par_file());
    if (!hyper || !par) throw StageFailure("cannot write hyperpar/par files");
    for (ModelFamily family : ctx.cfg.families) {
        CvChoice choice = cv_search(family, data, cv);
        hyper << family_name(family) << ' ' << objective_name(cv.objective) << ' ' << cv.folds
              << ' ' << cv.n_candidates << ' ' << cv.seed << " -> chosen: "
              << spec_params_to_string(choice.spec)
              << " cv_score=" << double_to_text(choice.cv_score) << '\n';
        TrainedModel model =
            fit_model(choice.spec, data.x, data.y, n_labels,
                      derive_seed(ctx.cfg.master_seed, "final-train-" + family_name(family)));
        write_model(par, model);
    }
}

void stage_2a(const StageContext& ctx) {
    if (!fs::exists(ctx.cfg.test_input))
        throw ConfigError("test input '" + ctx.cfg.test_input.string() + "' does not exist");
    write_problem_file(ctx.artifact("terms_test.txt"), read_problem_file(ctx.cfg.test_input));
}

void stage_2b(const StageContext& ctx) {
    ctx.require(ctx.artifact("terms_test.txt"), "2a");
    auto problems = read_problem_file(ctx.artifact("terms_test.txt"));
    DescriptorSet ds = load_final_descriptors(ctx, problems.front().n_vars);
    write_feature_file(ctx.artifact("features_test.txt"), evaluate_matrix(ds, problems));
}

void stage_2c(const StageContext& ctx) {
    ctx.require(ctx.par_file(), "1d");
    ctx.require(ctx.artifact("features_test.txt"), "2b");
    FeatureMatrix x = read_feature_file(ctx.artifact("features_test.txt"));

    std::ifstream par(ctx.par_file());
    std::ofstream times(ctx.ml_times_file());
    if (!times) throw StageFailure("cannot write ML prediction times");
    for (ModelFamily family : ctx.cfg.families) {
        TrainedModel model = read_model(par, ctx.par_file().string());
        if (model.spec.family != family)
            throw StageFailure("par file order does not match configured model list");
        auto start = std::chrono::steady_clock::now();
        std::vector<int> pred = predict(model, x);
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_label_file(ctx.y_ml_file(family), pred);
        times << family_name(family) << ' ' << double_to_text(seconds) << '\n';
    }
}

void stage_2d(const StageContext& ctx) {
    ctx.require(ctx.artifact("terms_test.txt"), "2a");
    auto problems = read_problem_file(ctx.artifact("terms_test.txt"));

    std::vector<int> brown, sotd;
    double brown_seconds = 0, sotd_seconds = 0;
    std::size_t blowups = 0;
    for (const PolySystem& s : problems) {
        HeuristicChoice b = brown_choose(s);
        brown.push_back(static_cast<int>(b.ordering.index));
        brown_seconds += b.prediction_seconds;
        HeuristicChoice c = sotd_choose(s, ctx.cfg.oracle.caps, ctx.cfg.ordering_cap);
        sotd.push_back(static_cast<int>(c.ordering.index));
        sotd_seconds += c.prediction_seconds;
        if (c.all_blowup) ++blowups;
    }
    if (blowups > 0)
        std::cerr << "[ordpick] warning: sotd hit projection caps on every ordering for "
                  << blowups << " problem(s)\n";
    write_label_file(ctx.artifact("y_brown_test.txt"), brown);
    write_label_file(ctx.artifact("y_sotd_test.txt"), sotd);
    std::ofstream times(ctx.heuristic_times_file());
    if (!times) throw StageFailure("cannot write heuristic prediction times");
    times << "Brown " << double_to_text(brown_seconds) << '\n';
    times << "sotd " << double_to_text(sotd_seconds) << '\n';
}

std::vector<std::pair<std::string, double>> read_times_file(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::pair<std::string, double>> out;
    std::string name, value;
    while (in >> name >> value) out.emplace_back(name, text_to_double(value));
    return out;
}

void stage_2e(const StageContext& ctx) {
    ctx.require(ctx.artifact("terms_test.txt"), "2a");
    auto timings = measure_dataset(ctx, ctx.artifact("terms_test.txt"), "timings_test.csv");
    std::size_t n = timings.size();

    std::vector<SolverResult> solvers;
    ctx.require(ctx.ml_times_file(), "2c");
    auto ml_times = read_times_file(ctx.ml_times_file());
    for (ModelFamily family : ctx.cfg.families) {
        SolverResult s;
        s.name = family_name(family);
        ctx.require(ctx.y_ml_file(family), "2c");
        s.predictions = read_label_file(ctx.y_ml_file(family));
        for (const auto& [name, seconds] : ml_times)
            if (name == s.name) s.prediction_seconds = seconds;
        solvers.push_back(std::move(s));
    }
    ctx.require(ctx.artifact("y_brown_test.txt"), "2d");
    ctx.require(ctx.artifact("y_sotd_test.txt"), "2d");
    ctx.require(ctx.heuristic_times_file(), "2d");
    auto heuristic_times = read_times_file(ctx.heuristic_times_file());
    for (const char* name : {"Brown", "sotd"}) {
        SolverResult s;
        s.name = name;
        s.predictions = read_label_file(
            ctx.artifact(std::string("y_") + (s.name == "Brown" ? "brown" : "sotd") +
                         "_test.txt"));
        for (const auto& [n2, seconds] : heuristic_times)
            if (n2 == s.name) s.prediction_seconds = seconds;
        solvers.push_back(std::move(s));
    }
    solvers.push_back(SolverResult{
        "rand", 0.0, baseline_random(timings, derive_seed(ctx.cfg.master_seed, "random-baseline"))});
    solvers.push_back(SolverResult{"VB", 0.0, baseline_virtual(timings, true)});
    solvers.push_back(SolverResult{"VW", 0.0, baseline_virtual(timings, false)});

    for (const SolverResult& s : solvers) {
        if (s.predictions.size() != n)
            throw StageFailure("solver '" + s.name + "' has " +
                               std::to_string(s.predictions.size()) + " predictions for " +
                               std::to_string(n) + " problems");
        for (int p : s.predictions)
            if (p < 0 || static_cast<std::size_t>(p) >= timings.front().costs.size())
                throw StageFailure("solver '" + s.name + "' prediction out of range");
    }

    ComparativeReport report = build_report(solvers, timings, ctx.cfg.within_x);
    std::ofstream text(ctx.report_file(".txt"));
    std::ofstream csv(ctx.report_file(".csv"));
    if (!text || !csv) throw StageFailure("cannot write comparative report");
    write_report_text(text, report);
    write_report_csv(csv, report);
}

}  // namespace

void run(const PipelineConfig& cfg, const std::set<StageId>& stages) {
    if (cfg.cv_folds < 2) throw ConfigError("folds must be >= 2");
    if (cfg.cv_candidates < 1) throw ConfigError("candidates must be >= 1");
    if (cfg.ordering_cap < 1) throw ConfigError("ordering_cap must be >= 1");
    if (cfg.generate_count < 0) throw ConfigError("generate count must be >= 0");
    if (cfg.oracle.kind == OracleKind::external && cfg.oracle.command_template.empty())
        throw ConfigError("external oracle requires command_template");

    StageContext ctx{cfg, cfg.out_dir, cfg.stamp.empty() ? default_stamp() : cfg.stamp};
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + ctx.out.string() + "'");

    PipelineConfig effective = cfg;
    if (cfg.generate_count > 0) {
        GenConfig gen = cfg.generator.value_or(GenConfig{});
        gen.seed = derive_seed(cfg.master_seed, "generation");
        auto problems = generate_random_dataset(gen, cfg.generate_count);
        auto train_count = static_cast<std::size_t>(std::llround(cfg.generate_count * 2.0 / 3.0));
        std::vector<PolySystem> train(problems.begin(),
                                      problems.begin() + static_cast<std::ptrdiff_t>(train_count));
        std::vector<PolySystem> test(problems.begin() + static_cast<std::ptrdiff_t>(train_count),
                                     problems.end());
        if (train.empty() || test.empty())
            throw ConfigError("generate count too small to split into train and test");
        write_problem_file(ctx.artifact("terms_train.txt"), train);
        write_problem_file(ctx.artifact("terms_test.txt"), test);
        effective.train_input = ctx.artifact("terms_train.txt");
        effective.test_input = ctx.artifact("terms_test.txt");
    }
    StageContext effective_ctx{effective, ctx.out, ctx.stamp};

    const StageId order[] = {StageId::s1a, StageId::s1b, StageId::s1c, StageId::s1d,
                             StageId::s2a, StageId::s2b, StageId::s2c, StageId::s2d,
                             StageId::s2e};
    for (StageId stage : order) {
        if (!stages.count(stage)) continue;
        switch (stage) {
            case StageId::s1a: stage_1a(effective_ctx); break;
            case StageId::s1b: stage_1b(effective_ctx); break;
            case StageId::s1c: stage_1c(effective_ctx); break;
            case StageId::s1d: stage_1d(effective_ctx); break;
            case StageId::s2a: stage_2a(effective_ctx); break;
            case StageId::s2b: stage_2b(effective_ctx); break;
            case StageId::s2c: stage_2c(effective_ctx); break;
            case StageId::s2d: stage_2d(effective_ctx); break;
            case StageId::s2e: stage_2e(effective_ctx); break;
        }
    }
}

}  // namespace ordpick
