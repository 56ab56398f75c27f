#include "ordpick/oracle.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace ordpick {

std::optional<double> surrogate_cost(const PolySystem& p, const VariableOrdering& o,
                                     const OracleConfig& cfg) {
    auto score = sotd_score(p, o, cfg.caps);
    if (!score) return std::nullopt;
    return cfg.surrogate_unit * static_cast<double>(*score);
}

namespace {

std::string ordering_to_arg(const VariableOrdering& o) {
    std::string out;
    for (std::size_t i = 0; i < o.perm.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(o.perm[i]);
    }
    return out;
}

std::string substitute_all(std::string token, const std::string& key, const std::string& value) {
    std::size_t at;
    while ((at = token.find(key)) != std::string::npos) token.replace(at, key.size(), value);
    return token;
}

std::vector<std::string> build_argv(const std::string& command_template, const std::string& input,
                                    const std::string& ordering, const std::string& timeout) {
    std::vector<std::string> argv;
    std::istringstream stream(command_template);
    std::string token;
    while (stream >> token) {
        token = substitute_all(std::move(token), "{input}", input);
        token = substitute_all(std::move(token), "{ordering}", ordering);
        token = substitute_all(std::move(token), "{timeout}", timeout);
        argv.push_back(std::move(token));
    }
    return argv;
}

struct TempProblemFile {
    std::filesystem::path path;

    explicit TempProblemFile(const PolySystem& p) {
        auto dir = std::filesystem::temp_directory_path();
        path = dir / ("ordpick_problem_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter()++) + ".txt");
        std::ofstream out(path);
        out << serialize_problem(p) << '\n';
    }

    ~TempProblemFile() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }

    static std::uint64_t& counter() {
        static std::uint64_t n = 0;
        return n;
    }
};

}  // namespace

std::optional<double> external_run(const OracleConfig& cfg, const PolySystem& p,
                                   const VariableOrdering& o) {
    if (cfg.command_template.find("{input}") == std::string::npos ||
        cfg.command_template.find("{ordering}") == std::string::npos ||
        cfg.command_template.find("{timeout}") == std::string::npos)
        throw std::invalid_argument(
            "external oracle command template must contain {input}, {ordering} and {timeout}");

    TempProblemFile problem_file(p);
    std::ostringstream timeout_text;
    timeout_text << cfg.timeout_seconds;
    auto argv_strings = build_argv(cfg.command_template, problem_file.path.string(),
                                   ordering_to_arg(o), timeout_text.str());
    if (argv_strings.empty()) throw std::invalid_argument("external oracle command is empty");

    std::vector<char*> argv;
    argv.reserve(argv_strings.size() + 1);
    for (auto& s : argv_strings) argv.push_back(s.data());
    argv.push_back(nullptr);

    auto start = std::chrono::steady_clock::now();
    pid_t pid = ::fork();
    if (pid < 0) {
        std::cerr << "[ordpick] external oracle: fork failed: " << std::strerror(errno) << '\n';
        return std::nullopt;
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::execvp(argv[0], argv.data());
        std::fprintf(stderr, "[ordpick] external oracle: exec '%s' failed: %s\n", argv[0],
                     std::strerror(errno));
        ::_exit(127);
    }
    ::setpgid(pid, pid);

    const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double>(cfg.timeout_seconds));
    bool killed = false;
    int status = 0;
    while (true) {
        pid_t done = ::waitpid(pid, &status, WNOHANG);
        if (done == pid) break;
        if (done < 0) {
            std::cerr << "[ordpick] external oracle: waitpid failed: " << std::strerror(errno)
                      << '\n';
            return std::nullopt;
        }
        if (!killed && std::chrono::steady_clock::now() >= deadline) {
            ::kill(-pid, SIGKILL);
            killed = true;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (killed) return std::nullopt;
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        std::cerr << "[ordpick] external oracle: command "
                  << (WIFEXITED(status)
                          ? "exited with status " + std::to_string(WEXITSTATUS(status))
                          : "terminated by signal")
                  << ", recording timeout\n";
        return std::nullopt;
    }
    if (elapsed >= cfg.timeout_seconds) return std::nullopt;
    return elapsed;
}

TimingRecord measure_all_orderings(const PolySystem& p, int problem_id, const OracleConfig& cfg,
                                   int ordering_cap) {
    auto orderings = enumerate_orderings(p.n_vars, ordering_cap);
    TimingRecord record;
    record.problem_id = problem_id;
    record.costs.reserve(orderings.size());
    record.timed_out.reserve(orderings.size());
    for (const VariableOrdering& o : orderings) {
        std::optional<double> cost = cfg.kind == OracleKind::surrogate
                                         ? surrogate_cost(p, o, cfg)
                                         : external_run(cfg, p, o);
        if (cost) {
            record.costs.push_back(*cost);
            record.timed_out.push_back(0);
        } else {
            record.costs.push_back(cfg.timeout_seconds);
            record.timed_out.push_back(1);
        }
    }
    return record;
}

int label_best(const TimingRecord& t) {
    if (t.costs.empty()) throw std::invalid_argument("label_best: empty record");
    std::size_t best = 0;
    for (std::size_t i = 1; i < t.costs.size(); ++i)
        if (t.costs[i] < t.costs[best]) best = i;
    return static_cast<int>(best);
}

void write_timings_csv(std::ostream& out, const std::vector<TimingRecord>& records) {
    out << "problem_id,ordering_index,cost_seconds,timed_out\n";
    char buffer[64];
    for (const TimingRecord& r : records) {
        for (std::size_t i = 0; i < r.costs.size(); ++i) {
            std::snprintf(buffer, sizeof buffer, "%.6f", r.costs[i]);
            out << r.problem_id << ',' << i << ',' << buffer << ','
                << (r.timed_out[i] ? 1 : 0) << '\n';
        }
    }
}

std::vector<TimingRecord> read_timings_csv(std::istream& in, const std::string& path_for_errors) {
    std::vector<TimingRecord> records;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw std::runtime_error(path_for_errors + ":" + std::to_string(line_no) + ": " + what);
    };
    if (!std::getline(in, line)) fail("missing header");
    ++line_no;
    if (line.rfind("problem_id,ordering_index,cost_seconds,timed_out", 0) != 0)
        fail("unexpected header '" + line + "'");
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        long problem_id, ordering_index, timed_out;
        double cost;
        try {
            if (!std::getline(row, field, ',')) fail("missing problem_id");
            problem_id = std::stol(field);
            if (!std::getline(row, field, ',')) fail("missing ordering_index");
            ordering_index = std::stol(field);
            if (!std::getline(row, field, ',')) fail("missing cost_seconds");
            cost = std::stod(field);
            if (!std::getline(row, field, ',')) fail("missing timed_out");
            timed_out = std::stol(field);
        } catch (const std::logic_error&) {
            fail("malformed numeric field");
            throw;  // unreachable
        }
        if (problem_id < 0) fail("negative problem_id");
        if (static_cast<std::size_t>(problem_id) >= records.size())
            records.resize(static_cast<std::size_t>(problem_id) + 1);
        TimingRecord& r = records[static_cast<std::size_t>(problem_id)];
        r.problem_id = static_cast<int>(problem_id);
        if (ordering_index != static_cast<long>(r.costs.size()))
            fail("ordering_index out of sequence");
        r.costs.push_back(cost);
        r.timed_out.push_back(timed_out ? 1 : 0);
    }
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].costs.empty())
            throw std::runtime_error(path_for_errors + ": missing rows for problem " +
                                     std::to_string(i));
    return records;
}

}  // namespace ordpick
