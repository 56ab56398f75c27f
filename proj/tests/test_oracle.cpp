#include <doctest.h>

#include <chrono>
#include <random>
#include <sstream>

#include "ordpick/oracle.hpp"
#include "test_oracles.hpp"

using namespace ordpick;

TEST_CASE("surrogate cost is the scaled sotd score") {
    PolySystem s = parse_infix("x1^2 + x2", {"x1", "x2"});
    OracleConfig cfg;
    cfg.surrogate_unit = 1.0;
    auto orderings = enumerate_orderings(2);
    CHECK(surrogate_cost(s, orderings[0], cfg) == 3.0);
    CHECK(surrogate_cost(s, orderings[1], cfg) == 4.0);

    cfg.surrogate_unit = 0.5;
    CHECK(surrogate_cost(s, orderings[0], cfg) == 1.5);

    OracleConfig tight = cfg;
    tight.caps = ProjectionCaps{1, 100};
    PolySystem pair = parse_infix("x1^2 + x2; x1 - x2", {"x1", "x2"});
    CHECK(!surrogate_cost(pair, orderings[0], tight).has_value());
}

TEST_CASE("measure_all_orderings fills one slot per ordering") {
    PolySystem s = parse_infix("x1^2 + x2", {"x1", "x2"});
    OracleConfig cfg;
    cfg.surrogate_unit = 1.0;
    TimingRecord record = measure_all_orderings(s, 17, cfg);
    CHECK(record.problem_id == 17);
    REQUIRE(record.costs.size() == 2);
    CHECK(record.costs[0] == 3.0);
    CHECK(record.costs[1] == 4.0);
    CHECK(record.timed_out == std::vector<std::uint8_t>{0, 0});

    OracleConfig tight = cfg;
    tight.caps = ProjectionCaps{1, 100};
    tight.timeout_seconds = 42.0;
    PolySystem pair = parse_infix("x1^2 + x2; x1 - x2", {"x1", "x2"});
    TimingRecord blown = measure_all_orderings(pair, 0, tight);
    for (std::size_t i = 0; i < blown.costs.size(); ++i) {
        CHECK(blown.timed_out[i] == 1);
        CHECK(blown.costs[i] == 42.0);
    }
}

TEST_CASE("surrogate runs are deterministic") {
    std::mt19937_64 rng(15);
    OracleConfig cfg;
    for (int i = 0; i < 20; ++i) {
        PolySystem s = testing::random_system(rng, 3, 2, 2);
        TimingRecord a = measure_all_orderings(s, i, cfg);
        TimingRecord b = measure_all_orderings(s, i, cfg);
        CHECK(a.costs == b.costs);
        CHECK(a.timed_out == b.timed_out);
        CHECK(a.costs.size() == 6);
    }
}

TEST_CASE("label_best takes the argmin with low-index ties") {
    TimingRecord r;
    r.costs = {3.2, 1.1, 1.1, 5.0};
    r.timed_out = {0, 0, 0, 0};
    CHECK(label_best(r) == 1);
    r.costs = {7.0};
    r.timed_out = {0};
    CHECK(label_best(r) == 0);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> cost(0.1, 9.9);
    for (int trial = 0; trial < 500; ++trial) {
        TimingRecord record;
        std::size_t n = 1 + rng() % 24;
        for (std::size_t i = 0; i < n; ++i) {
            record.costs.push_back(cost(rng));
            record.timed_out.push_back(0);
        }
        int best = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (record.costs[i] < record.costs[static_cast<std::size_t>(best)])
                best = static_cast<int>(i);
        CHECK(label_best(record) == best);
    }
}

TEST_CASE("surrogate labels coincide with the sotd choice") {
    std::mt19937_64 rng(31);
    OracleConfig cfg;
    for (int i = 0; i < 40; ++i) {
        PolySystem s = testing::random_system(rng, 3, 2, 2);
        TimingRecord record = measure_all_orderings(s, i, cfg);
        HeuristicChoice choice = sotd_choose(s, cfg.caps);
        CHECK(label_best(record) == static_cast<int>(choice.ordering.index));
    }
}

TEST_CASE("timings csv round-trips") {
    std::mt19937_64 rng(4);
    OracleConfig cfg;
    std::vector<TimingRecord> records;
    for (int i = 0; i < 10; ++i)
        records.push_back(measure_all_orderings(testing::random_system(rng, 3, 2, 2), i, cfg));

    std::ostringstream out;
    write_timings_csv(out, records);
    std::istringstream in(out.str());
    auto back = read_timings_csv(in, "timings.csv");
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].problem_id == records[i].problem_id);
        CHECK(back[i].timed_out == records[i].timed_out);
        REQUIRE(back[i].costs.size() == records[i].costs.size());
        for (std::size_t j = 0; j < records[i].costs.size(); ++j)
            CHECK(back[i].costs[j] == doctest::Approx(records[i].costs[j]).epsilon(1e-9));
    }

    std::istringstream bad("problem_id,ordering_index,cost_seconds,timed_out\n0,1,0.5,0\n");
    CHECK_THROWS(read_timings_csv(bad, "bad.csv"));
}

#ifdef ORDPICK_STUB_SOLVER

TEST_CASE("external oracle measures the child process") {
    PolySystem s = parse_infix("x1^2 + x2", {"x1", "x2"});
    VariableOrdering o = enumerate_orderings(2)[0];

    OracleConfig cfg;
    cfg.kind = OracleKind::external;
    cfg.timeout_seconds = 10.0;
    cfg.command_template = std::string(ORDPICK_STUB_SOLVER) +
                           " --sleep 0.05 {input} {ordering} {timeout}";
    auto cost = external_run(cfg, s, o);
    REQUIRE(cost.has_value());
    CHECK(*cost >= 0.05);
    CHECK(*cost < 1.0);
}

TEST_CASE("external oracle kills children at the timeout") {
    PolySystem s = parse_infix("x1^2 + x2", {"x1", "x2"});
    VariableOrdering o = enumerate_orderings(2)[0];

    OracleConfig cfg;
    cfg.kind = OracleKind::external;
    cfg.timeout_seconds = 0.3;
    cfg.command_template =
        std::string(ORDPICK_STUB_SOLVER) + " --sleep 5 {input} {ordering} {timeout}";
    auto start = std::chrono::steady_clock::now();
    auto cost = external_run(cfg, s, o);
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(!cost.has_value());
    CHECK(elapsed < cfg.timeout_seconds + 2.0);
}

TEST_CASE("external oracle treats failures as timeouts") {
    PolySystem s = parse_infix("x1^2 + x2", {"x1", "x2"});
    VariableOrdering o = enumerate_orderings(2)[0];

    OracleConfig cfg;
    cfg.kind = OracleKind::external;
    cfg.timeout_seconds = 5.0;
    cfg.command_template =
        std::string(ORDPICK_STUB_SOLVER) + " --exit 1 {input} {ordering} {timeout}";
    CHECK(!external_run(cfg, s, o).has_value());

    cfg.command_template = "/nonexistent/solver {input} {ordering} {timeout}";
    CHECK(!external_run(cfg, s, o).has_value());

    OracleConfig bad = cfg;
    bad.command_template = "solver {input}";
    CHECK_THROWS_AS(external_run(bad, s, o), std::invalid_argument);

    cfg.command_template = std::string(ORDPICK_STUB_SOLVER) + " {input} {ordering} {timeout}";
    TimingRecord record = measure_all_orderings(s, 0, cfg);
    REQUIRE(record.costs.size() == 2);
    for (std::size_t i = 0; i < record.costs.size(); ++i) {
        CHECK(record.timed_out[i] == 0);
        CHECK(record.costs[i] < 1.0);
    }
}

#endif  // ORDPICK_STUB_SOLVER
