#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ordpick/polysys.hpp"
#include "ordpick/projection.hpp"

namespace ordpick {

// Per-problem cost of every variable ordering, in enumeration order.
// timed_out[i] implies costs[i] equals the configured timeout exactly.
struct TimingRecord {
    int problem_id = 0;
    std::vector<double> costs;
    std::vector<std::uint8_t> timed_out;
};

enum class OracleKind { surrogate, external };

// surrogate: cost = surrogate_unit * sotd_score, Blowup -> timeout. Keep
// timeout_seconds above surrogate_unit * max attainable score so that a
// timeout is never cheaper than a finite cost.
// external: command_template must contain {input}, {ordering} and {timeout};
// tokens are whitespace-split, no shell is involved.
struct OracleConfig {
    OracleKind kind = OracleKind::surrogate;
    double timeout_seconds = 300.0;
    std::string command_template;
    ProjectionCaps caps;
    double surrogate_unit = 0.001;
};

std::optional<double> surrogate_cost(const PolySystem& p, const VariableOrdering& o,
                                     const OracleConfig& cfg);

// Runs the external solver once; wall-clock seconds on success, nullopt on
// timeout, nonzero exit or spawn failure (cause logged to stderr). The child
// is killed at the timeout and never outlives it by more than the kill grace.
std::optional<double> external_run(const OracleConfig& cfg, const PolySystem& p,
                                   const VariableOrdering& o);

TimingRecord measure_all_orderings(const PolySystem& p, int problem_id, const OracleConfig& cfg,
                                   int ordering_cap = kDefaultOrderingCap);

// Argmin over costs, ties to the lowest index. An all-timeout record lands
// on index 0 by the same rule.
int label_best(const TimingRecord& t);

// timings CSV: header problem_id,ordering_index,cost_seconds,timed_out,
// rows sorted by (problem_id, ordering_index), costs with 6 decimals.
void write_timings_csv(std::ostream& out, const std::vector<TimingRecord>& records);
std::vector<TimingRecord> read_timings_csv(std::istream& in, const std::string& path_for_errors);

}  // namespace ordpick
