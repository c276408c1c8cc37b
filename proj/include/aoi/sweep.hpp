#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aoi/channel.hpp"
#include "aoi/des.hpp"
#include "aoi/scenario.hpp"

namespace aoi {

struct RunOptions {
    std::size_t threads = 0;  // 0 = hardware concurrency; result is identical either way
    std::size_t estimate_samples = 20000;
    bool dump_traces = false;
    std::string trace_dir;
};

// One sweep point: the analytic evaluations, the replication-aggregated
// simulation estimates, and a status that records per-row failures without
// aborting the sweep.
struct ResultRow {
    double sweep_value = 0.0;
    double analytic_aoi = std::numeric_limits<double>::quiet_NaN();
    double analytic_upper = std::numeric_limits<double>::quiet_NaN();
    double sim_aoi = std::numeric_limits<double>::quiet_NaN();
    double sim_ci = std::numeric_limits<double>::quiet_NaN();
    double sim_peak_aoi = std::numeric_limits<double>::quiet_NaN();
    double rel_error = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

struct SweepResult {
    std::vector<ResultRow> rows;
    // Resolved transmission-success probability for multistream scenarios
    // (the estimate when success_prob = estimated).
    double p_success_used = std::numeric_limits<double>::quiet_NaN();
    std::optional<SuccessEstimate> estimated_psj;
};

// Monte Carlo success-probability estimate for a scenario's spatial layout;
// the source is the node with the median serving distance.
struct PsjReport {
    std::size_t ground_nodes = 0;
    std::size_t uavs = 0;
    std::size_t source = 0;
    double serving_distance = 0.0;
    double scheduling_prob = 0.0;
    SuccessEstimate estimate;
    double noise_only_reference = 0.0;  // closed form at the same distance
};

PsjReport estimate_scenario_psj(const ScenarioConfig& cfg, std::size_t n_samples);

// Runs every sweep value of a family-resolved scenario: analytic columns plus
// `replications` independent simulation replications per value. Replication
// seeds derive from (root_seed, sweep index, replication index) only, so
// family variants share random numbers and reruns are byte-stable regardless
// of thread count. Per-row failures land in ResultRow::status.
SweepResult run_sweep(const ScenarioConfig& cfg, const RunOptions& opts = {});

struct DiscrepancyReport {
    std::string text;
    double max_rel_error = 0.0;
    double max_at = std::numeric_limits<double>::quiet_NaN();
    std::size_t comparable_rows = 0;
    std::size_t flagged_rows = 0;
    // +1: analytic above simulated on every comparable row; -1: below; 0: mixed.
    int error_sign = 0;
};

// Per-row relative-error audit against a tolerance, plus the departure-MGF
// consistency section: the MGF's value at 0 and its numeric first/second
// derivatives against the closed-form interval moments.
DiscrepancyReport compare_analytic_vs_des(const std::vector<ResultRow>& rows,
                                          double tolerance,
                                          const std::optional<FlowSet>& report_flows);

// Fallback flow parameters for the report when no scenario metadata is
// available next to the CSV being compared.
FlowSet reference_report_flows();

// Exact column set: sweep_value,analytic_aoi,analytic_upper,sim_aoi,sim_ci,
// sim_peak_aoi,rel_error,status. Values as shortest round-trip decimals.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> parse_csv(const std::string& path);

}  // namespace aoi
