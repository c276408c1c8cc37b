#include "aoi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "aoi/format.hpp"
#include "aoi/random.hpp"

namespace aoi {

namespace {

constexpr std::uint64_t kGroundPatternTag = 0x9000;
constexpr std::uint64_t kUavPatternTag = 0x9001;
constexpr std::uint64_t kPsjTag = 0x9002;
constexpr std::uint64_t kReplicationTag = 0x9100;

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(n, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (std::thread& t : pool) t.join();
}

struct RepOutcome {
    bool ok = false;
    bool short_horizon = false;
    std::string error;
    double time_avg = 0.0;
    double peak = 0.0;
    DeliveryTrace trace;  // kept only when trace dumping is on
};

struct Aggregate {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double ci = std::numeric_limits<double>::quiet_NaN();
};

Aggregate aggregate(const std::vector<double>& xs) {
    Aggregate out;
    const double n = static_cast<double>(xs.size());
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / n;
    if (xs.size() < 2) {
        out.ci = 0.0;
        return out;
    }
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.ci = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return out;
}

}  // namespace

PsjReport estimate_scenario_psj(const ScenarioConfig& cfg, std::size_t n_samples) {
    PsjReport out;
    const PointPattern ground = sample_ground_pattern(
        cfg.spatial, cfg.window, derive_seed(cfg.root_seed, {kGroundPatternTag}));
    const PointPattern uavs = sample_ppp(cfg.spatial.lambda_a, cfg.window,
                                         derive_seed(cfg.root_seed, {kUavPatternTag}));
    if (uavs.size() == 0) {
        throw ValidationError("spatial.lambda_a",
                              "realized zero UAVs; raise lambda_a or enlarge the window");
    }
    if (ground.size() == 0) {
        throw ValidationError("spatial", "realized zero ground nodes");
    }
    const AssociationMap assoc = associate_nearest(ground, uavs);

    // Median serving distance picks a representative (non-extreme) source.
    std::vector<std::pair<double, std::size_t>> by_distance(ground.size());
    for (std::size_t i = 0; i < ground.size(); ++i) {
        const Point& uav = uavs.points[assoc.assignment[i]];
        by_distance[i] = {squared_distance(ground.points[i], uav), i};
    }
    std::sort(by_distance.begin(), by_distance.end());
    const auto [d2, source] = by_distance[by_distance.size() / 2];

    out.ground_nodes = ground.size();
    out.uavs = uavs.size();
    out.source = source;
    out.serving_distance = std::sqrt(d2);
    out.scheduling_prob = scheduling_probability(assoc, assoc.assignment[source]);
    out.estimate = estimate_success_probability(ground, uavs, assoc, source, cfg.channel,
                                                std::nullopt, n_samples,
                                                derive_seed(cfg.root_seed, {kPsjTag}));
    out.noise_only_reference = noise_only_success_probability(out.serving_distance, cfg.channel);
    return out;
}

SweepResult run_sweep(const ScenarioConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    SweepResult result;

    ScenarioConfig base = cfg;
    if (base.mode == Mode::multistream && base.flows->success.estimated) {
        const PsjReport psj = estimate_scenario_psj(base, opts.estimate_samples);
        // An estimate at the (0,1) boundary cannot feed the closed forms.
        const double p = std::clamp(psj.estimate.p_hat, 1e-6, 1.0 - 1e-6);
        base.flows->success.estimated = false;
        base.flows->success.fixed_value = p;
        result.estimated_psj = psj.estimate;
    }
    if (base.mode == Mode::multistream) {
        result.p_success_used = base.flows->success.fixed_value;
    }

    const std::size_t n_sweep = base.sweep.values.size();
    const std::size_t reps = base.replications;
    std::vector<ScenarioConfig> points;
    points.reserve(n_sweep);
    for (double v : base.sweep.values) {
        points.push_back(apply_parameter(base, base.sweep.parameter, v));
    }

    std::vector<std::vector<RepOutcome>> outcomes(n_sweep);
    for (auto& v : outcomes) v.resize(reps);

    parallel_for(n_sweep * reps, opts.threads, [&](std::size_t job) {
        const std::size_t i = job / reps;
        const std::size_t r = job % reps;
        const std::uint64_t seed = derive_seed(base.root_seed, {kReplicationTag, i, r});
        RepOutcome& out = outcomes[i][r];
        const bool keep_trace = opts.dump_traces && r == 0;
        try {
            if (base.mode == Mode::multistream) {
                const FlowSet flows = build_flow_set(*points[i].flows);
                MultistreamResult sim = simulate_multistream(flows, base.horizon, seed);
                if (sim.horizon_too_short || !sim.flows[0].stats) {
                    out.short_horizon = true;
                } else {
                    out.ok = true;
                    out.time_avg = sim.flows[0].stats->time_avg_aoi;
                    out.peak = sim.flows[0].stats->mean_peak_aoi;
                }
                if (keep_trace) out.trace = std::move(sim.flows[0].trace);
            } else {
                TandemResult sim = simulate_tandem(points[i].chain->chain,
                                                   points[i].chain->xi, base.horizon, seed);
                if (!sim.stats) {
                    out.short_horizon = true;
                } else {
                    out.ok = true;
                    out.time_avg = sim.stats->time_avg_aoi;
                    out.peak = sim.stats->mean_peak_aoi;
                }
                if (keep_trace) out.trace = std::move(sim.trace);
            }
        } catch (const Unstable& e) {
            out.error = "unstable(node=" + std::to_string(e.node) + ")";
        } catch (const Error& e) {
            out.error = std::string("error(") + e.what() + ")";
        }
    });

    result.rows.reserve(n_sweep);
    for (std::size_t i = 0; i < n_sweep; ++i) {
        ResultRow row;
        row.sweep_value = base.sweep.values[i];

        try {
            if (base.mode == Mode::multistream) {
                const FlowSet flows = build_flow_set(*points[i].flows);
                row.analytic_aoi = points[i].flows->model == AnalyticModel::mm11
                                       ? mm11_average_aoi(flows, 0)
                                       : mg11_average_aoi(flows, 0);
            } else {
                row.analytic_aoi = chain_aoi_approx(points[i].chain->chain, points[i].chain->xi);
                row.analytic_upper = chain_aoi_upper(points[i].chain->chain, points[i].chain->xi);
            }
        } catch (const Unstable& e) {
            row.status = "unstable(node=" + std::to_string(e.node) + ")";
        } catch (const Error& e) {
            row.status = std::string("error(") + e.what() + ")";
        }

        std::vector<double> avgs, peaks;
        bool any_short = false;
        std::string rep_error;
        for (const RepOutcome& rep : outcomes[i]) {
            if (rep.ok) {
                avgs.push_back(rep.time_avg);
                peaks.push_back(rep.peak);
            } else if (rep.short_horizon) {
                any_short = true;
            } else if (rep_error.empty()) {
                rep_error = rep.error;
            }
        }
        if (!rep_error.empty()) {
            if (row.status == "ok") row.status = rep_error;
        } else if (any_short) {
            if (row.status == "ok") row.status = "horizon_too_short";
        } else {
            const Aggregate a = aggregate(avgs);
            const Aggregate p = aggregate(peaks);
            row.sim_aoi = a.mean;
            row.sim_ci = a.ci;
            row.sim_peak_aoi = p.mean;
            if (std::isfinite(row.analytic_aoi) && row.sim_aoi != 0.0) {
                row.rel_error = std::abs(row.analytic_aoi - row.sim_aoi) / std::abs(row.sim_aoi);
            }
        }
        result.rows.push_back(std::move(row));

        if (opts.dump_traces && !opts.trace_dir.empty() && !outcomes[i][0].trace.records.empty()) {
            write_trace_csv(outcomes[i][0].trace,
                            base.mode == Mode::multistream ? "flow1" : "source",
                            opts.trace_dir + "/" + base.name + "_sweep" + std::to_string(i) +
                                ".csv");
        }
    }
    return result;
}

FlowSet reference_report_flows() {
    FlowSet flows;
    flows.rates = {1.0, 1.0, 1.0};
    flows.p_success = 0.5;
    flows.service.rate = 2.0;
    flows.service.scv = 1.0;
    flows.service.dist = ServiceDistribution::exponential;
    return flows;
}

namespace {

void append_mgf_section(std::ostringstream& out, const FlowSet& flows) {
    out << "departure-mgf consistency check (flow 1)\n"
        << "  parameters: xi_total = " << fmt_double(flows.total())
        << ", xi_1 = " << fmt_double(flows.rates[0])
        << ", mu = " << fmt_double(flows.service.rate)
        << ", p_success = " << fmt_double(flows.p_success) << "\n";

    FlowSet expo = flows;
    expo.service.scv = 1.0;
    expo.service.dist = ServiceDistribution::exponential;
    const bool forced = std::abs(flows.service.scv - 1.0) > 1e-12;
    if (forced) {
        out << "  note: service scv forced to 1 for the exponential-service MGF\n";
    }

    const double at_zero = mgf_departure_mm11(0.0, expo, 0);
    const DepartureMoments closed = mm11_departure_moments(expo, 0);
    const DepartureMoments numeric = numeric_mgf_moments(
        [&](double s) { return mgf_departure_mm11(s, expo, 0); });
    const auto gap = [](double a, double b) {
        return std::abs(a - b) / std::max(std::abs(b), 1e-300);
    };
    out << "  mgf(0) = " << fmt_double(at_zero)
        << "   (a proper MGF evaluates to 1 at s = 0; printed form gives 1 - p)\n"
        << "  numeric d/ds at 0   = " << fmt_double(numeric.mean)
        << "   closed-form E[Y]   = " << fmt_double(closed.mean)
        << "   rel gap = " << fmt_double(gap(numeric.mean, closed.mean)) << "\n"
        << "  numeric d2/ds2 at 0 = " << fmt_double(numeric.second)
        << "   closed-form E[Y^2] = " << fmt_double(closed.second)
        << "   rel gap = " << fmt_double(gap(numeric.second, closed.second)) << "\n"
        << "  (central differences, h = 1e-6)\n";

    // General-service MGF value at 0 for the same flows, same caveat.
    const double general_at_zero = mgf_departure_mg11(0.0, flows, 0);
    out << "  general-service mgf(0) = " << fmt_double(general_at_zero) << "\n";
}

}  // namespace

DiscrepancyReport compare_analytic_vs_des(const std::vector<ResultRow>& rows,
                                          double tolerance,
                                          const std::optional<FlowSet>& report_flows) {
    DiscrepancyReport report;
    std::ostringstream out;
    out << "discrepancy report\n"
        << "tolerance: " << fmt_double(tolerance) << "\n"
        << "rows: " << rows.size() << "\n\n"
        << "sweep_value  analytic_aoi  sim_aoi  rel_error  mark\n";

    int positives = 0, negatives = 0;
    for (const ResultRow& row : rows) {
        out << fmt_double(row.sweep_value) << "  " << fmt_double(row.analytic_aoi) << "  "
            << fmt_double(row.sim_aoi) << "  " << fmt_double(row.rel_error) << "  ";
        if (row.status != "ok") {
            out << row.status << "\n";
            continue;
        }
        if (!std::isfinite(row.rel_error)) {
            out << "no_comparison\n";
            continue;
        }
        ++report.comparable_rows;
        (row.analytic_aoi >= row.sim_aoi ? positives : negatives) += 1;
        if (row.rel_error >= report.max_rel_error) {
            report.max_rel_error = row.rel_error;
            report.max_at = row.sweep_value;
        }
        if (row.rel_error > tolerance) {
            ++report.flagged_rows;
            out << "FLAG\n";
        } else {
            out << "PASS\n";
        }
    }

    if (report.comparable_rows > 0) {
        report.error_sign = negatives == 0 ? 1 : (positives == 0 ? -1 : 0);
    }
    out << "\nmax relative error: " << fmt_double(report.max_rel_error);
    if (std::isfinite(report.max_at)) out << " at sweep_value = " << fmt_double(report.max_at);
    out << "\nflagged rows: " << report.flagged_rows << " of " << report.comparable_rows
        << " comparable\n"
        << "error direction: "
        << (report.error_sign > 0
                ? "analytic at or above simulated on every comparable row"
                : report.error_sign < 0 ? "analytic below simulated on every comparable row"
                                        : "mixed")
        << "\n\n";

    append_mgf_section(out, report_flows ? *report_flows : reference_report_flows());
    report.text = out.str();
    return report;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << "sweep_value,analytic_aoi,analytic_upper,sim_aoi,sim_ci,sim_peak_aoi,rel_error,status\n";
    for (const ResultRow& r : rows) {
        out << fmt_double(r.sweep_value) << ',' << fmt_double(r.analytic_aoi) << ','
            << fmt_double(r.analytic_upper) << ',' << fmt_double(r.sim_aoi) << ','
            << fmt_double(r.sim_ci) << ',' << fmt_double(r.sim_peak_aoi) << ','
            << fmt_double(r.rel_error) << ',' << r.status << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

std::vector<ResultRow> parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) ||
        line !=
            "sweep_value,analytic_aoi,analytic_upper,sim_aoi,sim_ci,sim_peak_aoi,rel_error,status") {
        throw ParseError(path, 1, "unexpected CSV header");
    }
    std::vector<ResultRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (cells.size() != 8) throw ParseError(path, line_no, "expected 8 columns");
        const auto num = [&](std::size_t i) {
            if (auto v = parse_double(cells[i])) return *v;
            throw ParseError(path, line_no, "bad number: '" + cells[i] + "'");
        };
        ResultRow row;
        row.sweep_value = num(0);
        row.analytic_aoi = num(1);
        row.analytic_upper = num(2);
        row.sim_aoi = num(3);
        row.sim_ci = num(4);
        row.sim_peak_aoi = num(5);
        row.rel_error = num(6);
        row.status = cells[7];
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace aoi
