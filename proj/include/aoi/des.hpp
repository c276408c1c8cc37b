#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/errors.hpp"

namespace aoi {

// One successfully delivered source packet: when its content was generated
// and when it reached the destination.
struct DeliveryRecord {
    double generation_time = 0.0;
    double delivery_time = 0.0;
};

// Ordered successful deliveries over a simulated horizon. Records must be
// strictly increasing in delivery time with delivery > generation.
struct DeliveryTrace {
    std::vector<DeliveryRecord> records;
    double horizon = 0.0;
};

struct AoIStats {
    double time_avg_aoi = 0.0;
    double mean_peak_aoi = 0.0;
    std::uint64_t deliveries = 0;
    std::uint64_t drops = 0;
    double ci_halfwidth = 0.0;  // filled at replication-aggregation level
};

// Flows with fewer deliveries than this get their statistics refused.
inline constexpr std::uint64_t kMinDeliveriesForStats = 100;

// Exact piecewise-linear integration of the age sawtooth over the span from
// the first to the last delivery. The age drops at a delivery only when the
// delivered content is fresher than what the destination already has; stale
// deliveries leave the age growing. A peak is recorded just before every
// age-reducing delivery. Throws InsufficientDeliveries below 2 records.
AoIStats accumulate_aoi(const DeliveryTrace& trace);

// Relative difference between the sawtooth integral and the renewal moment
// form (deliveries/span) * (mean(Y^2)/2 + mean(Y*T)), with Y the delivery
// interspacings and T the system time at the start of each inter-delivery
// cycle. The two agree identically for fresh traces, so the residual is a
// bookkeeping check on the accumulator. Requires >= 1000 records.
double renewal_identity_residual(const DeliveryTrace& trace);

struct FlowOutcome {
    DeliveryTrace trace;
    std::optional<AoIStats> stats;  // absent when deliveries < kMinDeliveriesForStats
    std::uint64_t drops = 0;        // arrivals lost to a busy server
    std::uint64_t send_failures = 0;  // completed services that failed delivery
};

struct MultistreamResult {
    std::vector<FlowOutcome> flows;
    bool horizon_too_short = false;  // some flow fell short of the threshold
};

// Event-driven multi-flow single-server blocking queue: Poisson arrivals per
// flow, one server, no waiting room (an arrival during service is dropped),
// service drawn from flows.service, delivery succeeding with probability
// flows.p_success. Per-flow sawtooth statistics come from that flow's own
// successful deliveries. Boundary success probabilities (0 and 1) are
// accepted here even though the closed forms exclude them. Deterministic
// given seed.
MultistreamResult simulate_multistream(const FlowSet& flows, double horizon,
                                       std::uint64_t seed);

struct TandemResult {
    DeliveryTrace trace;
    std::optional<AoIStats> stats;
    std::uint64_t generated = 0;     // source packets admitted within horizon
    std::uint64_t link_losses = 0;   // source packets lost on some link
    std::uint64_t invisible = 0;     // survived every link but failed visibility
    bool horizon_too_short = false;
};

// Tandem of FCFS single-server queues with exponential service mu_j and
// infinite buffers. Source packets arrive Poisson(source_rate) at node 0;
// cross traffic arrives Poisson(theta_k) at node k, occupies servers like any
// packet, leaves after service at node i with probability psi_i, and is
// subject to the same link-error draws. A source packet crossing link k is
// lost with probability eps_k; the last link is the hop to the destination.
// Visibility is a single Bernoulli(p_a) per source packet applied end to end.
// Throws Unstable(j) when the offered load at node j reaches mu_j.
TandemResult simulate_tandem(const SatelliteChain& chain, double source_rate,
                             double horizon, std::uint64_t seed);

// Trace export: generation_time, delivery_time, flow_id rows.
void write_trace_csv(const DeliveryTrace& trace, const std::string& flow_id,
                     const std::string& path);

}  // namespace aoi
