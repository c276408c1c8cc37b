#include "aoi/des.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <queue>

#include "aoi/random.hpp"

namespace aoi {

namespace {

void check_trace(const DeliveryTrace& trace) {
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const DeliveryRecord& r = trace.records[k];
        if (!(r.delivery_time > r.generation_time)) {
            throw ValidationError("trace.records", "delivery must follow generation");
        }
        if (k > 0 && !(r.delivery_time > trace.records[k - 1].delivery_time)) {
            throw ValidationError("trace.records", "delivery times must be strictly increasing");
        }
    }
}

}  // namespace

AoIStats accumulate_aoi(const DeliveryTrace& trace) {
    if (trace.records.size() < 2) {
        throw InsufficientDeliveries(trace.records.size(), 2);
    }
    check_trace(trace);

    double newest_content = trace.records[0].generation_time;
    double last_time = trace.records[0].delivery_time;
    double area = 0.0;
    double peak_sum = 0.0;
    std::uint64_t peak_count = 0;
    double age = last_time - newest_content;

    for (std::size_t k = 1; k < trace.records.size(); ++k) {
        const DeliveryRecord& r = trace.records[k];
        const double dt = r.delivery_time - last_time;
        area += dt * age + 0.5 * dt * dt;
        age += dt;
        if (r.generation_time > newest_content) {
            peak_sum += age;
            ++peak_count;
            newest_content = r.generation_time;
            age = r.delivery_time - r.generation_time;
        }
        last_time = r.delivery_time;
    }

    AoIStats out;
    out.deliveries = trace.records.size();
    out.time_avg_aoi = area / (last_time - trace.records[0].delivery_time);
    // If no delivery ever reduced the age, report the single ongoing peak.
    out.mean_peak_aoi = peak_count > 0 ? peak_sum / static_cast<double>(peak_count) : age;
    return out;
}

double renewal_identity_residual(const DeliveryTrace& trace) {
    if (trace.records.size() < 1000) {
        throw InsufficientDeliveries(trace.records.size(), 1000);
    }
    const AoIStats integral = accumulate_aoi(trace);

    // Sample moments of the interspacings Y and the system time T at the start
    // of each inter-delivery cycle, assembled as (N/T_span)(E[Y^2]/2 + E[YT]).
    const std::size_t cycles = trace.records.size() - 1;
    double sum_y2 = 0.0;
    double sum_yt = 0.0;
    for (std::size_t k = 1; k < trace.records.size(); ++k) {
        const double y = trace.records[k].delivery_time - trace.records[k - 1].delivery_time;
        const double t_prev =
            trace.records[k - 1].delivery_time - trace.records[k - 1].generation_time;
        sum_y2 += y * y;
        sum_yt += y * t_prev;
    }
    const double n = static_cast<double>(cycles);
    const double span =
        trace.records.back().delivery_time - trace.records.front().delivery_time;
    const double moment_form = (n / span) * (sum_y2 / n / 2.0 + sum_yt / n);
    return std::abs(integral.time_avg_aoi - moment_form) / integral.time_avg_aoi;
}

MultistreamResult simulate_multistream(const FlowSet& flows, double horizon,
                                       std::uint64_t seed) {
    // Relaxed boundary validation: the blocking queue is well defined for
    // p in [0,1] and any positive rates.
    if (flows.rates.empty()) throw ValidationError("flows.rates", "must be non-empty");
    for (double r : flows.rates) {
        if (!(r > 0.0)) throw ValidationError("flows.rates", "every rate must be > 0");
    }
    if (!(flows.p_success >= 0.0 && flows.p_success <= 1.0)) {
        throw ValidationError("flows.p_success", "must be in [0,1]");
    }
    flows.service.validate();
    if (!(horizon > 0.0)) throw ValidationError("horizon", "must be > 0");

    const std::size_t m = flows.rates.size();
    const double total = flows.total();
    std::vector<double> cumulative(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        acc += flows.rates[i] / total;
        cumulative[i] = acc;
    }

    MultistreamResult out;
    out.flows.resize(m);
    for (FlowOutcome& f : out.flows) f.trace.horizon = horizon;

    RandomStream rng(derive_seed(seed, {0xDE5}));
    double t = 0.0;
    double busy_until = 0.0;
    for (;;) {
        t += rng.exponential(total);
        if (t > horizon) break;
        const double u = rng.uniform01();
        std::size_t flow = m - 1;
        for (std::size_t i = 0; i < m; ++i) {
            if (u < cumulative[i]) {
                flow = i;
                break;
            }
        }
        if (t < busy_until) {
            ++out.flows[flow].drops;
            continue;
        }
        double done = t + flows.service.sample(rng);
        // A service short enough to vanish in floating point still has to
        // finish strictly after it started.
        if (done <= t) done = std::nextafter(t, std::numeric_limits<double>::infinity());
        const bool delivered = rng.bernoulli(flows.p_success);
        busy_until = done;
        if (done > horizon) continue;  // still in service at the end
        if (delivered) {
            out.flows[flow].trace.records.push_back({t, done});
        } else {
            ++out.flows[flow].send_failures;
        }
    }

    for (FlowOutcome& f : out.flows) {
        if (f.trace.records.size() >= kMinDeliveriesForStats) {
            AoIStats s = accumulate_aoi(f.trace);
            s.drops = f.drops;
            f.stats = s;
        } else {
            out.horizon_too_short = true;
        }
    }
    return out;
}

namespace {

struct TandemPacket {
    double generation_time = 0.0;
    bool is_source = false;
    bool visible = true;
};

enum class EventKind { source_arrival, cross_arrival, completion };

struct TandemEvent {
    double time;
    std::uint64_t seq;  // insertion order breaks floating-point ties
    EventKind kind;
    std::size_t node;

    bool operator>(const TandemEvent& other) const {
        if (time != other.time) return time > other.time;
        return seq > other.seq;
    }
};

}  // namespace

TandemResult simulate_tandem(const SatelliteChain& chain, double source_rate,
                             double horizon, std::uint64_t seed) {
    chain.validate();
    if (!(source_rate > 0.0)) throw ValidationError("source_rate", "must be > 0");
    if (!(horizon > 0.0)) throw ValidationError("horizon", "must be > 0");

    const std::size_t k_nodes = chain.hop_count();
    // Stability against the load the simulator actually offers: the source
    // stream thinned by upstream link errors plus accumulated cross traffic.
    // (Visibility does not thin the load; invisible packets still occupy
    // servers all the way down the chain.)
    double src_rate_at_node = source_rate;
    for (std::size_t j = 0; j < k_nodes; ++j) {
        if (j > 0) src_rate_at_node *= 1.0 - chain.nodes[j - 1].eps;
        const double offered = src_rate_at_node + cross_traffic_rate(chain, j);
        if (offered >= chain.nodes[j].mu) throw Unstable(j);
    }

    TandemResult out;
    out.trace.horizon = horizon;

    RandomStream rng(derive_seed(seed, {0x7A4D}));
    std::priority_queue<TandemEvent, std::vector<TandemEvent>, std::greater<TandemEvent>> events;
    std::uint64_t seq = 0;

    std::vector<std::deque<TandemPacket>> queues(k_nodes);
    std::vector<bool> busy(k_nodes, false);

    const auto schedule = [&](double time, EventKind kind, std::size_t node) {
        events.push(TandemEvent{time, seq++, kind, node});
    };

    const auto begin_service = [&](std::size_t node, double now) {
        busy[node] = true;
        double done = now + rng.exponential(chain.nodes[node].mu);
        if (done <= now) done = std::nextafter(now, std::numeric_limits<double>::infinity());
        schedule(done, EventKind::completion, node);
    };

    const auto enqueue = [&](std::size_t node, const TandemPacket& pkt, double now) {
        queues[node].push_back(pkt);
        if (!busy[node]) begin_service(node, now);
    };

    schedule(rng.exponential(source_rate), EventKind::source_arrival, 0);
    for (std::size_t j = 0; j < k_nodes; ++j) {
        if (chain.nodes[j].theta > 0.0) {
            schedule(rng.exponential(chain.nodes[j].theta), EventKind::cross_arrival, j);
        }
    }

    while (!events.empty()) {
        const TandemEvent ev = events.top();
        if (ev.time > horizon) break;
        events.pop();

        switch (ev.kind) {
            case EventKind::source_arrival: {
                TandemPacket pkt;
                pkt.generation_time = ev.time;
                pkt.is_source = true;
                pkt.visible = rng.bernoulli(chain.p_a);
                ++out.generated;
                enqueue(0, pkt, ev.time);
                schedule(ev.time + rng.exponential(source_rate), EventKind::source_arrival, 0);
                break;
            }
            case EventKind::cross_arrival: {
                TandemPacket pkt;
                pkt.is_source = false;
                enqueue(ev.node, pkt, ev.time);
                schedule(ev.time + rng.exponential(chain.nodes[ev.node].theta),
                         EventKind::cross_arrival, ev.node);
                break;
            }
            case EventKind::completion: {
                const TandemPacket pkt = queues[ev.node].front();
                queues[ev.node].pop_front();
                busy[ev.node] = false;
                if (!queues[ev.node].empty()) begin_service(ev.node, ev.time);

                const std::size_t node = ev.node;
                const bool last = node + 1 == k_nodes;
                if (pkt.is_source) {
                    // The outgoing link (to the next node, or the ground hop
                    // after the final node) can always fail.
                    if (rng.bernoulli(chain.nodes[node].eps)) {
                        ++out.link_losses;
                    } else if (last) {
                        if (pkt.visible) {
                            out.trace.records.push_back({pkt.generation_time, ev.time});
                        } else {
                            ++out.invisible;
                        }
                    } else {
                        enqueue(node + 1, pkt, ev.time);
                    }
                } else if (!last) {
                    // Cross traffic may leave the multi-hop path after
                    // service; what stays on rides the same lossy link.
                    if (!rng.bernoulli(chain.nodes[node].psi) &&
                        !rng.bernoulli(chain.nodes[node].eps)) {
                        enqueue(node + 1, pkt, ev.time);
                    }
                }
                break;
            }
        }
    }

    if (out.trace.records.size() >= kMinDeliveriesForStats) {
        AoIStats s = accumulate_aoi(out.trace);
        s.drops = out.link_losses + out.invisible;
        out.stats = s;
    } else {
        out.horizon_too_short = true;
    }
    return out;
}

void write_trace_csv(const DeliveryTrace& trace, const std::string& flow_id,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << "generation_time,delivery_time,flow_id\n";
    out.precision(17);
    for (const DeliveryRecord& r : trace.records) {
        out << r.generation_time << ',' << r.delivery_time << ',' << flow_id << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace aoi
