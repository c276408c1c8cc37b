#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/random.hpp"

namespace aoi {

enum class ServiceDistribution { exponential, gamma };

// Service-time law of a queue, parameterized by rate and squared coefficient
// of variation. scv = 1 is exponential; the gamma parameterization keeps the
// mean at 1/rate while the scv scales the second moment:
//   shape = 1/scv, scale = scv/rate  =>  E[T] = 1/rate, E[T^2] = (1+scv)/rate^2.
struct ServiceSpec {
    double rate = 1.0;
    double scv = 1.0;
    ServiceDistribution dist = ServiceDistribution::exponential;

    double first_moment() const { return 1.0 / rate; }
    double second_moment() const { return (1.0 + scv) / (rate * rate); }
    // MGF E[e^{sT}] of the service law; throws PoleAt outside the domain.
    double mgf(double s) const;
    double sample(RandomStream& rng) const;
    void validate() const;
};

// M status-update flows sharing one server and one transmission-success
// probability. Strict validation (0 < p < 1) is what the closed forms need;
// the simulator performs its own relaxed boundary checks.
struct FlowSet {
    std::vector<double> rates;
    double p_success = 0.5;
    ServiceSpec service;

    double total() const;
    double utilization() const { return total() / service.rate; }
    void validate() const;
    // total()/rate < 1; separate because the blocking queue itself does not
    // need it and several boundary examples violate it.
    void validate_utilization() const;
};

struct SatelliteNode {
    double mu = 1.0;          // service rate
    double eps = 0.0;         // outgoing-link error probability
    double theta = 0.0;       // external cross-traffic rate entering here
    double psi = 0.0;         // fraction of cross traffic leaving after service
    int multiplicity = 1;     // analytic exponent knob n_j (single server = 1)
};

// Ordered relay chain; node k's outgoing link is link k, the last one being
// the final hop to the destination. p_a is the chain-wide visibility
// probability, applied once end to end.
struct SatelliteChain {
    std::vector<SatelliteNode> nodes;
    double p_a = 1.0;

    std::size_t hop_count() const { return nodes.size(); }
    void validate() const;
};

struct DepartureMoments {
    double mean = 0.0;
    double second = 0.0;
};

// --- multi-stream single-buffer queue, exponential service ---

// First and second moments of the interval between consecutive successful
// deliveries of one flow:
//   E[Y]   = (xi(1-p) + mu) / (mu xi_i p)
//   E[Y^2] = (2(xi p + mu)^2 - 2 mu xi_i p^2) / ((1-p)^2 (mu xi_i)^2)
// Requires exponential service (scv = 1); degenerates as p -> 1.
DepartureMoments mm11_departure_moments(const FlowSet& flows, std::size_t flow);

// 1/mu + E[Y^2] / (2 E[Y]) with the moments above.
double mm11_average_aoi(const FlowSet& flows, std::size_t flow);

// Departure-interval MGF, evaluated as
//   mu xi_i (1-p) / (s^2 p - (xi p + mu) s + mu xi_i).
// Note this evaluates to 1-p at s = 0, not 1; the discrepancy report carries
// the numeric-derivative cross-check against the closed-form moments.
double mgf_departure_mm11(double s, const FlowSet& flows, std::size_t flow);

// --- multi-stream single-buffer queue, general service ---

// Departure-interval MGF for general service,
//   p xi_i E[e^{sT}] / ((xi - s p^2) - (xi - xi_i) E[e^{sT}] p (1-p)).
double mgf_departure_mg11(double s, const FlowSet& flows, std::size_t flow);

// Average AoI of flow i:
//   (xi E[T] + 1) / (xi_i (1-p) p) + xi E[T^2] p^2 / (2 (xi p E[T] + 1)).
double mg11_average_aoi(const FlowSet& flows, std::size_t flow);

// Mean peak AoI of flow i: ((xi p + xi_i) E[T] + 1) / (xi_i p).
double mg11_peak_aoi(const FlowSet& flows, std::size_t flow);

// --- satellite relay chain ---

// Accumulated cross traffic offered to `node` (0-based):
//   sum_{j<=k} theta_j prod_{i=j..k-1} (1-psi_i)(1-eps_i).
double cross_traffic_rate(const SatelliteChain& chain, std::size_t node);

// Probability a source packet survives the first `hops` links and the
// visibility draw: prod_{i<hops}(1-eps_i) * p_a. hops is 1-based, 1..K.
double chain_success_probability(const SatelliteChain& chain, std::size_t hops);

// Total arrival rate at a node: survivors of the source stream plus cross
// traffic (node is 0-based; the source term uses node+1 links as printed).
double node_arrival_rate(const SatelliteChain& chain, std::size_t node, double source_rate);

// Spare service capacity alpha_j = mu_j - arrival rate; may be <= 0 for an
// unstable node (returned as-is for diagnostics, not thrown).
double node_response_rate(const SatelliteChain& chain, std::size_t node, double source_rate);

// First node whose response rate is <= 0, if any.
std::optional<std::size_t> first_unstable_node(const SatelliteChain& chain, double source_rate);

// Independence approximation of the chain's average AoI:
//   sum_j 1/(p_r(K) alpha_j^{n_j}) + 1/(xi p_r(K)) + (1-p_r(K))^2/(xi p_r(K)^2).
double chain_aoi_approx(const SatelliteChain& chain, double source_rate);

// Upper bound on the chain's average AoI; exceeds the approximation by
// exactly sum_j 1/mu_j^{n_j}.
double chain_aoi_upper(const SatelliteChain& chain, double source_rate);

// Central finite-difference moments of a scalar function at 0; used by the
// discrepancy report to cross-check MGFs against closed-form moments.
template <typename Fn>
DepartureMoments numeric_mgf_moments(Fn&& f, double h = 1e-6) {
    const double fp = f(h);
    const double fm = f(-h);
    const double f0 = f(0.0);
    return DepartureMoments{(fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)};
}

}  // namespace aoi
