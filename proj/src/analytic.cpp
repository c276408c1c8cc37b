#include "aoi/analytic.hpp"

#include <cmath>
#include <numeric>

namespace aoi {

namespace {

void require(bool ok, const char* field, const char* constraint) {
    if (!ok) throw ValidationError(field, constraint);
}

constexpr double kScvExponentialTol = 1e-12;

double checked_rate(const FlowSet& flows, std::size_t flow) {
    if (flow >= flows.rates.size()) throw IndexOutOfRange("flow", flow);
    return flows.rates[flow];
}

const SatelliteNode& checked_node(const SatelliteChain& chain, std::size_t node) {
    if (node >= chain.nodes.size()) throw IndexOutOfRange("node", node);
    return chain.nodes[node];
}

double ipow(double base, int exp) {
    double out = 1.0;
    for (int i = 0; i < exp; ++i) out *= base;
    return out;
}

}  // namespace

void ServiceSpec::validate() const {
    require(rate > 0.0, "service.rate", "must be > 0");
    require(scv > 0.0, "service.scv", "must be > 0");
}

double ServiceSpec::mgf(double s) const {
    validate();
    if (dist == ServiceDistribution::exponential) {
        if (s >= rate) throw PoleAt(s);
        return rate / (rate - s);
    }
    const double shape = 1.0 / scv;
    const double scale = scv / rate;
    if (s >= 1.0 / scale) throw PoleAt(s);
    return std::pow(1.0 - scale * s, -shape);
}

double ServiceSpec::sample(RandomStream& rng) const {
    if (dist == ServiceDistribution::exponential) return rng.exponential(rate);
    return rng.gamma(1.0 / scv, scv / rate);
}

double FlowSet::total() const {
    return std::accumulate(rates.begin(), rates.end(), 0.0);
}

void FlowSet::validate() const {
    require(!rates.empty(), "flows.rates", "must be non-empty");
    for (double r : rates) require(r > 0.0, "flows.rates", "every rate must be > 0");
    require(p_success > 0.0 && p_success < 1.0, "flows.p_success",
            "must be strictly inside (0,1)");
    service.validate();
}

void FlowSet::validate_utilization() const {
    require(utilization() < 1.0, "flows.utilization", "total()/rate must be < 1");
}

void SatelliteChain::validate() const {
    require(!nodes.empty(), "chain.nodes", "must be non-empty");
    require(p_a >= 0.0 && p_a <= 1.0, "chain.p_a", "must be in [0,1]");
    for (const SatelliteNode& n : nodes) {
        require(n.mu > 0.0, "chain.mu", "must be > 0");
        require(n.eps >= 0.0 && n.eps <= 1.0, "chain.eps", "must be in [0,1]");
        require(n.theta >= 0.0, "chain.theta", "must be >= 0");
        require(n.psi >= 0.0 && n.psi <= 1.0, "chain.psi", "must be in [0,1]");
        require(n.multiplicity >= 1, "chain.multiplicity", "must be >= 1");
    }
}

DepartureMoments mm11_departure_moments(const FlowSet& flows, std::size_t flow) {
    flows.validate();
    const double xi_i = checked_rate(flows, flow);
    if (std::abs(flows.service.scv - 1.0) > kScvExponentialTol) {
        throw NotExponential(flows.service.scv);
    }
    const double xi = flows.total();
    const double mu = flows.service.rate;
    const double p = flows.p_success;
    const double mean = (xi * (1.0 - p) + mu) / (mu * xi_i * p);
    const double num = 2.0 * (xi * p + mu) * (xi * p + mu) - 2.0 * mu * xi_i * p * p;
    const double den = (1.0 - p) * (1.0 - p) * (mu * xi_i) * (mu * xi_i);
    return DepartureMoments{mean, num / den};
}

double mm11_average_aoi(const FlowSet& flows, std::size_t flow) {
    const DepartureMoments m = mm11_departure_moments(flows, flow);
    return flows.service.first_moment() + m.second / (2.0 * m.mean);
}

double mgf_departure_mm11(double s, const FlowSet& flows, std::size_t flow) {
    flows.validate();
    const double xi_i = checked_rate(flows, flow);
    if (std::abs(flows.service.scv - 1.0) > kScvExponentialTol) {
        throw NotExponential(flows.service.scv);
    }
    const double xi = flows.total();
    const double mu = flows.service.rate;
    const double p = flows.p_success;
    const double den = s * s * p - (xi * p + mu) * s + mu * xi_i;
    const double scale = std::abs(s * s * p) + std::abs((xi * p + mu) * s) + mu * xi_i;
    if (std::abs(den) <= 1e-12 * scale) throw PoleAt(s);
    return mu * xi_i * (1.0 - p) / den;
}

double mgf_departure_mg11(double s, const FlowSet& flows, std::size_t flow) {
    flows.validate();
    const double xi_i = checked_rate(flows, flow);
    const double xi = flows.total();
    const double p = flows.p_success;
    const double service_mgf = flows.service.mgf(s);
    const double den = (xi - s * p * p) - (xi - xi_i) * service_mgf * p * (1.0 - p);
    const double scale =
        std::abs(xi - s * p * p) + std::abs((xi - xi_i) * service_mgf * p * (1.0 - p));
    if (std::abs(den) <= 1e-12 * std::max(scale, 1.0)) throw PoleAt(s);
    return p * xi_i * service_mgf / den;
}

double mg11_average_aoi(const FlowSet& flows, std::size_t flow) {
    flows.validate();
    const double xi_i = checked_rate(flows, flow);
    const double xi = flows.total();
    const double p = flows.p_success;
    const double et = flows.service.first_moment();
    const double et2 = flows.service.second_moment();
    return (xi * et + 1.0) / (xi_i * (1.0 - p) * p) +
           xi * et2 * p * p / (2.0 * (xi * p * et + 1.0));
}

double mg11_peak_aoi(const FlowSet& flows, std::size_t flow) {
    flows.validate();
    const double xi_i = checked_rate(flows, flow);
    const double xi = flows.total();
    const double p = flows.p_success;
    const double et = flows.service.first_moment();
    return ((xi * p + xi_i) * et + 1.0) / (xi_i * p);
}

double cross_traffic_rate(const SatelliteChain& chain, std::size_t node) {
    chain.validate();
    checked_node(chain, node);
    double sum = 0.0;
    for (std::size_t j = 0; j <= node; ++j) {
        double survive = 1.0;
        for (std::size_t i = j; i < node; ++i) {
            survive *= (1.0 - chain.nodes[i].psi) * (1.0 - chain.nodes[i].eps);
        }
        sum += chain.nodes[j].theta * survive;
    }
    return sum;
}

double chain_success_probability(const SatelliteChain& chain, std::size_t hops) {
    chain.validate();
    if (hops < 1 || hops > chain.hop_count()) throw IndexOutOfRange("hops", hops);
    double p = chain.p_a;
    for (std::size_t i = 0; i < hops; ++i) p *= 1.0 - chain.nodes[i].eps;
    return p;
}

double node_arrival_rate(const SatelliteChain& chain, std::size_t node, double source_rate) {
    checked_node(chain, node);
    return chain_success_probability(chain, node + 1) * source_rate +
           cross_traffic_rate(chain, node);
}

double node_response_rate(const SatelliteChain& chain, std::size_t node, double source_rate) {
    return checked_node(chain, node).mu - node_arrival_rate(chain, node, source_rate);
}

std::optional<std::size_t> first_unstable_node(const SatelliteChain& chain,
                                               double source_rate) {
    for (std::size_t j = 0; j < chain.hop_count(); ++j) {
        if (node_response_rate(chain, j, source_rate) <= 0.0) return j;
    }
    return std::nullopt;
}

double chain_aoi_approx(const SatelliteChain& chain, double source_rate) {
    chain.validate();
    require(source_rate > 0.0, "source_rate", "must be > 0");
    const double pr = chain_success_probability(chain, chain.hop_count());
    if (pr <= 0.0) throw ZeroSuccessProbability();
    if (auto bad = first_unstable_node(chain, source_rate)) throw Unstable(*bad);
    double sum = 0.0;
    for (std::size_t j = 0; j < chain.hop_count(); ++j) {
        const double alpha = node_response_rate(chain, j, source_rate);
        sum += 1.0 / (pr * ipow(alpha, chain.nodes[j].multiplicity));
    }
    return sum + 1.0 / (source_rate * pr) +
           (1.0 - pr) * (1.0 - pr) / (source_rate * pr * pr);
}

double chain_aoi_upper(const SatelliteChain& chain, double source_rate) {
    chain.validate();
    require(source_rate > 0.0, "source_rate", "must be > 0");
    const double pr = chain_success_probability(chain, chain.hop_count());
    if (pr <= 0.0) throw ZeroSuccessProbability();
    if (auto bad = first_unstable_node(chain, source_rate)) throw Unstable(*bad);
    const double xi = source_rate;
    double waiting = 0.0;
    double retry = 0.0;
    for (std::size_t j = 0; j < chain.hop_count(); ++j) {
        const double mu_n = ipow(chain.nodes[j].mu, chain.nodes[j].multiplicity);
        const double alpha_n =
            ipow(node_response_rate(chain, j, source_rate), chain.nodes[j].multiplicity);
        waiting += (1.0 / xi) * (mu_n + alpha_n) / (mu_n * alpha_n);
        retry += (1.0 - pr) / (pr * alpha_n * xi);
    }
    const double tail = (1.0 - pr) / (xi * pr);
    return xi * (waiting + retry + 1.0 / (xi * xi * pr) + tail * tail);
}

}  // namespace aoi
