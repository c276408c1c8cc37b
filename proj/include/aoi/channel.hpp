#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aoi/spatial.hpp"

namespace aoi {

// Rayleigh-faded path-loss channel. theta is the SINR success threshold on a
// linear scale; dB conversion happens at the CLI boundary.
struct ChannelConfig {
    double alpha = 4.0;   // path-loss exponent, > 2
    double noise = 0.1;   // normalized noise power W
    double theta = 1.0;   // linear SINR threshold

    void validate() const;
};

// One channel realization: serving link plus a set of active interferers,
// all with unit-mean exponential fading draws.
struct LinkSample {
    double serving_distance = 1.0;
    double serving_fade = 1.0;
    std::vector<double> interferer_distances;
    std::vector<double> interferer_fades;

    void validate() const;
};

struct SuccessEstimate {
    double p_hat = 0.0;
    double ci_halfwidth = 0.0;
};

// h0 * r0^-alpha / (sum_i h_i * r_i^-alpha + W). Throws DegenerateChannel when
// W = 0 and there are no interferers.
double sinr(const LinkSample& link, const ChannelConfig& cfg);

// Interference-free success probability exp(-theta * W * r0^alpha); used as
// the closed-form oracle for the Monte Carlo estimator.
double noise_only_success_probability(double r0, const ChannelConfig& cfg);

// Monte Carlo estimate of P{SINR > theta} for `source` transmitting to its
// assigned UAV. Every other ground node interferes independently per sample:
// active with probability `active_prob` if given, otherwise with its own
// cell's scheduling probability 1/N_j. Returns the estimate and its 95%
// normal-approximation CI halfwidth; deterministic given seed.
SuccessEstimate estimate_success_probability(const PointPattern& ground,
                                             const PointPattern& uavs,
                                             const AssociationMap& assoc,
                                             std::size_t source,
                                             const ChannelConfig& cfg,
                                             std::optional<double> active_prob,
                                             std::size_t n_samples,
                                             std::uint64_t seed);

}  // namespace aoi
