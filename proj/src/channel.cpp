#include "aoi/channel.hpp"

#include <cmath>

#include "aoi/random.hpp"

namespace aoi {

namespace {

constexpr std::uint64_t kChannelStream = 0xC4A7;

void require(bool ok, const char* field, const char* constraint) {
    if (!ok) throw ValidationError(field, constraint);
}

}  // namespace

void ChannelConfig::validate() const {
    require(alpha > 2.0, "channel.alpha", "must be > 2");
    require(noise >= 0.0, "channel.noise", "must be >= 0");
    require(theta > 0.0, "channel.theta", "must be > 0");
}

void LinkSample::validate() const {
    require(serving_distance > 0.0, "link.serving_distance", "must be > 0");
    require(serving_fade >= 0.0, "link.serving_fade", "must be >= 0");
    require(interferer_distances.size() == interferer_fades.size(),
            "link.interferers", "distance and fade lists must match");
    for (double d : interferer_distances) {
        require(d > 0.0, "link.interferer_distances", "must be > 0");
    }
    for (double h : interferer_fades) {
        require(h >= 0.0, "link.interferer_fades", "must be >= 0");
    }
}

double sinr(const LinkSample& link, const ChannelConfig& cfg) {
    cfg.validate();
    link.validate();
    if (cfg.noise == 0.0 && link.interferer_distances.empty()) {
        throw DegenerateChannel();
    }
    double interference = 0.0;
    for (std::size_t i = 0; i < link.interferer_distances.size(); ++i) {
        interference +=
            link.interferer_fades[i] * std::pow(link.interferer_distances[i], -cfg.alpha);
    }
    const double signal = link.serving_fade * std::pow(link.serving_distance, -cfg.alpha);
    return signal / (interference + cfg.noise);
}

double noise_only_success_probability(double r0, const ChannelConfig& cfg) {
    cfg.validate();
    require(r0 > 0.0, "r0", "must be > 0");
    return std::exp(-cfg.theta * cfg.noise * std::pow(r0, cfg.alpha));
}

SuccessEstimate estimate_success_probability(const PointPattern& ground,
                                             const PointPattern& uavs,
                                             const AssociationMap& assoc,
                                             std::size_t source,
                                             const ChannelConfig& cfg,
                                             std::optional<double> active_prob,
                                             std::size_t n_samples,
                                             std::uint64_t seed) {
    cfg.validate();
    require(n_samples >= 1, "n_samples", "must be >= 1");
    if (source >= assoc.assignment.size()) throw UnassociatedSource(source);
    const std::size_t serving = assoc.assignment[source];
    const Point uav = uavs.points.at(serving);
    const double r0 = std::sqrt(squared_distance(ground.points[source], uav));

    // Per-node activity probability and distance to the serving UAV, fixed
    // for the whole estimate; fading and activity are redrawn per sample.
    std::vector<double> act;
    std::vector<double> loss;  // r^-alpha per potential interferer
    act.reserve(ground.size());
    loss.reserve(ground.size());
    for (std::size_t i = 0; i < ground.size(); ++i) {
        if (i == source) continue;
        const double p =
            active_prob ? *active_prob : scheduling_probability(assoc, assoc.assignment[i]);
        if (p <= 0.0) continue;
        act.push_back(p);
        loss.push_back(std::pow(std::sqrt(squared_distance(ground.points[i], uav)), -cfg.alpha));
    }

    const double signal_loss = std::pow(r0, -cfg.alpha);
    RandomStream rng(derive_seed(seed, {kChannelStream}));
    std::size_t successes = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        double interference = 0.0;
        for (std::size_t i = 0; i < act.size(); ++i) {
            if (rng.bernoulli(act[i])) {
                interference += rng.exponential(1.0) * loss[i];
            }
        }
        const double h0 = rng.exponential(1.0);
        const double denom = interference + cfg.noise;
        // No noise and no active interferer: SINR is unbounded, so any finite
        // threshold is exceeded.
        const bool ok = denom == 0.0 || h0 * signal_loss / denom > cfg.theta;
        if (ok) ++successes;
    }
    const double n = static_cast<double>(n_samples);
    const double p_hat = static_cast<double>(successes) / n;
    const double ci = 1.96 * std::sqrt(p_hat * (1.0 - p_hat) / n);
    return SuccessEstimate{p_hat, ci};
}

}  // namespace aoi
