#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/channel.hpp"
#include "aoi/spatial.hpp"

namespace aoi {

enum class Mode { multistream, tandem };
enum class AnalyticModel { mm11, mg11 };

// Transmission-success probability source: a fixed scenario value or a Monte
// Carlo estimate from the spatial + channel layers.
struct SuccessProbSpec {
    bool estimated = false;
    double fixed_value = 0.5;
};

// Flow-set template. Rates are either given explicitly or derived from
// (count, total_rate, rate1) with the remainder split evenly over the other
// flows; only the derived form supports sweeping rate1 at fixed total.
struct FlowTemplate {
    std::size_t count = 3;
    double total_rate = 3.0;
    double rate1 = 1.0;
    std::optional<std::vector<double>> explicit_rates;
    double mu = 4.0;
    double scv = 1.0;
    ServiceDistribution dist = ServiceDistribution::exponential;
    AnalyticModel model = AnalyticModel::mm11;
    SuccessProbSpec success;

    std::vector<double> resolved_rates() const;
};

struct ChainTemplate {
    SatelliteChain chain;
    double xi = 1.0;  // source packet rate
};

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

// One experiment description: which queueing system to run, the templates it
// instantiates, the swept parameter, an optional curve family, and the
// replication policy.
struct ScenarioConfig {
    std::string name = "scenario";
    Mode mode = Mode::multistream;
    std::size_t replications = 20;
    double horizon = 1e5;
    std::uint64_t root_seed = 1;

    SpatialConfig spatial;
    Window window = Window::square(200.0);
    ChannelConfig channel;

    std::optional<FlowTemplate> flows;
    std::optional<ChainTemplate> chain;

    SweepSpec sweep;
    std::optional<SweepSpec> family;

    void validate() const;
};

// Parses and fully validates a scenario file (key = value lines grouped in
// [spatial]/[channel]/[flows]/[chain]/[sweep]/[family] sections). Throws
// ParseError with the offending line or ValidationError with the field.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(std::istream& in, const std::string& origin);

// Serializes a config back to the scenario format (used for the run metadata
// sidecar); load_scenario(write_scenario(cfg)) round-trips.
void write_scenario(const ScenarioConfig& cfg, const std::string& path);

// Returns a copy with one swept parameter applied. Supported paths:
// flows.rate1, flows.mu, flows.scv, flows.p_success, chain.xi, chain.p_a,
// chain.hops.
ScenarioConfig apply_parameter(ScenarioConfig cfg, const std::string& parameter,
                               double value);

// Resolves the family axis into (label, config) pairs; a family-less scenario
// yields one pair with an empty label.
std::vector<std::pair<std::string, ScenarioConfig>> expand_family(const ScenarioConfig& cfg);

// Instantiates the FlowSet from a template; an estimated success probability
// must have been resolved into fixed_value beforehand.
FlowSet build_flow_set(const FlowTemplate& tpl);

}  // namespace aoi
