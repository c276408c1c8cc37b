#include "aoi/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aoi/format.hpp"

namespace aoi {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

struct LineContext {
    const std::string& origin;
    std::size_t line;
};

double to_double(const LineContext& ctx, const std::string& tok) {
    if (auto v = parse_double(tok)) return *v;
    throw ParseError(ctx.origin, ctx.line, "not a number: '" + tok + "'");
}

std::vector<double> to_doubles(const LineContext& ctx, const std::vector<std::string>& toks) {
    std::vector<double> out;
    out.reserve(toks.size());
    for (const auto& t : toks) out.push_back(to_double(ctx, t));
    return out;
}

std::uint64_t to_u64(const LineContext& ctx, const std::string& tok) {
    const double v = to_double(ctx, tok);
    if (v < 0.0 || v != std::floor(v)) {
        throw ParseError(ctx.origin, ctx.line, "not a non-negative integer: '" + tok + "'");
    }
    return static_cast<std::uint64_t>(v);
}

double theta_db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double theta_linear_to_db(double lin) { return 10.0 * std::log10(lin); }

void resize_chain(SatelliteChain& chain, std::size_t n) {
    if (chain.nodes.size() < n) chain.nodes.resize(n);
}

}  // namespace

std::vector<double> FlowTemplate::resolved_rates() const {
    if (explicit_rates) return *explicit_rates;
    std::vector<double> rates(count, 0.0);
    if (count == 0) return rates;
    rates[0] = rate1;
    if (count > 1) {
        const double rest = (total_rate - rate1) / static_cast<double>(count - 1);
        for (std::size_t i = 1; i < count; ++i) rates[i] = rest;
    }
    return rates;
}

FlowSet build_flow_set(const FlowTemplate& tpl) {
    FlowSet flows;
    flows.rates = tpl.resolved_rates();
    flows.p_success = tpl.success.fixed_value;
    flows.service.rate = tpl.mu;
    flows.service.scv = tpl.scv;
    flows.service.dist = tpl.dist;
    return flows;
}

void ScenarioConfig::validate() const {
    if (replications < 1) throw ValidationError("replications", "must be >= 1");
    if (!(horizon > 0.0)) throw ValidationError("horizon", "must be > 0");
    spatial.validate();
    window.validate();
    channel.validate();

    if (mode == Mode::multistream) {
        if (!flows) throw ValidationError("flows", "required for multistream mode");
        if (!flows->explicit_rates) {
            if (flows->count < 1) throw ValidationError("flows.count", "must be >= 1");
            if (!(flows->rate1 > 0.0)) throw ValidationError("flows.rate1", "must be > 0");
            if (flows->count > 1 && !(flows->total_rate > flows->rate1)) {
                throw ValidationError("flows.total_rate", "must exceed rate1");
            }
            if (flows->count == 1 && flows->total_rate != flows->rate1) {
                throw ValidationError("flows.total_rate", "must equal rate1 for a single flow");
            }
        }
        if (flows->model == AnalyticModel::mm11 && std::abs(flows->scv - 1.0) > 1e-12) {
            throw ValidationError("flows.model", "mm11 requires scv = 1");
        }
        if (!flows->success.estimated) {
            const double p = flows->success.fixed_value;
            if (!(p > 0.0 && p < 1.0)) {
                throw ValidationError("flows.success_prob", "fixed value must be in (0,1)");
            }
        }
        FlowSet probe = build_flow_set(*flows);
        if (flows->success.estimated) probe.p_success = 0.5;  // placeholder for validation
        probe.validate();
        probe.validate_utilization();
    } else {
        if (!chain) throw ValidationError("chain", "required for tandem mode");
        chain->chain.validate();
        if (!(chain->xi > 0.0)) throw ValidationError("chain.xi", "must be > 0");
    }

    if (sweep.parameter.empty()) throw ValidationError("sweep.parameter", "required");
    if (sweep.values.empty()) throw ValidationError("sweep.values", "must be non-empty");

    // Every sweep/family combination must itself produce a valid config.
    const auto check_point = [](const ScenarioConfig& cfg, double sweep_value) {
        ScenarioConfig probe = apply_parameter(cfg, cfg.sweep.parameter, sweep_value);
        if (probe.mode == Mode::multistream) {
            FlowSet fs = build_flow_set(*probe.flows);
            if (probe.flows->success.estimated) fs.p_success = 0.5;
            fs.validate();
            fs.validate_utilization();
        } else {
            probe.chain->chain.validate();
            if (!(probe.chain->xi > 0.0)) {
                throw ValidationError("chain.xi", "swept value must be > 0");
            }
        }
    };
    if (family) {
        if (family->values.empty()) throw ValidationError("family.values", "must be non-empty");
        for (double fv : family->values) {
            ScenarioConfig with_family = apply_parameter(*this, family->parameter, fv);
            for (double sv : sweep.values) check_point(with_family, sv);
        }
    } else {
        for (double sv : sweep.values) check_point(*this, sv);
    }
}

ScenarioConfig apply_parameter(ScenarioConfig cfg, const std::string& parameter,
                               double value) {
    const auto need_flows = [&]() -> FlowTemplate& {
        if (!cfg.flows) throw ValidationError(parameter, "scenario has no flows section");
        return *cfg.flows;
    };
    const auto need_chain = [&]() -> ChainTemplate& {
        if (!cfg.chain) throw ValidationError(parameter, "scenario has no chain section");
        return *cfg.chain;
    };
    if (parameter == "flows.rate1") {
        FlowTemplate& f = need_flows();
        if (f.explicit_rates) {
            throw ValidationError(parameter, "requires the count/total_rate form");
        }
        f.rate1 = value;
    } else if (parameter == "flows.mu") {
        need_flows().mu = value;
    } else if (parameter == "flows.scv") {
        need_flows().scv = value;
    } else if (parameter == "flows.p_success") {
        FlowTemplate& f = need_flows();
        f.success.estimated = false;
        f.success.fixed_value = value;
    } else if (parameter == "chain.xi") {
        need_chain().xi = value;
    } else if (parameter == "chain.p_a") {
        need_chain().chain.p_a = value;
    } else if (parameter == "chain.hops") {
        ChainTemplate& c = need_chain();
        if (value < 1.0 || value != std::floor(value) ||
            value > static_cast<double>(c.chain.nodes.size())) {
            throw ValidationError(parameter, "must be an integer in [1, node count]");
        }
        c.chain.nodes.resize(static_cast<std::size_t>(value));
    } else {
        throw ValidationError("parameter", "unknown sweep parameter: " + parameter);
    }
    return cfg;
}

std::vector<std::pair<std::string, ScenarioConfig>> expand_family(const ScenarioConfig& cfg) {
    std::vector<std::pair<std::string, ScenarioConfig>> out;
    if (!cfg.family) {
        out.emplace_back("", cfg);
        return out;
    }
    const std::string short_name = [&] {
        const auto dot = cfg.family->parameter.rfind('.');
        return dot == std::string::npos ? cfg.family->parameter
                                        : cfg.family->parameter.substr(dot + 1);
    }();
    for (double v : cfg.family->values) {
        ScenarioConfig applied = apply_parameter(cfg, cfg.family->parameter, v);
        applied.family.reset();
        out.emplace_back(short_name + "=" + fmt_double(v), applied);
    }
    return out;
}

namespace {

enum class Section { top, spatial, channel, flows, chain, sweep, family };

struct Parser {
    explicit Parser(const std::string& origin) : origin(origin) {}

    const std::string& origin;
    ScenarioConfig cfg;
    Section section = Section::top;
    bool saw_flows = false;
    bool saw_chain = false;
    bool saw_family = false;
    FlowTemplate flows;
    ChainTemplate chain;
    SweepSpec family;

    void line(std::size_t line_no, const std::string& raw) {
        std::string text = raw;
        if (const auto hash = text.find('#'); hash != std::string::npos) {
            text.erase(hash);
        }
        text = trim(text);
        if (text.empty()) return;
        const LineContext ctx{origin, line_no};

        if (text.front() == '[') {
            if (text.back() != ']') throw ParseError(origin, line_no, "malformed section header");
            const std::string name = trim(text.substr(1, text.size() - 2));
            if (name == "spatial") section = Section::spatial;
            else if (name == "channel") section = Section::channel;
            else if (name == "flows") { section = Section::flows; saw_flows = true; }
            else if (name == "chain") { section = Section::chain; saw_chain = true; }
            else if (name == "sweep") section = Section::sweep;
            else if (name == "family") { section = Section::family; saw_family = true; }
            else throw ParseError(origin, line_no, "unknown section: [" + name + "]");
            return;
        }

        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ParseError(origin, line_no, "expected key = value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError(origin, line_no, "expected key = value");
        }
        const std::vector<std::string> toks = split_ws(value);

        switch (section) {
            case Section::top: top_key(ctx, key, value); break;
            case Section::spatial: spatial_key(ctx, key, value); break;
            case Section::channel: channel_key(ctx, key, value); break;
            case Section::flows: flows_key(ctx, key, value, toks); break;
            case Section::chain: chain_key(ctx, key, value, toks); break;
            case Section::sweep: sweep_key(ctx, key, value, toks, cfg.sweep); break;
            case Section::family: sweep_key(ctx, key, value, toks, family); break;
        }
    }

    void top_key(const LineContext& ctx, const std::string& key, const std::string& value) {
        if (key == "mode") {
            if (value == "multistream") cfg.mode = Mode::multistream;
            else if (value == "tandem") cfg.mode = Mode::tandem;
            else throw ParseError(ctx.origin, ctx.line, "mode must be multistream or tandem");
        } else if (key == "replications") {
            cfg.replications = static_cast<std::size_t>(to_u64(ctx, value));
        } else if (key == "horizon") {
            cfg.horizon = to_double(ctx, value);
        } else if (key == "root_seed") {
            cfg.root_seed = to_u64(ctx, value);
        } else {
            throw ParseError(ctx.origin, ctx.line, "unknown key: " + key);
        }
    }

    void spatial_key(const LineContext& ctx, const std::string& key, const std::string& value) {
        SpatialConfig& s = cfg.spatial;
        if (key == "m1") s.m1 = to_double(ctx, value);
        else if (key == "lambda1") s.lambda1 = to_double(ctx, value);
        else if (key == "m2") s.m2 = to_double(ctx, value);
        else if (key == "lambda_p2") s.lambda_p2 = to_double(ctx, value);
        else if (key == "lambda_c2") s.lambda_c2 = to_double(ctx, value);
        else if (key == "r_c") s.r_c = to_double(ctx, value);
        else if (key == "lambda_a") s.lambda_a = to_double(ctx, value);
        else if (key == "window_width") cfg.window.x_max = cfg.window.x_min + to_double(ctx, value);
        else if (key == "window_height") cfg.window.y_max = cfg.window.y_min + to_double(ctx, value);
        else throw ParseError(ctx.origin, ctx.line, "unknown key: spatial." + key);
    }

    void channel_key(const LineContext& ctx, const std::string& key, const std::string& value) {
        if (key == "alpha") cfg.channel.alpha = to_double(ctx, value);
        else if (key == "noise") cfg.channel.noise = to_double(ctx, value);
        else if (key == "theta_db") cfg.channel.theta = theta_db_to_linear(to_double(ctx, value));
        else throw ParseError(ctx.origin, ctx.line, "unknown key: channel." + key);
    }

    void flows_key(const LineContext& ctx, const std::string& key, const std::string& value,
                   const std::vector<std::string>& toks) {
        if (key == "count") flows.count = static_cast<std::size_t>(to_u64(ctx, value));
        else if (key == "total_rate") flows.total_rate = to_double(ctx, value);
        else if (key == "rate1") flows.rate1 = to_double(ctx, value);
        else if (key == "rates") flows.explicit_rates = to_doubles(ctx, toks);
        else if (key == "mu") flows.mu = to_double(ctx, value);
        else if (key == "scv") flows.scv = to_double(ctx, value);
        else if (key == "dist") {
            if (value == "exponential") flows.dist = ServiceDistribution::exponential;
            else if (value == "gamma") flows.dist = ServiceDistribution::gamma;
            else throw ParseError(ctx.origin, ctx.line, "dist must be exponential or gamma");
        } else if (key == "model") {
            if (value == "mm11") flows.model = AnalyticModel::mm11;
            else if (value == "mg11") flows.model = AnalyticModel::mg11;
            else throw ParseError(ctx.origin, ctx.line, "model must be mm11 or mg11");
        } else if (key == "success_prob") {
            if (value == "estimated") {
                flows.success.estimated = true;
            } else if (toks.size() == 2 && toks[0] == "fixed") {
                flows.success.estimated = false;
                flows.success.fixed_value = to_double(ctx, toks[1]);
            } else {
                throw ParseError(ctx.origin, ctx.line,
                                 "success_prob must be 'fixed P' or 'estimated'");
            }
        } else {
            throw ParseError(ctx.origin, ctx.line, "unknown key: flows." + key);
        }
    }

    void chain_key(const LineContext& ctx, const std::string& key, const std::string& value,
                   const std::vector<std::string>& toks) {
        if (key == "xi") { chain.xi = to_double(ctx, value); return; }
        if (key == "p_a") { chain.chain.p_a = to_double(ctx, value); return; }
        const std::vector<double> vals = to_doubles(ctx, toks);
        resize_chain(chain.chain, vals.size());
        if (key == "mu") {
            for (std::size_t i = 0; i < vals.size(); ++i) chain.chain.nodes[i].mu = vals[i];
        } else if (key == "eps") {
            for (std::size_t i = 0; i < vals.size(); ++i) chain.chain.nodes[i].eps = vals[i];
        } else if (key == "theta") {
            for (std::size_t i = 0; i < vals.size(); ++i) chain.chain.nodes[i].theta = vals[i];
        } else if (key == "psi") {
            for (std::size_t i = 0; i < vals.size(); ++i) chain.chain.nodes[i].psi = vals[i];
        } else if (key == "multiplicity") {
            for (std::size_t i = 0; i < vals.size(); ++i) {
                if (vals[i] < 1.0 || vals[i] != std::floor(vals[i])) {
                    throw ParseError(ctx.origin, ctx.line, "multiplicity must be integers >= 1");
                }
                chain.chain.nodes[i].multiplicity = static_cast<int>(vals[i]);
            }
        } else {
            throw ParseError(ctx.origin, ctx.line, "unknown key: chain." + key);
        }
    }

    void sweep_key(const LineContext& ctx, const std::string& key, const std::string& value,
                   const std::vector<std::string>& toks, SweepSpec& spec) {
        if (key == "parameter") spec.parameter = value;
        else if (key == "values") spec.values = to_doubles(ctx, toks);
        else throw ParseError(ctx.origin, ctx.line, "unknown key: " + key);
    }

    ScenarioConfig finish() {
        if (saw_flows) cfg.flows = flows;
        if (saw_chain) cfg.chain = chain;
        if (saw_family) cfg.family = family;
        cfg.validate();
        return cfg;
    }
};

}  // namespace

ScenarioConfig parse_scenario(std::istream& in, const std::string& origin) {
    Parser parser(origin);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        parser.line(++line_no, raw);
    }
    ScenarioConfig cfg = parser.finish();
    cfg.name = origin;
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    ScenarioConfig cfg = parse_scenario(in, path);
    cfg.name = std::filesystem::path(path).stem().string();
    return cfg;
}

void write_scenario(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << "mode = " << (cfg.mode == Mode::multistream ? "multistream" : "tandem") << '\n'
        << "replications = " << cfg.replications << '\n'
        << "horizon = " << fmt_double(cfg.horizon) << '\n'
        << "root_seed = " << cfg.root_seed << '\n';

    out << "\n[spatial]\n"
        << "m1 = " << fmt_double(cfg.spatial.m1) << '\n'
        << "lambda1 = " << fmt_double(cfg.spatial.lambda1) << '\n'
        << "m2 = " << fmt_double(cfg.spatial.m2) << '\n'
        << "lambda_p2 = " << fmt_double(cfg.spatial.lambda_p2) << '\n'
        << "lambda_c2 = " << fmt_double(cfg.spatial.lambda_c2) << '\n'
        << "r_c = " << fmt_double(cfg.spatial.r_c) << '\n'
        << "lambda_a = " << fmt_double(cfg.spatial.lambda_a) << '\n'
        << "window_width = " << fmt_double(cfg.window.x_max - cfg.window.x_min) << '\n'
        << "window_height = " << fmt_double(cfg.window.y_max - cfg.window.y_min) << '\n';

    out << "\n[channel]\n"
        << "alpha = " << fmt_double(cfg.channel.alpha) << '\n'
        << "noise = " << fmt_double(cfg.channel.noise) << '\n'
        << "theta_db = " << fmt_double(theta_linear_to_db(cfg.channel.theta)) << '\n';

    if (cfg.flows) {
        const FlowTemplate& f = *cfg.flows;
        out << "\n[flows]\n";
        if (f.explicit_rates) {
            out << "rates =";
            for (double r : *f.explicit_rates) out << ' ' << fmt_double(r);
            out << '\n';
        } else {
            out << "count = " << f.count << '\n'
                << "total_rate = " << fmt_double(f.total_rate) << '\n'
                << "rate1 = " << fmt_double(f.rate1) << '\n';
        }
        out << "mu = " << fmt_double(f.mu) << '\n'
            << "scv = " << fmt_double(f.scv) << '\n'
            << "dist = " << (f.dist == ServiceDistribution::gamma ? "gamma" : "exponential")
            << '\n'
            << "model = " << (f.model == AnalyticModel::mg11 ? "mg11" : "mm11") << '\n';
        if (f.success.estimated) {
            out << "success_prob = estimated\n";
        } else {
            out << "success_prob = fixed " << fmt_double(f.success.fixed_value) << '\n';
        }
    }

    if (cfg.chain) {
        const ChainTemplate& c = *cfg.chain;
        out << "\n[chain]\n"
            << "xi = " << fmt_double(c.xi) << '\n'
            << "p_a = " << fmt_double(c.chain.p_a) << '\n';
        const auto emit_list = [&](const char* key, auto member) {
            out << key << " =";
            for (const SatelliteNode& n : c.chain.nodes) out << ' ' << fmt_double(member(n));
            out << '\n';
        };
        emit_list("mu", [](const SatelliteNode& n) { return n.mu; });
        emit_list("eps", [](const SatelliteNode& n) { return n.eps; });
        emit_list("theta", [](const SatelliteNode& n) { return n.theta; });
        emit_list("psi", [](const SatelliteNode& n) { return n.psi; });
        emit_list("multiplicity",
                  [](const SatelliteNode& n) { return static_cast<double>(n.multiplicity); });
    }

    out << "\n[sweep]\n"
        << "parameter = " << cfg.sweep.parameter << '\n'
        << "values =";
    for (double v : cfg.sweep.values) out << ' ' << fmt_double(v);
    out << '\n';

    if (cfg.family) {
        out << "\n[family]\n"
            << "parameter = " << cfg.family->parameter << '\n'
            << "values =";
        for (double v : cfg.family->values) out << ' ' << fmt_double(v);
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace aoi
