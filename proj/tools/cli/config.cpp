#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "searcheq/errors.hpp"

namespace searcheq::cli {

namespace {

using nlohmann::json;

void require_object(const json& j, std::string_view where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
}

void reject_unknown(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
    require_object(j, where);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            std::string prefix = where.empty() ? "" : std::string(where) + ".";
            throw ConfigError("unknown key '" + prefix + it.key() + "'");
        }
    }
}

template <class T>
T get(const json& j, const char* key, std::string_view where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("missing or ill-typed key '" + std::string(where) + "." + key + "'");
    }
}

template <class T>
void get_optional(const json& j, const char* key, std::string_view where, T& out) {
    if (j.contains(key)) out = get<T>(j, key, where);
}

Protocol parse_model(const std::string& s) {
    if (s == "sequential") return Protocol::sequential;
    if (s == "continuous-cost") return Protocol::continuous_cost;
    if (s == "noisy") return Protocol::noisy;
    throw ConfigError("model must be sequential, continuous-cost or noisy (got '" + s + "')");
}

std::vector<Regime> parse_regimes(const std::string& s) {
    if (s == "linear") return {Regime::linear};
    if (s == "two-part") return {Regime::two_part};
    if (s == "both") return {Regime::linear, Regime::two_part};
    throw ConfigError("regime must be linear, two-part or both (got '" + s + "')");
}

template <class Parse>
auto wrap_parse(Parse&& parse, const std::string& name) {
    try {
        return parse(name);
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    } catch (const InvalidDemand& e) {
        throw ConfigError(e.what());
    }
}

} // namespace

RunConfig parse_config(const json& doc) {
    reject_unknown(doc, "", {"model", "regime", "demand", "market", "noisy", "cost_distribution",
                             "solver", "verify", "sweep", "simulation", "output", "seed"});
    RunConfig c;
    if (doc.contains("model")) c.model = parse_model(get<std::string>(doc, "model", "config"));
    if (doc.contains("regime")) c.regimes = parse_regimes(get<std::string>(doc, "regime", "config"));

    if (doc.contains("demand")) {
        const json& d = doc["demand"];
        reject_unknown(d, "demand", {"family", "params"});
        c.demand_family = wrap_parse([](const std::string& s) { return parse_demand_family(s); },
                                     get<std::string>(d, "family", "demand"));
        c.demand_params = get<std::vector<double>>(d, "params", "demand");
    }
    if (doc.contains("market")) {
        const json& m = doc["market"];
        reject_unknown(m, "market", {"n", "lambda", "s"});
        MarketParams p;
        p.n = get<int>(m, "n", "market");
        p.lambda = get<double>(m, "lambda", "market");
        p.s = get<double>(m, "s", "market");
        c.market = p;
    }
    if (doc.contains("noisy")) {
        const json& m = doc["noisy"];
        reject_unknown(m, "noisy", {"mu", "s"});
        c.noisy = NoisyParams{get<std::vector<double>>(m, "mu", "noisy"), get<double>(m, "s", "noisy")};
    }
    if (doc.contains("cost_distribution")) {
        const json& g = doc["cost_distribution"];
        reject_unknown(g, "cost_distribution", {"family", "params"});
        c.cost_family = wrap_parse([](const std::string& s) { return parse_cost_family(s); },
                                   get<std::string>(g, "family", "cost_distribution"));
        c.cost_params = get<std::vector<double>>(g, "params", "cost_distribution");
    }
    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        reject_unknown(s, "solver", {"root_tol", "quad_tol"});
        get_optional(s, "root_tol", "solver", c.solver.root_tol);
        get_optional(s, "quad_tol", "solver", c.solver.quad_tol);
        if (!(c.solver.root_tol > 0.0) || !(c.solver.quad_tol > 0.0)) {
            throw ConfigError("solver tolerances must be positive");
        }
    }
    if (doc.contains("verify")) {
        const json& v = doc["verify"];
        reject_unknown(v, "verify", {"tolerance_scale", "cdf_table"});
        get_optional(v, "tolerance_scale", "verify", c.tolerance_scale);
        if (v.contains("cdf_table")) c.cdf_table = get<std::string>(v, "cdf_table", "verify");
    }
    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        reject_unknown(s, "sweep", {"axes", "threads"});
        c.has_sweep = true;
        get_optional(s, "threads", "sweep", c.sweep_threads);
        if (c.sweep_threads < 1) throw ConfigError("sweep.threads must be >= 1");
        if (!s.contains("axes") || !s["axes"].is_array()) throw ConfigError("sweep.axes must be an array");
        for (const json& a : s["axes"]) {
            reject_unknown(a, "sweep.axes[]", {"name", "values"});
            SweepAxis axis{get<std::string>(a, "name", "sweep.axes[]"),
                           get<std::vector<double>>(a, "values", "sweep.axes[]")};
            static constexpr std::string_view names[] = {"lambda", "n", "s", "s_rel", "g0", "mu1"};
            if (std::find(std::begin(names), std::end(names), axis.name) == std::end(names)) {
                throw ConfigError("unknown sweep axis '" + axis.name + "'");
            }
            c.axes.push_back(std::move(axis));
        }
    }
    if (doc.contains("simulation")) {
        const json& s = doc["simulation"];
        reject_unknown(s, "simulation", {"replications", "consumers_per_replication", "threads",
                                         "max_rounds", "write_replications"});
        get_optional(s, "replications", "simulation", c.sim.replications);
        get_optional(s, "consumers_per_replication", "simulation", c.sim.consumers_per_replication);
        get_optional(s, "threads", "simulation", c.sim.threads);
        get_optional(s, "max_rounds", "simulation", c.sim.max_rounds);
        get_optional(s, "write_replications", "simulation", c.write_replications);
        c.sim.validate();
    }
    if (doc.contains("output")) {
        const json& o = doc["output"];
        reject_unknown(o, "output", {"dir", "cdf_rows", "emit_plot_data"});
        get_optional(o, "dir", "output", c.out_dir);
        get_optional(o, "cdf_rows", "output", c.cdf_rows);
        get_optional(o, "emit_plot_data", "output", c.emit_plot_data);
        if (c.cdf_rows < 2) throw ConfigError("output.cdf_rows must be >= 2");
    }
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_unsigned()) throw ConfigError("seed must be a non-negative 64-bit integer");
        c.sim.master_seed = s.get<std::uint64_t>();
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

void RunConfig::validate() const {
    (void)surplus();
    switch (model) {
    case Protocol::sequential:
        if (!market) throw ConfigError("model sequential needs a 'market' section");
        market->validate();
        break;
    case Protocol::noisy:
        if (!noisy) throw ConfigError("model noisy needs a 'noisy' section");
        noisy->validate();
        break;
    case Protocol::continuous_cost:
        if (!cost_family) throw ConfigError("model continuous-cost needs a 'cost_distribution' section");
        (void)cost_distribution();
        break;
    }
}

SurplusMap RunConfig::surplus() const { return SurplusMap(make_demand(demand_family, demand_params)); }

SearchCostDist RunConfig::cost_distribution() const {
    if (!cost_family) throw ConfigError("no 'cost_distribution' section");
    return SearchCostDist::make(*cost_family, cost_params);
}

} // namespace searcheq::cli
