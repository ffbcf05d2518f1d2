#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "searcheq/demand.hpp"
#include "searcheq/extcost.hpp"
#include "searcheq/noisy.hpp"
#include "searcheq/simulate.hpp"
#include "searcheq/stahl.hpp"

namespace searcheq::cli {

struct SweepAxis {
    std::string name; // lambda, n, s, s_rel, g0, mu1
    std::vector<double> values;
};

struct RunConfig {
    Protocol model = Protocol::sequential;
    std::vector<Regime> regimes{Regime::linear, Regime::two_part};

    DemandFamily demand_family = DemandFamily::linear;
    std::vector<double> demand_params{1.0, 1.0};

    std::optional<MarketParams> market;
    std::optional<NoisyParams> noisy;
    std::optional<CostFamily> cost_family;
    std::vector<double> cost_params;

    SolverOptions solver;
    double tolerance_scale = 1.0;
    std::optional<std::string> cdf_table;

    std::vector<SweepAxis> axes;
    bool has_sweep = false;
    int sweep_threads = 1;

    SimConfig sim;
    bool write_replications = false;

    std::string out_dir = "out";
    int cdf_rows = 512;
    bool emit_plot_data = false;

    /// Demand, market, noisy and cost sections checked by their owning types.
    void validate() const;
    SurplusMap surplus() const;
    SearchCostDist cost_distribution() const;
};

/// Throws ConfigError on unknown keys, wrong types or missing sections.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

} // namespace searcheq::cli
