#pragma once

#include <string_view>
#include <vector>

#include "searcheq/demand.hpp"
#include "searcheq/welfare.hpp"

namespace searcheq {

enum class CostFamily {
    uniform,           // params: (c_bar)
    exponential,       // params: (rate); c_bar = infinity
    truncated_normal,  // params: (mean, sd) on [0, inf), or (mean, sd, c_bar)
};

std::string_view to_string(CostFamily family);
CostFamily parse_cost_family(std::string_view name);

/// Log-concave search-cost distribution G on [0, c_bar].
class SearchCostDist {
public:
    /// Throws InvalidParameter on bad parameters or a failed log-concavity check.
    static SearchCostDist make(CostFamily family, std::vector<double> params);

    CostFamily family() const noexcept { return family_; }
    const std::vector<double>& params() const noexcept { return params_; }
    double c_bar() const noexcept { return c_bar_; }
    /// Density at zero.
    double g0() const noexcept { return g0_; }

    /// G(c); 0 for c <= 0, 1 for c >= c_bar.
    double cdf(double c) const;

private:
    SearchCostDist(CostFamily family, std::vector<double> params);

    CostFamily family_;
    std::vector<double> params_;
    double c_bar_ = 0.0;
    double g0_ = 0.0;
    double norm_ = 1.0; // truncated normal: Φ(c_bar') - Φ(-mean/sd)
};

struct StarEquilibrium {
    double value = 0.0;       // pi* or t*
    bool clamped = false;     // t* pinned at v(0)
    double argmax_gain = 0.0; // max over the deviation grid of objective - objective(star)
    double interval_high = 0.0; // upper end of the supportable continuum (pi_m or v(0))
};

/// t* = min(1/g0, v(0)), certified as the argmax of (1 - G[t - t*]) t on a
/// 2000-point grid over (0, v(0)].
StarEquilibrium solve_t_star(const SearchCostDist& g, const SurplusMap& m);

/// Unique pi in (0, pi_m) with pi (-v'(pi)) = 1/g0, certified as the
/// argmax of (1 - G[v(pi*) - v(pi)]) pi on a 2000-point grid over (0, pi_m].
StarEquilibrium solve_pi_star(const SearchCostDist& g, const SurplusMap& m);

/// pi* for an arbitrary density at zero.
double pi_star_for_g0(double g0, const SurplusMap& m);

/// Fixed-point route: iterate t <- argmax_t (1 - G[t - t_k]) t with a grid
/// search refined by golden section, starting below the most competitive
/// equilibrium. Independent of the closed form; accurate to about 1e-8
/// because golden section resolves a flat maximum only to sqrt(epsilon).
double t_star_by_iteration(const SearchCostDist& g, const SurplusMap& m);
/// Same for pi* with objective (1 - G[v(pi_k) - v(pi)]) pi.
double pi_star_by_iteration(const SearchCostDist& g, const SurplusMap& m);

WelfareReport welfare_cont(const SearchCostDist& g, const SurplusMap& m);

struct CsSlopeCheck {
    double fd_linear = 0.0;         // finite-difference d v(pi*) / d g0
    double closed_linear = 0.0;     // v'(pi*) / (g0^2 (v'(pi*) + v''(pi*) pi*))
    double fd_nonlinear = 0.0;      // finite-difference d (v(0) - t*) / d g0
    double closed_nonlinear = 0.0;  // 1 / g0^2
    double residual_linear = 0.0;   // relative
    double residual_nonlinear = 0.0;
    bool linear_rises_slower = false;
};

/// Central differences in g0 with step h * g0. Throws DomainError when
/// g0 <= 1/v(0) (t* clamped, derivative formulas invalid).
CsSlopeCheck cs_slope_check(const SearchCostDist& g, const SurplusMap& m, double h = 1e-5);

} // namespace searcheq
