#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "searcheq/demand.hpp"
#include "searcheq/noisy.hpp"
#include "searcheq/stahl.hpp"

namespace searcheq {

struct RegimeWelfare {
    double total_surplus = 0.0;
    double industry_profit = 0.0;
    double consumer_surplus = 0.0;
};

struct WelfareReport {
    Protocol protocol = Protocol::sequential;
    RegimeWelfare linear;
    RegimeWelfare nonlinear;
    std::vector<std::pair<std::string, double>> parameters;

    /// nonlinear - linear, component-wise.
    RegimeWelfare delta() const {
        return {nonlinear.total_surplus - linear.total_surplus,
                nonlinear.industry_profit - linear.industry_profit,
                nonlinear.consumer_surplus - linear.consumer_surplus};
    }
};

using CdfFunction = std::function<double(double)>;

/// E[min of k i.i.d. draws] = lower + ∫_lower^upper (1 - F(x))^k dx.
/// Throws DomainError for an inverted or non-finite support or k < 1.
double expected_min(const CdfFunction& cdf, double lower, double upper, int k,
                    double abs_tol = 1e-10);

/// E[v(min of k revenue draws)] = v(upper) - ∫ v'(pi) (1 - (1 - F)^k) dpi,
/// integrated in price space where -v'(pi) dpi = q(p) dp.
double expected_surplus_of_min(const SurplusMap& m, const CdfFunction& cdf, double lower,
                               double upper, int k, double abs_tol = 1e-10);

/// Throws ParameterMismatch unless `fee` is two-part, `rev` linear, and both
/// were solved under `params` and `m`.
WelfareReport welfare_sequential(const FeeEquilibrium& fee, const RevenueEquilibrium& rev,
                                 const MarketParams& params, const SurplusMap& m);

WelfareReport welfare_noisy(const NoisyEquilibrium& fee, const NoisyEquilibrium& rev,
                            const NoisyParams& p, const SurplusMap& m);

struct CsBoundResiduals {
    /// v(upper_linear) - (v(0) - upper_fee); non-negative when the bound holds.
    double surplus_gap = 0.0;
    /// exact CS_L - [(n-1)/n (1-λ) v(pi_high) + (1 - (n-1)/n (1-λ)) v(pi_low)].
    double linear_cs_bound = 0.0;
    /// |pi_high/pi_low - t_high/t_low|
    double support_ratio_gap = 0.0;
    /// exact CS_NL - [λ v(0) + (1-λ)(v(0) - t_high)]; reported, not asserted.
    double nonlinear_cs_expression_gap = 0.0;
};

CsBoundResiduals cs_bound_checks(const FeeEquilibrium& fee, const RevenueEquilibrium& rev,
                                 const MarketParams& params, const SurplusMap& m);

} // namespace searcheq
