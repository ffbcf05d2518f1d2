#include "searcheq/welfare.hpp"

#include <cmath>
#include <string>

#include "searcheq/errors.hpp"
#include "searcheq/numerics.hpp"

namespace searcheq {

namespace {

void check_support(double lower, double upper, int k) {
    if (!std::isfinite(lower) || !std::isfinite(upper) || upper < lower) {
        throw DomainError("malformed support [" + std::to_string(lower) + ", " +
                          std::to_string(upper) + "]");
    }
    if (k < 1) throw DomainError("number of draws must be >= 1");
}

void require_same_inputs(bool same, const char* what) {
    if (!same) throw ParameterMismatch(std::string("equilibria solved under different ") + what);
}

CdfFunction cdf_of(const SequentialEquilibrium& eq) {
    return [&eq](double x) { return eq.cdf_extended(x); };
}

CdfFunction cdf_of(const NoisyEquilibrium& eq) {
    return [&eq](double x) { return eq.cdf_extended(x); };
}

} // namespace

double expected_min(const CdfFunction& cdf, double lower, double upper, int k, double abs_tol) {
    check_support(lower, upper, k);
    if (upper == lower) return lower;
    auto survival = [&](double x) { return std::pow(1.0 - cdf(x), k); };
    return lower + numerics::integrate_adaptive_split_upper(survival, lower, upper, 1e-8,
                                                            {abs_tol, 60});
}

double expected_surplus_of_min(const SurplusMap& m, const CdfFunction& cdf, double lower,
                               double upper, int k, double abs_tol) {
    check_support(lower, upper, k);
    double v_upper = m.v(upper);
    if (upper == lower) return v_upper;
    const DemandCurve& d = m.demand();
    double p_low = m.price_for_revenue(lower);
    double p_high = m.price_for_revenue(upper);
    auto integrand = [&](double p) {
        double q = d.quantity(p);
        double cdf_min = 1.0 - std::pow(1.0 - cdf(q * p), k);
        return q * cdf_min;
    };
    (void)abs_tol;
    return v_upper + numerics::integrate_gauss_graded(integrand, p_low, p_high);
}

WelfareReport welfare_sequential(const FeeEquilibrium& fee, const RevenueEquilibrium& rev,
                                 const MarketParams& params, const SurplusMap& m) {
    require_same_inputs(fee.regime == Regime::two_part && rev.regime == Regime::linear, "regimes");
    require_same_inputs(fee.params == params && rev.params == params, "market parameters");
    require_same_inputs(fee.surplus == m && rev.surplus == m, "demand curves");
    const double lam = params.lambda;
    const int n = params.n;

    WelfareReport r;
    r.protocol = Protocol::sequential;

    auto fee_cdf_fn = cdf_of(fee);
    double fee_single = expected_min(fee_cdf_fn, fee.lower, fee.upper, 1);
    double fee_min = expected_min(fee_cdf_fn, fee.lower, fee.upper, n);
    r.nonlinear.total_surplus = m.v0();
    r.nonlinear.industry_profit = lam * fee_min + (1.0 - lam) * fee_single;
    r.nonlinear.consumer_surplus = r.nonlinear.total_surplus - r.nonlinear.industry_profit;

    auto rev_cdf_fn = cdf_of(rev);
    double rev_single = expected_min(rev_cdf_fn, rev.lower, rev.upper, 1);
    double rev_min = expected_min(rev_cdf_fn, rev.lower, rev.upper, n);
    double cs_single = expected_surplus_of_min(m, rev_cdf_fn, rev.lower, rev.upper, 1);
    double cs_min = expected_surplus_of_min(m, rev_cdf_fn, rev.lower, rev.upper, n);
    r.linear.industry_profit = lam * rev_min + (1.0 - lam) * rev_single;
    r.linear.consumer_surplus = lam * cs_min + (1.0 - lam) * cs_single;
    r.linear.total_surplus = r.linear.industry_profit + r.linear.consumer_surplus;

    r.parameters = {{"n", static_cast<double>(n)}, {"lambda", lam},       {"s", params.s},
                    {"t_high", fee.upper},         {"pi_high", rev.upper}};
    return r;
}

WelfareReport welfare_noisy(const NoisyEquilibrium& fee, const NoisyEquilibrium& rev,
                            const NoisyParams& p, const SurplusMap& m) {
    require_same_inputs(fee.regime == Regime::two_part && rev.regime == Regime::linear, "regimes");
    require_same_inputs(fee.params == p && rev.params == p, "noisy-search parameters");
    require_same_inputs(fee.surplus == m && rev.surplus == m, "demand curves");

    WelfareReport r;
    r.protocol = Protocol::noisy;
    auto fee_cdf_fn = cdf_of(fee);
    auto rev_cdf_fn = cdf_of(rev);
    double fee_paid = 0.0;
    double rev_paid = 0.0;
    double cs_linear = 0.0;
    for (int k = 1; k <= p.m(); ++k) {
        double w = p.mu_at(k);
        if (w == 0.0) continue;
        fee_paid += w * expected_min(fee_cdf_fn, fee.lower, fee.upper, k);
        rev_paid += w * expected_min(rev_cdf_fn, rev.lower, rev.upper, k);
        cs_linear += w * expected_surplus_of_min(m, rev_cdf_fn, rev.lower, rev.upper, k);
    }
    r.nonlinear.total_surplus = m.v0();
    r.nonlinear.industry_profit = fee_paid;
    r.nonlinear.consumer_surplus = m.v0() - fee_paid;
    r.linear.industry_profit = rev_paid;
    r.linear.consumer_surplus = cs_linear;
    r.linear.total_surplus = rev_paid + cs_linear;

    r.parameters = {{"m", static_cast<double>(p.m())}, {"mu1", p.mu_at(1)}, {"s", p.s},
                    {"t_high", fee.upper}, {"pi_high", rev.upper}};
    return r;
}

CsBoundResiduals cs_bound_checks(const FeeEquilibrium& fee, const RevenueEquilibrium& rev,
                                 const MarketParams& params, const SurplusMap& m) {
    auto report = welfare_sequential(fee, rev, params, m);
    const double lam = params.lambda;
    const double share = (params.n - 1.0) / params.n * (1.0 - lam);

    CsBoundResiduals r;
    r.surplus_gap = m.v(rev.upper) - (m.v0() - fee.upper);
    double bound = share * m.v(rev.upper) + (1.0 - share) * m.v(rev.lower);
    r.linear_cs_bound = report.linear.consumer_surplus - bound;
    r.support_ratio_gap = std::abs(rev.upper / rev.lower - fee.upper / fee.lower);
    r.nonlinear_cs_expression_gap =
        report.nonlinear.consumer_surplus - (lam * m.v0() + (1.0 - lam) * (m.v0() - fee.upper));
    return r;
}

} // namespace searcheq
