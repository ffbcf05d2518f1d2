#include "searcheq/stahl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "searcheq/errors.hpp"
#include "searcheq/numerics.hpp"

namespace searcheq {

namespace {

// Relative slack for support-endpoint round-off.
constexpr double kEndpointSlack = 1e-12;

double checked_upper(double upper) {
    if (!(upper > 0.0) || !std::isfinite(upper)) {
        throw DomainError("upper support must be finite and positive");
    }
    return upper;
}

} // namespace

std::string_view to_string(Regime regime) {
    return regime == Regime::linear ? "linear" : "two-part";
}

std::string_view to_string(Protocol protocol) {
    switch (protocol) {
    case Protocol::sequential: return "sequential";
    case Protocol::continuous_cost: return "continuous-cost";
    case Protocol::noisy: return "noisy";
    }
    return "unknown";
}

void MarketParams::validate() const {
    if (n < 2) throw InvalidParameter("n must be >= 2 (got " + std::to_string(n) + ")");
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw InvalidParameter("lambda must lie in (0, 1) (got " + std::to_string(lambda) + ")");
    }
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw InvalidParameter("s must be > 0 (got " + std::to_string(s) + ")");
    }
}

double MarketParams::support_ratio() const { return (1.0 - lambda) / (1.0 + (n - 1) * lambda); }

double sequential_cdf(double x, double upper, const MarketParams& params) {
    checked_upper(upper);
    double lower = upper * params.support_ratio();
    if (x < lower * (1.0 - kEndpointSlack) || x > upper * (1.0 + kEndpointSlack)) {
        throw DomainError("offer " + std::to_string(x) + " outside the support [" +
                          std::to_string(lower) + ", " + std::to_string(upper) + "]");
    }
    if (x <= lower) return 0.0;
    if (x >= upper) return 1.0;
    double a = (1.0 - params.lambda) / (params.n * params.lambda);
    double inner = a * (upper / x - 1.0);
    double value = 1.0 - std::pow(inner, 1.0 / (params.n - 1));
    return std::clamp(value, 0.0, 1.0);
}

double sequential_quantile(double u, double upper, const MarketParams& params) {
    checked_upper(upper);
    if (!(u >= 0.0 && u <= 1.0)) {
        throw DomainError("probability " + std::to_string(u) + " outside [0, 1]");
    }
    if (u == 0.0) return upper * params.support_ratio();
    if (u == 1.0) return upper;
    double b = params.n * params.lambda / (1.0 - params.lambda);
    return upper / (1.0 + b * std::pow(1.0 - u, params.n - 1));
}

double fee_cdf(double t, double t_high, const MarketParams& params) {
    return sequential_cdf(t, t_high, params);
}
double fee_quantile(double u, double t_high, const MarketParams& params) {
    return sequential_quantile(u, t_high, params);
}
double revenue_cdf(double pi, double pi_high, const MarketParams& params) {
    return sequential_cdf(pi, pi_high, params);
}
double revenue_quantile(double u, double pi_high, const MarketParams& params) {
    return sequential_quantile(u, pi_high, params);
}

double SequentialEquilibrium::cdf_extended(double x) const {
    if (x <= lower) return 0.0;
    if (x >= upper) return 1.0;
    return cdf(x);
}

double fee_benefit(double t_reserve, const MarketParams& params, const SolverOptions& opt) {
    double lower = t_reserve * params.support_ratio();
    auto h = [&](double t) {
        if (t <= lower) return 0.0;
        if (t >= t_reserve) return 1.0;
        return sequential_cdf(t, t_reserve, params);
    };
    return numerics::integrate_adaptive_split_upper(h, lower, t_reserve, 1e-8,
                                                    {opt.quad_tol, 60});
}

double revenue_benefit(double pi_reserve, const MarketParams& params, const SurplusMap& m,
                       const SolverOptions& opt) {
    if (!(pi_reserve > 0.0 && pi_reserve <= m.pi_m())) {
        throw DomainError("reservation revenue must lie in (0, pi_m]");
    }
    double lower = pi_reserve * params.support_ratio();
    double p_low = m.price_for_revenue(lower);
    double p_high = m.price_for_revenue(pi_reserve);
    const DemandCurve& d = m.demand();
    auto integrand = [&](double p) {
        double q = d.quantity(p);
        double pi = q * p;
        double f = pi <= lower ? 0.0 : pi >= pi_reserve ? 1.0 : sequential_cdf(pi, pi_reserve, params);
        return q * f;
    };
    // Near p_m revenue is flat in price, so F(pi(p)) is round-off noise there;
    // a fixed graded rule integrates through it without chasing the noise.
    (void)opt;
    return numerics::integrate_gauss_graded(integrand, p_low, p_high);
}

FeeEquilibrium solve_two_part(const MarketParams& params, const SurplusMap& m,
                              const SolverOptions& opt) {
    params.validate();
    auto benefit = [&](double t) { return fee_benefit(t, params, opt); };
    auto sol = detail::solve_reservation(benefit, m.v0(), params.s, opt);
    FeeEquilibrium eq{Regime::two_part, params, m};
    eq.upper = sol.upper;
    eq.lower = sol.upper * params.support_ratio();
    eq.reservation = sol.reservation;
    eq.s_bar = sol.s_bar;
    eq.boundary = sol.boundary;
    eq.per_firm_profit = (1.0 - params.lambda) * eq.upper / params.n;
    return eq;
}

RevenueEquilibrium solve_linear(const MarketParams& params, const SurplusMap& m,
                                const SolverOptions& opt) {
    params.validate();
    auto benefit = [&](double pi) { return revenue_benefit(pi, params, m, opt); };
    auto sol = detail::solve_reservation(benefit, m.pi_m(), params.s, opt);
    RevenueEquilibrium eq{Regime::linear, params, m};
    eq.upper = sol.upper;
    eq.lower = sol.upper * params.support_ratio();
    eq.reservation = sol.reservation;
    eq.s_bar = sol.s_bar;
    eq.boundary = sol.boundary;
    eq.per_firm_profit = (1.0 - params.lambda) * eq.upper / params.n;
    return eq;
}

} // namespace searcheq
