#include "searcheq/noisy.hpp"

#include <cmath>
#include <string>

#include "searcheq/errors.hpp"
#include "searcheq/numerics.hpp"

namespace searcheq {

namespace {

constexpr double kEndpointSlack = 1e-12;

// Σ_k mu(k) (1 - y)^(k-1)
double search_weight(double y, const NoisyParams& p) {
    double sum = 0.0;
    double power = 1.0;
    for (int k = 1; k <= p.m(); ++k) {
        sum += p.mu_at(k) * power;
        power *= 1.0 - y;
    }
    return sum;
}

} // namespace

double NoisyParams::mean_responses() const {
    double e = 0.0;
    for (int k = 1; k <= m(); ++k) e += k * mu_at(k);
    return e;
}

double NoisyParams::support_ratio() const { return mu_at(1) / mean_responses(); }

void NoisyParams::validate() const {
    if (m() < 2) throw InvalidParameter("m must be >= 2 (got " + std::to_string(m()) + ")");
    double sum = 0.0;
    for (double x : mu) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidParameter("mu entries must be >= 0");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw InvalidParameter("mu must sum to 1 (got " + std::to_string(sum) + ")");
    }
    if (!(mu_at(1) > 0.0 && mu_at(1) < 1.0)) {
        throw InvalidParameter("mu(1) must lie in (0, 1) (got " + std::to_string(mu_at(1)) + ")");
    }
    if (!(mu_at(2) > 0.0 && mu_at(2) < 1.0)) {
        throw InvalidParameter("mu(2) must lie in (0, 1) (got " + std::to_string(mu_at(2)) + ")");
    }
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw InvalidParameter("s must be > 0 (got " + std::to_string(s) + ")");
    }
}

double noisy_revenue_weight(double y, const NoisyParams& p) {
    double sum = 0.0;
    double power = 1.0;
    for (int k = 1; k <= p.m(); ++k) {
        sum += k * p.mu_at(k) * power;
        power *= 1.0 - y;
    }
    return sum;
}

double noisy_cdf(double x, double upper, const NoisyParams& p) {
    if (!(upper > 0.0)) throw DomainError("upper support must be positive");
    double target = p.mu_at(1) * upper;
    double lower = upper * p.support_ratio();
    if (x < lower * (1.0 - kEndpointSlack) || x > upper * (1.0 + kEndpointSlack)) {
        throw DomainError("offer " + std::to_string(x) + " outside the support [" +
                          std::to_string(lower) + ", " + std::to_string(upper) + "]");
    }
    if (x <= lower) return 0.0;
    if (x >= upper) return 1.0;
    // LHS decreases in y from E[k] x > target to mu(1) x < target.
    auto gap = [&](double y) { return noisy_revenue_weight(y, p) * x - target; };
    return numerics::bisect(gap, 0.0, 1.0, 1e-12);
}

double noisy_quantile(double u, double upper, const NoisyParams& p) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw DomainError("probability " + std::to_string(u) + " outside [0, 1]");
    }
    if (u == 0.0) return upper * p.support_ratio();
    if (u == 1.0) return upper;
    return p.mu_at(1) * upper / noisy_revenue_weight(u, p);
}

double NoisyEquilibrium::cdf_extended(double x) const {
    if (x <= lower) return 0.0;
    if (x >= upper) return 1.0;
    return cdf(x);
}

double noisy_revenue_benefit(double pi_reserve, const NoisyParams& p, const SurplusMap& m,
                             const SolverOptions& opt) {
    if (!(pi_reserve > 0.0 && pi_reserve <= m.pi_m())) {
        throw DomainError("reservation revenue must lie in (0, pi_m]");
    }
    double lower = pi_reserve * p.support_ratio();
    double p_low = m.price_for_revenue(lower);
    double p_high = m.price_for_revenue(pi_reserve);
    const DemandCurve& d = m.demand();
    auto integrand = [&](double price) {
        double q = d.quantity(price);
        double pi = q * price;
        double f = pi <= lower ? 0.0 : pi >= pi_reserve ? 1.0 : noisy_cdf(pi, pi_reserve, p);
        return q * search_weight(f, p);
    };
    // Near p_m revenue is flat in price, so F(pi(p)) is round-off noise there;
    // a fixed graded rule integrates through it without chasing the noise.
    (void)opt;
    return numerics::integrate_gauss_graded(integrand, p_low, p_high);
}

double noisy_fee_benefit(double t_reserve, const NoisyParams& p, const SolverOptions& opt) {
    double lower = t_reserve * p.support_ratio();
    auto integrand = [&](double t) {
        double h = t <= lower ? 0.0 : t >= t_reserve ? 1.0 : noisy_cdf(t, t_reserve, p);
        return search_weight(h, p);
    };
    return numerics::integrate_adaptive(integrand, lower, t_reserve, {opt.quad_tol, 60});
}

NoisyEquilibrium solve_noisy_linear(const NoisyParams& p, const SurplusMap& m,
                                    const SolverOptions& opt) {
    p.validate();
    auto benefit = [&](double pi) { return noisy_revenue_benefit(pi, p, m, opt); };
    auto sol = detail::solve_reservation(benefit, m.pi_m(), p.s, opt);
    NoisyEquilibrium eq{Regime::linear, p, m};
    eq.upper = sol.upper;
    eq.lower = sol.upper * p.support_ratio();
    eq.reservation = sol.reservation;
    eq.s_bar = sol.s_bar;
    eq.boundary = sol.boundary;
    return eq;
}

NoisyEquilibrium solve_noisy_two_part(const NoisyParams& p, const SurplusMap& m,
                                      const SolverOptions& opt) {
    p.validate();
    auto benefit = [&](double t) { return noisy_fee_benefit(t, p, opt); };
    auto sol = detail::solve_reservation(benefit, m.v0(), p.s, opt);
    NoisyEquilibrium eq{Regime::two_part, p, m};
    eq.upper = sol.upper;
    eq.lower = sol.upper * p.support_ratio();
    eq.reservation = sol.reservation;
    eq.s_bar = sol.s_bar;
    eq.boundary = sol.boundary;
    return eq;
}

} // namespace searcheq
