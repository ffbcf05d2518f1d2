#include "searcheq/extcost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "searcheq/errors.hpp"
#include "searcheq/numerics.hpp"

namespace searcheq {

namespace {

constexpr int kLogConcavityGrid = 1000;
constexpr int kArgmaxGrid = 2000;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

// Maximizes a unimodal objective on [lo, hi]: coarse grid, then golden section
// on the cell pair around the best grid point.
template <class F>
double argmax_unimodal(F&& objective, double lo, double hi, int grid = 400) {
    double best_x = lo;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        double x = lo + (hi - lo) * i / grid;
        double y = objective(x);
        if (y > best) {
            best = y;
            best_x = x;
        }
    }
    double step = (hi - lo) / grid;
    double a = std::max(lo, best_x - step);
    double b = std::min(hi, best_x + step);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = objective(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

std::string_view to_string(CostFamily family) {
    switch (family) {
    case CostFamily::uniform: return "uniform";
    case CostFamily::exponential: return "exponential";
    case CostFamily::truncated_normal: return "truncated-normal";
    }
    return "unknown";
}

CostFamily parse_cost_family(std::string_view name) {
    if (name == "uniform") return CostFamily::uniform;
    if (name == "exponential") return CostFamily::exponential;
    if (name == "truncated-normal") return CostFamily::truncated_normal;
    throw InvalidParameter("unknown search-cost family '" + std::string(name) + "'");
}

SearchCostDist::SearchCostDist(CostFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {}

SearchCostDist SearchCostDist::make(CostFamily family, std::vector<double> params) {
    for (double x : params) {
        if (std::isnan(x)) throw InvalidParameter("search-cost parameters must not be NaN");
    }
    SearchCostDist g(family, params);
    const double inf = std::numeric_limits<double>::infinity();
    double probe_end = 0.0;
    switch (family) {
    case CostFamily::uniform:
        if (params.size() != 1) throw InvalidParameter("uniform search cost takes (c_bar)");
        if (!(params[0] > 0.0) || !std::isfinite(params[0])) {
            throw InvalidParameter("uniform c_bar must be finite and positive");
        }
        g.c_bar_ = params[0];
        g.g0_ = 1.0 / params[0];
        probe_end = g.c_bar_;
        break;
    case CostFamily::exponential:
        if (params.size() != 1) throw InvalidParameter("exponential search cost takes (rate)");
        if (!(params[0] > 0.0) || !std::isfinite(params[0])) {
            throw InvalidParameter("exponential rate must be finite and positive");
        }
        g.c_bar_ = inf;
        g.g0_ = params[0];
        probe_end = -std::log(1e-3) / params[0];
        break;
    case CostFamily::truncated_normal: {
        if (params.size() != 2 && params.size() != 3) {
            throw InvalidParameter("truncated-normal search cost takes (mean, sd[, c_bar])");
        }
        double mean = params[0];
        double sd = params[1];
        if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd)) {
            throw InvalidParameter("truncated-normal needs finite mean and sd > 0");
        }
        g.c_bar_ = params.size() == 3 ? params[2] : inf;
        if (!(g.c_bar_ > 0.0)) throw InvalidParameter("c_bar must be positive");
        double lo = normal_cdf(-mean / sd);
        double hi = std::isfinite(g.c_bar_) ? normal_cdf((g.c_bar_ - mean) / sd) : 1.0;
        g.norm_ = hi - lo;
        if (!(g.norm_ > 0.0)) throw InvalidParameter("truncated-normal has no mass on [0, c_bar]");
        g.g0_ = normal_pdf(-mean / sd) / (sd * g.norm_);
        probe_end = std::isfinite(g.c_bar_) ? g.c_bar_ : std::max(mean, 0.0) + 6.0 * sd;
        break;
    }
    }
    if (!(g.g0_ > 0.0) || !std::isfinite(g.g0_)) {
        throw InvalidParameter("density at zero must be finite and positive");
    }

    double prev2 = 0.0;
    double prev1 = 0.0;
    for (int i = 1; i <= kLogConcavityGrid; ++i) {
        double c = probe_end * i / kLogConcavityGrid;
        double lg = std::log(g.cdf(c));
        if (i >= 3 && lg - 2.0 * prev1 + prev2 > 1e-10) {
            throw InvalidParameter("search-cost distribution is not log-concave near c = " +
                                   std::to_string(c));
        }
        prev2 = prev1;
        prev1 = lg;
    }
    return g;
}

double SearchCostDist::cdf(double c) const {
    if (c <= 0.0) return 0.0;
    if (c >= c_bar_) return 1.0;
    switch (family_) {
    case CostFamily::uniform: return c / c_bar_;
    case CostFamily::exponential: return -std::expm1(-params_[0] * c);
    case CostFamily::truncated_normal: {
        double mean = params_[0];
        double sd = params_[1];
        return (normal_cdf((c - mean) / sd) - normal_cdf(-mean / sd)) / norm_;
    }
    }
    return 0.0;
}

StarEquilibrium solve_t_star(const SearchCostDist& g, const SurplusMap& m) {
    StarEquilibrium eq;
    double v0 = m.v0();
    double unclamped = 1.0 / g.g0();
    eq.clamped = unclamped > v0;
    eq.value = eq.clamped ? v0 : unclamped;
    eq.interval_high = v0;
    auto objective = [&](double t) { return (1.0 - g.cdf(t - eq.value)) * t; };
    double at_star = objective(eq.value);
    double gain = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= kArgmaxGrid; ++i) {
        gain = std::max(gain, objective(v0 * i / kArgmaxGrid) - at_star);
    }
    eq.argmax_gain = gain;
    return eq;
}

double pi_star_for_g0(double g0, const SurplusMap& m) {
    if (!(g0 > 0.0) || !std::isfinite(g0)) throw DomainError("g0 must be finite and positive");
    const DemandCurve& d = m.demand();
    double target = 1.0 / g0;
    // pi (-v'(pi)) in price space: q^2 p / (q + q' p), increasing on (0, p_m).
    auto lhs = [&](double p) {
        double q = d.quantity(p);
        return q * q * p / (q + d.slope(p) * p);
    };
    double hi = m.p_m();
    double delta = 1e-3;
    while (!(lhs(m.p_m() * (1.0 - delta)) > target)) {
        delta *= 0.1;
        if (delta < 1e-15) throw SolveFailure("pi* not bracketed below pi_m");
    }
    hi = m.p_m() * (1.0 - delta);
    double p = numerics::find_root([&](double x) { return lhs(x) - target; }, 0.0, hi, {1e-15, 400});
    return d.quantity(p) * p;
}

StarEquilibrium solve_pi_star(const SearchCostDist& g, const SurplusMap& m) {
    StarEquilibrium eq;
    eq.value = pi_star_for_g0(g.g0(), m);
    eq.interval_high = m.pi_m();
    double v_star = m.v(eq.value);
    auto objective = [&](double pi) { return (1.0 - g.cdf(v_star - m.v(pi))) * pi; };
    double at_star = objective(eq.value);
    double gain = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= kArgmaxGrid; ++i) {
        gain = std::max(gain, objective(m.pi_m() * i / kArgmaxGrid) - at_star);
    }
    eq.argmax_gain = gain;
    return eq;
}

double t_star_by_iteration(const SearchCostDist& g, const SurplusMap& m) {
    double v0 = m.v0();
    double t = 1e-3 * v0; // from below: every t in [t*, v(0)] is a fixed point
    for (int it = 0; it < 500; ++it) {
        double anchor = t;
        double next = argmax_unimodal([&](double x) { return (1.0 - g.cdf(x - anchor)) * x; }, 0.0, v0);
        if (std::abs(next - t) < 1e-8) return next;
        t = next;
    }
    throw SolveFailure("t* fixed-point iteration did not converge");
}

double pi_star_by_iteration(const SearchCostDist& g, const SurplusMap& m) {
    double pi = 1e-3 * m.pi_m();
    for (int it = 0; it < 500; ++it) {
        double v_anchor = m.v(pi);
        double next = argmax_unimodal(
            [&](double x) { return (1.0 - g.cdf(v_anchor - m.v(x))) * x; }, 0.0, m.pi_m());
        if (std::abs(next - pi) < 1e-8) return next;
        pi = next;
    }
    throw SolveFailure("pi* fixed-point iteration did not converge");
}

WelfareReport welfare_cont(const SearchCostDist& g, const SurplusMap& m) {
    auto pi_star = solve_pi_star(g, m);
    auto t_star = solve_t_star(g, m);
    WelfareReport r;
    r.protocol = Protocol::continuous_cost;
    // all buyers purchase at the first firm
    r.linear.industry_profit = pi_star.value;
    r.linear.consumer_surplus = m.v(pi_star.value);
    r.linear.total_surplus = r.linear.industry_profit + r.linear.consumer_surplus;
    r.nonlinear.industry_profit = t_star.value;
    r.nonlinear.consumer_surplus = m.v0() - t_star.value;
    r.nonlinear.total_surplus = m.v0();
    r.parameters = {{"g0", g.g0()}, {"pi_star", pi_star.value}, {"t_star", t_star.value}};
    return r;
}

CsSlopeCheck cs_slope_check(const SearchCostDist& g, const SurplusMap& m, double h) {
    double g0 = g.g0();
    double v0 = m.v0();
    if (!(g0 * (1.0 - h) > 1.0 / v0)) {
        throw DomainError("cs_slope_check requires g0 > 1/v(0) (t* unclamped)");
    }
    CsSlopeCheck r;
    double step = h * g0;
    double pi_star = pi_star_for_g0(g0, m);
    double vp = m.v_prime(pi_star);
    double vpp = m.v_second(pi_star);
    r.closed_linear = vp / (g0 * g0 * (vp + vpp * pi_star));
    r.closed_nonlinear = 1.0 / (g0 * g0);

    double cs_up = m.v(pi_star_for_g0(g0 + step, m));
    double cs_down = m.v(pi_star_for_g0(g0 - step, m));
    r.fd_linear = (cs_up - cs_down) / (2.0 * step);
    double nl_up = v0 - 1.0 / (g0 + step);
    double nl_down = v0 - 1.0 / (g0 - step);
    r.fd_nonlinear = (nl_up - nl_down) / (2.0 * step);

    r.residual_linear = std::abs(r.fd_linear - r.closed_linear) / std::abs(r.closed_linear);
    r.residual_nonlinear =
        std::abs(r.fd_nonlinear - r.closed_nonlinear) / std::abs(r.closed_nonlinear);
    r.linear_rises_slower = r.fd_linear <= r.fd_nonlinear && r.closed_linear <= r.closed_nonlinear;
    return r;
}

} // namespace searcheq
