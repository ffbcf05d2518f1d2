#include "searcheq/demand.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "searcheq/errors.hpp"
#include "searcheq/numerics.hpp"

namespace searcheq {

namespace {

constexpr int kValidationGrid = 1000;
constexpr double kElasticityMargin = 1e-12;

std::size_t expected_param_count(DemandFamily) { return 2; }

void check_price(const DemandCurve& d, double p) {
    if (!(p >= 0.0 && p <= d.choke_price())) {
        throw DomainError("price " + std::to_string(p) + " outside [0, " +
                          std::to_string(d.choke_price()) + "]");
    }
}

double root_of_marginal_revenue(const DemandCurve& d) {
    double hi = d.choke_price();
    auto mr = [&](double p) { return d.slope(p) * p + d.quantity(p); };
    // mr(0) = q(0) > 0; step back from the choke until mr < 0 is finite.
    double right = hi * (1.0 - 1e-9);
    if (!(mr(right) < 0.0)) {
        throw SolveFailure("monopoly price not bracketed");
    }
    return numerics::find_root(mr, 0.0, right, {1e-14, 400});
}

} // namespace

std::string_view to_string(DemandFamily family) {
    switch (family) {
    case DemandFamily::linear: return "linear";
    case DemandFamily::quadratic: return "quadratic";
    case DemandFamily::truncated_isoelastic: return "truncated-isoelastic";
    }
    return "unknown";
}

DemandFamily parse_demand_family(std::string_view name) {
    if (name == "linear") return DemandFamily::linear;
    if (name == "quadratic") return DemandFamily::quadratic;
    if (name == "truncated-isoelastic") return DemandFamily::truncated_isoelastic;
    throw InvalidDemand("unknown demand family '" + std::string(name) + "'");
}

DemandCurve::DemandCurve(DemandFamily family, std::vector<double> params, double choke)
    : family_(family), params_(std::move(params)), choke_(choke) {}

DemandCurve DemandCurve::make(DemandFamily family, std::vector<double> params) {
    if (params.size() != expected_param_count(family)) {
        throw InvalidDemand(std::string(to_string(family)) + " demand takes " +
                            std::to_string(expected_param_count(family)) + " parameters");
    }
    for (double x : params) {
        if (!std::isfinite(x)) throw InvalidDemand("demand parameters must be finite");
    }
    double choke = 0.0;
    switch (family) {
    case DemandFamily::linear:
    case DemandFamily::quadratic: {
        double a = params[0];
        double b = params[1];
        if (b < 0.0) throw InvalidDemand("demand is increasing in price (b < 0)");
        if (b == 0.0) throw InvalidDemand("choke price is not finite (b = 0)");
        if (a <= 0.0) throw InvalidDemand("q(0) must be positive (a > 0)");
        choke = family == DemandFamily::linear ? a / b : std::sqrt(a / b);
        break;
    }
    case DemandFamily::truncated_isoelastic:
        if (params[0] <= 0.0) throw InvalidDemand("choke price must be positive");
        if (params[1] <= 0.0) throw InvalidDemand("curvature exponent must be positive");
        choke = params[0];
        break;
    }
    if (!std::isfinite(choke) || choke <= 0.0) {
        throw InvalidDemand("choke price must be finite and positive");
    }

    DemandCurve d(family, std::move(params), choke);
    if (std::abs(d.quantity(choke)) > 1e-12) {
        throw InvalidDemand("q(choke) != 0");
    }
    double prev_q = d.quantity(0.0);
    double prev_e = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= kValidationGrid; ++i) {
        double p = choke * i / (kValidationGrid + 1);
        double q = d.quantity(p);
        if (!(q > 0.0)) throw InvalidDemand("q must be positive below the choke price");
        if (q > prev_q) throw InvalidDemand("demand is increasing in price");
        double e = d.elasticity(p);
        if (!(e - prev_e > kElasticityMargin)) {
            throw InvalidDemand("elasticity is not strictly increasing at p = " + std::to_string(p));
        }
        prev_q = q;
        prev_e = e;
    }

    double p_m = root_of_marginal_revenue(d);
    d.anchor_ = 0.5 * (p_m + choke);
    auto q = [&d](double z) { return d.quantity(z); };
    d.tail_ = numerics::integrate_adaptive(q, d.anchor_, choke);
    return d;
}

double DemandCurve::quantity(double p) const {
    switch (family_) {
    case DemandFamily::linear: return params_[0] - params_[1] * p;
    case DemandFamily::quadratic: return params_[0] - params_[1] * p * p;
    case DemandFamily::truncated_isoelastic: {
        double gap = choke_ - p;
        return gap <= 0.0 ? 0.0 : std::pow(gap, params_[1]);
    }
    }
    return 0.0;
}

double DemandCurve::slope(double p) const {
    switch (family_) {
    case DemandFamily::linear: return -params_[1];
    case DemandFamily::quadratic: return -2.0 * params_[1] * p;
    case DemandFamily::truncated_isoelastic: {
        double gamma = params_[1];
        return -gamma * std::pow(choke_ - p, gamma - 1.0);
    }
    }
    return 0.0;
}

double DemandCurve::elasticity(double p) const { return -slope(p) * p / quantity(p); }

double DemandCurve::surplus_at_price(double p) const {
    auto q = [this](double z) { return quantity(z); };
    if (p >= choke_) return 0.0;
    if (p <= anchor_) {
        return numerics::integrate_adaptive(q, p, anchor_) + tail_;
    }
    return numerics::integrate_adaptive(q, p, choke_);
}

DemandCurve make_demand(DemandFamily family, std::vector<double> params) {
    return DemandCurve::make(family, std::move(params));
}

double revenue(const DemandCurve& d, double p) {
    check_price(d, p);
    return d.quantity(p) * p;
}

double surplus_at_price(const DemandCurve& d, double p) {
    check_price(d, p);
    return d.surplus_at_price(p);
}

MonopolyPoint monopoly_point(const DemandCurve& d) {
    double p = root_of_marginal_revenue(d);
    return {p, d.quantity(p) * p};
}

SurplusMap::SurplusMap(DemandCurve demand) : demand_(std::move(demand)) {
    auto mp = monopoly_point(demand_);
    p_m_ = mp.price;
    pi_m_ = mp.revenue;
    v0_ = demand_.surplus_at_price(0.0);
}

double SurplusMap::price_for_revenue(double pi) const {
    if (!(pi >= 0.0 && pi <= pi_m_ * (1.0 + 1e-14))) {
        throw DomainError("revenue " + std::to_string(pi) + " outside [0, pi_m]");
    }
    if (pi == 0.0) return 0.0;
    if (pi >= pi_m_) return p_m_;
    auto gap = [&](double p) { return demand_.quantity(p) * p - pi; };
    return numerics::find_root(gap, 0.0, p_m_, {1e-15, 400});
}

double SurplusMap::v(double pi) const { return demand_.surplus_at_price(price_for_revenue(pi)); }

double SurplusMap::v_prime(double pi) const {
    if (!(pi >= 0.0 && pi < pi_m_)) {
        throw DomainError("v' is defined on [0, pi_m); got " + std::to_string(pi));
    }
    double p = price_for_revenue(pi);
    return -1.0 / (1.0 + demand_.slope(p) * p / demand_.quantity(p));
}

double SurplusMap::v_second(double pi) const {
    if (!(pi >= 0.0 && pi < pi_m_)) {
        throw DomainError("v'' is defined on [0, pi_m); got " + std::to_string(pi));
    }
    double h = 1e-4 * std::min(pi_m_, pi_m_ - pi);
    if (pi - h < 0.0) {
        // one-sided second-order stencil at the left end
        return (-3.0 * v_prime(pi) + 4.0 * v_prime(pi + h) - v_prime(pi + 2.0 * h)) / (2.0 * h);
    }
    return (v_prime(pi + h) - v_prime(pi - h)) / (2.0 * h);
}

double v_of_pi(const SurplusMap& m, double pi) { return m.v(pi); }

double v_prime(const SurplusMap& m, double pi) { return m.v_prime(pi); }

} // namespace searcheq
