#pragma once

#include <string_view>

#include "searcheq/demand.hpp"

namespace searcheq {

enum class Regime { linear, two_part };
enum class Protocol { sequential, continuous_cost, noisy };

std::string_view to_string(Regime regime);
std::string_view to_string(Protocol protocol);

/// Shoppers/nonshoppers sequential-search market.
struct MarketParams {
    int n = 2;           // firm count
    double lambda = 0.5; // shopper share
    double s = 0.1;      // search cost per search after the free first one

    /// Throws InvalidParameter naming the violated bound.
    void validate() const;

    /// lower / upper support ratio shared by both regimes.
    double support_ratio() const;

    bool operator==(const MarketParams&) const = default;
};

struct SolverOptions {
    double root_tol = 1e-12;
    double quad_tol = 1e-10;
};

/// Closed-form equilibrium offer CDF of the sequential model, in fee or
/// revenue units: 1 - [(1-λ)/(nλ) (upper/x - 1)]^(1/(n-1)) on
/// [upper * support_ratio, upper]. Throws DomainError outside the support.
double sequential_cdf(double x, double upper, const MarketParams& params);

/// Inverse of sequential_cdf. u = 0 and u = 1 map exactly to the support ends.
double sequential_quantile(double u, double upper, const MarketParams& params);

double fee_cdf(double t, double t_high, const MarketParams& params);
double fee_quantile(double u, double t_high, const MarketParams& params);
double revenue_cdf(double pi, double pi_high, const MarketParams& params);
double revenue_quantile(double u, double pi_high, const MarketParams& params);

/// Symmetric reservation-price equilibrium of the sequential model.
/// In the two-part regime the offers are lump-sum fees (linear price 0);
/// in the linear regime they are per-consumer revenues.
struct SequentialEquilibrium {
    Regime regime = Regime::two_part;
    MarketParams params;
    SurplusMap surplus;
    double lower = 0.0;
    double upper = 0.0;
    double reservation = 0.0;
    double s_bar = 0.0;
    double per_firm_profit = 0.0;
    bool boundary = false; // s >= s_bar: upper pinned at v(0) or pi_m

    double cdf(double x) const { return sequential_cdf(x, upper, params); }
    /// cdf extended by 0 below the support and 1 above it.
    double cdf_extended(double x) const;
    double quantile(double u) const { return sequential_quantile(u, upper, params); }
    double industry_profit() const { return per_firm_profit * params.n; }
    /// Linear unit price of the equilibrium tariffs; always 0 (marginal cost).
    double unit_price() const { return 0.0; }
};

using FeeEquilibrium = SequentialEquilibrium;
using RevenueEquilibrium = SequentialEquilibrium;

/// Benefit of one more search, ∫_{lower}^{t_res} H(t; upper = t_res) dt.
double fee_benefit(double t_reserve, const MarketParams& params, const SolverOptions& opt = {});

/// Benefit of one more search with linear prices,
/// ∫_{lower}^{pi_res} (-v'(pi)) F(pi; upper = pi_res) dpi, evaluated in price
/// space where (-v'(pi)) dpi = q(p) dp.
double revenue_benefit(double pi_reserve, const MarketParams& params, const SurplusMap& m,
                       const SolverOptions& opt = {});

FeeEquilibrium solve_two_part(const MarketParams& params, const SurplusMap& m,
                              const SolverOptions& opt = {});
RevenueEquilibrium solve_linear(const MarketParams& params, const SurplusMap& m,
                                const SolverOptions& opt = {});

namespace detail {

struct ReservationSolution {
    double reservation;
    double upper;
    double s_bar;
    bool boundary;
};

// Solves benefit(r) = s for r in (0, cap], benefit increasing in r; pins
// r = cap when benefit(cap) <= s.
template <class Benefit>
ReservationSolution solve_reservation(Benefit&& benefit, double cap, double s,
                                      const SolverOptions& opt);

} // namespace detail

} // namespace searcheq

#include "searcheq/detail/reservation.hpp"
