#pragma once

#include <vector>

#include "searcheq/demand.hpp"
#include "searcheq/stahl.hpp"

namespace searcheq {

/// Noisy search: each round a buyer solicits m offers and receives k of
/// them with probability mu[k-1]; one more round costs s.
struct NoisyParams {
    std::vector<double> mu; // mu[k-1] = P(k responses), k = 1..m
    double s = 0.1;

    int m() const { return static_cast<int>(mu.size()); }
    double mu_at(int k) const { return mu[static_cast<std::size_t>(k - 1)]; }
    /// E[k]
    double mean_responses() const;
    /// lower / upper support ratio, mu(1) / E[k].
    double support_ratio() const;

    /// Throws InvalidParameter; rejects mu(1) = 1 (Diamond) and mu(1) = 0
    /// (Bertrand), and requires 0 < mu(2) < 1.
    void validate() const;

    bool operator==(const NoisyParams&) const = default;
};

/// Σ_k k mu(k) (1 - y)^(k-1) x, the equal-revenue left-hand side.
double noisy_revenue_weight(double y, const NoisyParams& p);

/// Unique y in [0, 1] with Σ_k k mu(k) (1-y)^(k-1) x = mu(1) upper, by
/// bisection to 1e-12. Throws DomainError outside [lower, upper].
double noisy_cdf(double x, double upper, const NoisyParams& p);

/// Closed-form inverse: x = mu(1) upper / Σ_k k mu(k) (1-u)^(k-1).
double noisy_quantile(double u, double upper, const NoisyParams& p);

struct NoisyEquilibrium {
    Regime regime = Regime::two_part;
    NoisyParams params;
    SurplusMap surplus;
    double lower = 0.0;
    double upper = 0.0;
    double reservation = 0.0;
    double s_bar = 0.0;
    bool boundary = false;

    double cdf(double x) const { return noisy_cdf(x, upper, params); }
    double cdf_extended(double x) const;
    double quantile(double u) const { return noisy_quantile(u, upper, params); }
    /// Industry revenue per unit mass of buyers, mu(1) * upper.
    double industry_profit() const { return params.mu_at(1) * upper; }
    double unit_price() const { return 0.0; }
};

/// ∫_{lower}^{pi_res} (-v'(pi)) Σ_k mu(k) (1 - F(pi))^(k-1) dpi, in price space.
double noisy_revenue_benefit(double pi_reserve, const NoisyParams& p, const SurplusMap& m,
                             const SolverOptions& opt = {});

/// Σ_k mu(k) ∫_{lower}^{t_res} (1 - H(t))^(k-1) dt.
double noisy_fee_benefit(double t_reserve, const NoisyParams& p, const SolverOptions& opt = {});

NoisyEquilibrium solve_noisy_linear(const NoisyParams& p, const SurplusMap& m,
                                    const SolverOptions& opt = {});
NoisyEquilibrium solve_noisy_two_part(const NoisyParams& p, const SurplusMap& m,
                                      const SolverOptions& opt = {});

} // namespace searcheq
