#pragma once

#include <optional>
#include <string>
#include <vector>

#include "searcheq/noisy.hpp"
#include "searcheq/stahl.hpp"
#include "searcheq/welfare.hpp"

namespace searcheq {

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double location = 0.0; // where the residual peaks (offer, price or grid value)
    double tolerance = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool pass() const;
    void add(CheckResult c) { checks.push_back(std::move(c)); }
    const CheckResult* find(const std::string& name) const;
    /// Names of failing checks, in order.
    std::vector<std::string> failures() const;
};

struct VerifyTolerances {
    double equal_profit = 1e-8;
    double deviation_gain = 1e-9;
    double reservation = 1e-8;
    double min_normalized_slope = 1e-6;
    double atom_decay = 0.9; // finest / coarse jump ratio that still counts as continuous
    double support = 1e-12;
    int support_grid = 1000;
    int deviation_grid = 2000;

    VerifyTolerances scaled(double factor) const;
};

/// Offer CDF on [lower, upper] under test. Solver output or external data.
struct OfferProfile {
    CdfFunction cdf;
    double lower = 0.0;
    double upper = 0.0;
};

OfferProfile profile_of(const SequentialEquilibrium& eq);
OfferProfile profile_of(const NoisyEquilibrium& eq);

/// max_x |profit(x) - profit(upper)| / profit(upper) on a support grid, with
/// profit(x) = x [(1-λ)/n + λ (1 - F(x))^(n-1)].
CheckResult equal_profit_residual(const OfferProfile& f, const MarketParams& params,
                                  const VerifyTolerances& tol = {});
/// Noisy form: profit(x) = x Σ_k k mu(k) (1 - F(x))^(k-1), target mu(1) upper.
CheckResult equal_profit_residual(const OfferProfile& f, const NoisyParams& params,
                                  const VerifyTolerances& tol = {});
CheckResult equal_profit_residual(const SequentialEquilibrium& eq, const VerifyTolerances& tol = {});
CheckResult equal_profit_residual(const NoisyEquilibrium& eq, const VerifyTolerances& tol = {});

struct DeviationScan {
    double max_gain = 0.0;       // max deviation profit - equilibrium per-firm profit
    double argmax_price = 0.0;
    double equilibrium_profit = 0.0;
    /// Largest zero of q'(p)p + q(p) - q(p)^2 p / ∫_0^p q on [0, choke).
    /// The expression tends to 0 as p -> 0, so 0 is returned when it has no
    /// interior sign change.
    double foc_root = 0.0;
    bool foc_root_interior = false;
    bool foc_root_below_monopoly = false;
    /// The argmax lies where the fee-equivalent is at or below the lower
    /// support (H = 0) or at the first-order-condition root.
    bool argmax_consistent = false;
    CheckResult check;
};

/// Fee-equivalent of linear price p: ∫_0^p q(z) dz = v(0) - surplus_at_price(p).
double fee_equivalent(const DemandCurve& d, double p);

/// Profit of a firm that deviates to linear price p_d against a two-part
/// tariff equilibrium. Nonshoppers buy iff the fee-equivalent does not
/// exceed the reservation fee.
double linear_deviation_profit(const FeeEquilibrium& eq, double p_d);

DeviationScan linear_deviation_scan(const FeeEquilibrium& eq, const MarketParams& params,
                                    const SurplusMap& m, const VerifyTolerances& tol = {});

/// Benefit of search recomputed independently of the solver: integrated by
/// parts into expectations over the quantile level u, then graded composite
/// Gauss-Legendre in u.
double independent_benefit(const SequentialEquilibrium& eq);
double independent_benefit(const NoisyEquilibrium& eq);

/// |benefit(reservation) - s|. Throws DomainError in the boundary regime.
CheckResult reservation_consistency(const SequentialEquilibrium& eq,
                                    const VerifyTolerances& tol = {});
CheckResult reservation_consistency(const NoisyEquilibrium& eq, const VerifyTolerances& tol = {});

/// Boundary regime: benefit(upper) <= s (residual is benefit - s).
CheckResult reservation_bound(const SequentialEquilibrium& eq, const VerifyTolerances& tol = {});
CheckResult reservation_bound(const NoisyEquilibrium& eq, const VerifyTolerances& tol = {});

/// no-flat-region, no-atom and support-below-reservation checks.
std::vector<CheckResult> structure_checks(const OfferProfile& f, double reservation, double cap,
                                          const VerifyTolerances& tol = {});

/// Every applicable check for a solved equilibrium.
VerificationReport certify(const SequentialEquilibrium& eq, const VerifyTolerances& tol = {});
VerificationReport certify(const NoisyEquilibrium& eq, const VerifyTolerances& tol = {});

/// Externally supplied CDF samples (x strictly increasing, cdf in [0, 1]
/// nondecreasing). Throws DomainError on malformed tables.
class TabulatedCdf {
public:
    TabulatedCdf(std::vector<double> x, std::vector<double> cdf);

    const std::vector<double>& x() const noexcept { return x_; }
    const std::vector<double>& values() const noexcept { return cdf_; }
    double lower() const { return x_.front(); }
    double upper() const { return x_.back(); }
    /// Piecewise-linear (monotone) interpolation, clamped outside the table.
    double operator()(double x) const;
    OfferProfile profile() const;

private:
    std::vector<double> x_;
    std::vector<double> cdf_;
};

/// Certification of a table against market parameters. Equal-profit is
/// evaluated at the table nodes; structure checks use the interpolant.
VerificationReport certify_table(const TabulatedCdf& table, const MarketParams& params,
                                 const VerifyTolerances& tol = {});
VerificationReport certify_table(const TabulatedCdf& table, const NoisyParams& params,
                                 const VerifyTolerances& tol = {});

} // namespace searcheq
