#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace searcheq {

enum class DemandFamily {
    linear,               // q = a - b p
    quadratic,            // q = a - b p^2
    truncated_isoelastic, // q = (choke - p)^gamma
};

std::string_view to_string(DemandFamily family);
DemandFamily parse_demand_family(std::string_view name);

/// Per-consumer demand q(p) with a finite choke price and marginal cost 0.
///
/// Construction validates that q is positive and non-increasing on
/// [0, choke), vanishes at the choke price, and that the elasticity
/// -q'(p) p / q(p) is strictly increasing on a 1000-point grid.
class DemandCurve {
public:
    /// Throws InvalidDemand if the family/parameters violate the assumptions.
    static DemandCurve make(DemandFamily family, std::vector<double> params);

    DemandFamily family() const noexcept { return family_; }
    std::span<const double> params() const noexcept { return params_; }
    double choke_price() const noexcept { return choke_; }

    double quantity(double p) const;
    double slope(double p) const;
    double elasticity(double p) const;

    /// ∫_p^choke q(z) dz by adaptive quadrature. The part of the integral
    /// above a fixed anchor price is computed once at construction, so
    /// nearby evaluations share their tail and differ only through a
    /// smooth integrand.
    double surplus_at_price(double p) const;

    bool operator==(const DemandCurve& other) const {
        return family_ == other.family_ && params_ == other.params_;
    }

private:
    DemandCurve(DemandFamily family, std::vector<double> params, double choke);

    DemandFamily family_;
    std::vector<double> params_;
    double choke_;
    double anchor_ = 0.0;
    double tail_ = 0.0;
};

DemandCurve make_demand(DemandFamily family, std::vector<double> params);

/// q(p) p. Throws DomainError outside [0, choke].
double revenue(const DemandCurve& d, double p);

/// Consumer surplus at price p. Throws DomainError outside [0, choke].
double surplus_at_price(const DemandCurve& d, double p);

struct MonopolyPoint {
    double price;
    double revenue;
};

/// Unique root of q'(p) p + q(p) = 0 in (0, choke).
MonopolyPoint monopoly_point(const DemandCurve& d);

/// The transform between per-consumer revenue pi in [0, pi_m] and the
/// consumer surplus v(pi) a buyer enjoys when a linear price extracts pi.
class SurplusMap {
public:
    explicit SurplusMap(DemandCurve demand);

    const DemandCurve& demand() const noexcept { return demand_; }
    double p_m() const noexcept { return p_m_; }
    double pi_m() const noexcept { return pi_m_; }
    double v0() const noexcept { return v0_; }

    /// Unique p in [0, p_m] with revenue(p) = pi.
    double price_for_revenue(double pi) const;

    double v(double pi) const;

    /// v'(pi) = -1 / (1 + q'(p) p / q(p)) at p = price_for_revenue(pi).
    /// Diverges at pi_m, so the domain is [0, pi_m).
    double v_prime(double pi) const;

    /// Central difference of v_prime; there is no closed form for v''.
    double v_second(double pi) const;

    bool operator==(const SurplusMap& other) const { return demand_ == other.demand_; }

private:
    DemandCurve demand_;
    double p_m_;
    double pi_m_;
    double v0_;
};

double v_of_pi(const SurplusMap& m, double pi);
double v_prime(const SurplusMap& m, double pi);

} // namespace searcheq
