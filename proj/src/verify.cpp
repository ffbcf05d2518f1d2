#include "searcheq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "searcheq/errors.hpp"
#include "searcheq/numerics.hpp"

namespace searcheq {

namespace {

// Relative equal-profit deviation at sampled (x, F(x)) points.
template <class Profit>
CheckResult equal_profit_at(const std::vector<std::pair<double, double>>& samples, double target,
                            Profit&& profit, double tolerance) {
    CheckResult c{"equal-profit", 0.0, 0.0, tolerance, false};
    for (auto [x, f] : samples) {
        double r = std::abs(profit(x, f) - target) / target;
        if (r > c.residual || std::isnan(r)) {
            c.residual = r;
            c.location = x;
        }
    }
    c.pass = c.residual <= tolerance;
    return c;
}

std::vector<std::pair<double, double>> sample_grid(const OfferProfile& f, int points) {
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        double x = f.lower + (f.upper - f.lower) * i / (points - 1);
        out.emplace_back(x, f.cdf(x));
    }
    return out;
}

double sequential_profit(double x, double cdf, const MarketParams& p) {
    return x * ((1.0 - p.lambda) / p.n + p.lambda * std::pow(1.0 - cdf, p.n - 1));
}

double noisy_profit(double x, double cdf, const NoisyParams& p) {
    return x * noisy_revenue_weight(cdf, p);
}

CheckResult no_flat_region(const OfferProfile& f, const VerifyTolerances& tol) {
    CheckResult c{"no-flat-region", std::numeric_limits<double>::infinity(), f.lower,
                  tol.min_normalized_slope, false};
    double width = f.upper - f.lower;
    int n = tol.support_grid;
    double prev = f.cdf(f.lower);
    for (int i = 1; i <= n; ++i) {
        double x = f.lower + width * i / n;
        double cur = f.cdf(x);
        double normalized = (cur - prev) * n; // slope * width
        if (normalized < c.residual) {
            c.residual = normalized;
            c.location = x;
        }
        prev = cur;
    }
    c.pass = c.residual >= tol.min_normalized_slope;
    return c;
}

// Zooms into the cell with the largest jump; a continuous CDF's jump keeps
// shrinking with the cell, an atom's does not.
CheckResult no_atom(const OfferProfile& f, const VerifyTolerances& tol) {
    CheckResult c{"no-atom", 0.0, f.lower, tol.atom_decay, false};
    double width = f.upper - f.lower;
    int n = tol.support_grid;
    double best_jump = -1.0;
    double a = f.lower;
    double b = f.lower;
    double prev = f.cdf(f.lower);
    for (int i = 1; i <= n; ++i) {
        double x = f.lower + width * i / n;
        double cur = f.cdf(x);
        if (cur - prev > best_jump) {
            best_jump = cur - prev;
            a = f.lower + width * (i - 1) / n;
            b = x;
        }
        prev = cur;
    }
    double fa = f.cdf(a);
    double fb = f.cdf(b);
    double coarse_jump = fb - fa;
    bool coarse_recorded = false;
    while (b - a > 1e-12 * width) {
        double mid = 0.5 * (a + b);
        double fm = f.cdf(mid);
        if (fm - fa >= fb - fm) {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
        if (!coarse_recorded && b - a <= 1e-6 * width) {
            coarse_jump = fb - fa;
            coarse_recorded = true;
        }
    }
    double fine_jump = fb - fa;
    c.residual = fine_jump;
    c.location = 0.5 * (a + b);
    c.pass = fine_jump <= 1e-9 || fine_jump <= tol.atom_decay * coarse_jump;
    return c;
}

CheckResult support_below(double upper, double reservation, double cap,
                          const VerifyTolerances& tol) {
    double bound = std::min(reservation, cap);
    CheckResult c{"support-below-reservation", upper - bound, upper, tol.support, false};
    c.pass = c.residual <= tol.support * std::max(1.0, std::abs(bound));
    return c;
}

double cap_of(const SurplusMap& m, Regime regime) {
    return regime == Regime::two_part ? m.v0() : m.pi_m();
}

} // namespace

bool VerificationReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* VerificationReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::vector<std::string> VerificationReport::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
        if (!c.pass) out.push_back(c.name);
    }
    return out;
}

VerifyTolerances VerifyTolerances::scaled(double factor) const {
    VerifyTolerances t = *this;
    t.equal_profit *= factor;
    t.deviation_gain *= factor;
    t.reservation *= factor;
    t.support *= factor;
    t.min_normalized_slope /= factor;
    return t;
}

OfferProfile profile_of(const SequentialEquilibrium& eq) {
    return {[eq](double x) { return eq.cdf_extended(x); }, eq.lower, eq.upper};
}

OfferProfile profile_of(const NoisyEquilibrium& eq) {
    return {[eq](double x) { return eq.cdf_extended(x); }, eq.lower, eq.upper};
}

CheckResult equal_profit_residual(const OfferProfile& f, const MarketParams& params,
                                  const VerifyTolerances& tol) {
    double target = sequential_profit(f.upper, 1.0, params);
    return equal_profit_at(
        sample_grid(f, tol.support_grid), target,
        [&](double x, double cdf) { return sequential_profit(x, cdf, params); }, tol.equal_profit);
}

CheckResult equal_profit_residual(const OfferProfile& f, const NoisyParams& params,
                                  const VerifyTolerances& tol) {
    double target = params.mu_at(1) * f.upper;
    return equal_profit_at(
        sample_grid(f, tol.support_grid), target,
        [&](double x, double cdf) { return noisy_profit(x, cdf, params); }, tol.equal_profit);
}

CheckResult equal_profit_residual(const SequentialEquilibrium& eq, const VerifyTolerances& tol) {
    return equal_profit_residual(profile_of(eq), eq.params, tol);
}

CheckResult equal_profit_residual(const NoisyEquilibrium& eq, const VerifyTolerances& tol) {
    return equal_profit_residual(profile_of(eq), eq.params, tol);
}

double fee_equivalent(const DemandCurve& d, double p) {
    return d.surplus_at_price(0.0) - d.surplus_at_price(p);
}

double linear_deviation_profit(const FeeEquilibrium& eq, double p_d) {
    const DemandCurve& d = eq.surplus.demand();
    const MarketParams& params = eq.params;
    double tau = fee_equivalent(d, p_d);
    double share = params.lambda * std::pow(1.0 - eq.cdf_extended(tau), params.n - 1);
    if (tau <= eq.reservation * (1.0 + 1e-12)) {
        share += (1.0 - params.lambda) / params.n;
    }
    return share * d.quantity(p_d) * p_d;
}

DeviationScan linear_deviation_scan(const FeeEquilibrium& eq, const MarketParams& params,
                                    const SurplusMap& m, const VerifyTolerances& tol) {
    if (eq.regime != Regime::two_part) {
        throw ParameterMismatch("linear deviation scan needs a two-part tariff equilibrium");
    }
    if (!(eq.params == params) || !(eq.surplus == m)) {
        throw ParameterMismatch("equilibrium solved under different inputs");
    }
    const DemandCurve& d = m.demand();
    const double choke = d.choke_price();
    const int n = tol.deviation_grid;
    const double dp = choke / (n + 1);

    DeviationScan scan;
    scan.equilibrium_profit = eq.per_firm_profit;
    scan.max_gain = -std::numeric_limits<double>::infinity();

    auto foc = [&](double p) {
        double q = d.quantity(p);
        return d.slope(p) * p + q - q * q * p / fee_equivalent(d, p);
    };
    double prev_p = 0.0;
    double prev_foc = 0.0;
    for (int i = 1; i <= n; ++i) {
        double p = dp * i;
        double gain = linear_deviation_profit(eq, p) - eq.per_firm_profit;
        if (gain > scan.max_gain) {
            scan.max_gain = gain;
            scan.argmax_price = p;
        }
        double f = foc(p);
        if (i > 1 && (f > 0) != (prev_foc > 0)) {
            scan.foc_root = numerics::find_root(foc, prev_p, p);
            scan.foc_root_interior = true;
        }
        prev_p = p;
        prev_foc = f;
    }
    scan.foc_root_below_monopoly = scan.foc_root < m.p_m();

    double tau_before = fee_equivalent(d, std::max(0.0, scan.argmax_price - dp));
    bool in_zero_region = tau_before <= eq.lower;
    bool at_foc = scan.foc_root_interior && std::abs(scan.argmax_price - scan.foc_root) <= dp;
    scan.argmax_consistent = in_zero_region || at_foc;

    scan.check = {"linear-deviation", scan.max_gain, scan.argmax_price, tol.deviation_gain,
                  scan.max_gain <= tol.deviation_gain};
    return scan;
}

namespace {

// By parts, ∫ (-phi'(x)) (1 - F(x))^j dx over the support equals
// phi(lower) - E[phi(min of j draws)], with phi(x) = -x for fees and v(x)
// for revenues. The expectation is taken over the quantile level.
template <class Eq>
double survival_moment(const Eq& eq, int j) {
    const SurplusMap& m = eq.surplus;
    auto phi = [&](double x) { return eq.regime == Regime::two_part ? -x : m.v(x); };
    if (j == 0) return phi(eq.lower) - phi(eq.upper);
    auto integrand = [&](double u) { return phi(eq.quantile(u)) * j * std::pow(1.0 - u, j - 1); };
    return phi(eq.lower) - numerics::integrate_gauss_graded(integrand, 0.0, 1.0);
}

} // namespace

double independent_benefit(const SequentialEquilibrium& eq) {
    // ∫ w F = ∫ w - ∫ w (1 - F)
    return survival_moment(eq, 0) - survival_moment(eq, 1);
}

double independent_benefit(const NoisyEquilibrium& eq) {
    double total = 0.0;
    for (int k = 1; k <= eq.params.m(); ++k) {
        if (eq.params.mu_at(k) > 0.0) total += eq.params.mu_at(k) * survival_moment(eq, k - 1);
    }
    return total;
}

namespace {

template <class Eq>
CheckResult reservation_consistency_impl(const Eq& eq, double s, const VerifyTolerances& tol) {
    if (eq.boundary) {
        throw DomainError("reservation consistency needs an interior equilibrium");
    }
    double r = std::abs(independent_benefit(eq) - s);
    return {"reservation-consistency", r, eq.reservation, tol.reservation, r <= tol.reservation};
}

template <class Eq>
CheckResult reservation_bound_impl(const Eq& eq, double s, const VerifyTolerances& tol) {
    double r = independent_benefit(eq) - s;
    return {"reservation-bound", r, eq.upper, tol.reservation, r <= tol.reservation};
}

} // namespace

CheckResult reservation_consistency(const SequentialEquilibrium& eq, const VerifyTolerances& tol) {
    return reservation_consistency_impl(eq, eq.params.s, tol);
}

CheckResult reservation_consistency(const NoisyEquilibrium& eq, const VerifyTolerances& tol) {
    return reservation_consistency_impl(eq, eq.params.s, tol);
}

CheckResult reservation_bound(const SequentialEquilibrium& eq, const VerifyTolerances& tol) {
    return reservation_bound_impl(eq, eq.params.s, tol);
}

CheckResult reservation_bound(const NoisyEquilibrium& eq, const VerifyTolerances& tol) {
    return reservation_bound_impl(eq, eq.params.s, tol);
}

std::vector<CheckResult> structure_checks(const OfferProfile& f, double reservation, double cap,
                                          const VerifyTolerances& tol) {
    return {no_flat_region(f, tol), no_atom(f, tol), support_below(f.upper, reservation, cap, tol)};
}

VerificationReport certify(const SequentialEquilibrium& eq, const VerifyTolerances& tol) {
    VerificationReport report;
    report.add(equal_profit_residual(eq, tol));
    report.add(eq.boundary ? reservation_bound(eq, tol) : reservation_consistency(eq, tol));
    for (auto& c : structure_checks(profile_of(eq), eq.reservation, cap_of(eq.surplus, eq.regime), tol)) {
        report.add(std::move(c));
    }
    if (eq.regime == Regime::two_part) {
        report.add(linear_deviation_scan(eq, eq.params, eq.surplus, tol).check);
    }
    return report;
}

VerificationReport certify(const NoisyEquilibrium& eq, const VerifyTolerances& tol) {
    VerificationReport report;
    report.add(equal_profit_residual(eq, tol));
    report.add(eq.boundary ? reservation_bound(eq, tol) : reservation_consistency(eq, tol));
    for (auto& c : structure_checks(profile_of(eq), eq.reservation, cap_of(eq.surplus, eq.regime), tol)) {
        report.add(std::move(c));
    }
    return report;
}

TabulatedCdf::TabulatedCdf(std::vector<double> x, std::vector<double> cdf)
    : x_(std::move(x)), cdf_(std::move(cdf)) {
    if (x_.size() != cdf_.size() || x_.size() < 2) {
        throw DomainError("CDF table needs at least two (x, cdf) rows");
    }
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (!std::isfinite(x_[i]) || !std::isfinite(cdf_[i])) {
            throw DomainError("CDF table has non-finite entries at row " + std::to_string(i + 1));
        }
        if (cdf_[i] < 0.0 || cdf_[i] > 1.0) {
            throw DomainError("CDF value outside [0, 1] at row " + std::to_string(i + 1));
        }
        if (i > 0 && !(x_[i] > x_[i - 1])) {
            throw DomainError("x must be strictly increasing at row " + std::to_string(i + 1));
        }
        if (i > 0 && cdf_[i] < cdf_[i - 1]) {
            throw DomainError("CDF decreases at row " + std::to_string(i + 1));
        }
    }
}

double TabulatedCdf::operator()(double x) const {
    if (x <= x_.front()) return cdf_.front();
    if (x >= x_.back()) return cdf_.back();
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - x_.begin());
    std::size_t lo = hi - 1;
    double w = (x - x_[lo]) / (x_[hi] - x_[lo]);
    return cdf_[lo] + w * (cdf_[hi] - cdf_[lo]);
}

OfferProfile TabulatedCdf::profile() const {
    return {[table = *this](double x) { return table(x); }, lower(), upper()};
}

namespace {

template <class Profit>
VerificationReport certify_table_impl(const TabulatedCdf& table, double target, Profit&& profit,
                                      const VerifyTolerances& tol) {
    VerificationReport report;
    double end_gap = std::max(std::abs(table.values().front()), std::abs(1.0 - table.values().back()));
    report.add({"cdf-endpoints", end_gap, end_gap == std::abs(table.values().front()) ? table.lower() : table.upper(),
                1e-9, end_gap <= 1e-9});
    std::vector<std::pair<double, double>> nodes;
    for (std::size_t i = 0; i < table.x().size(); ++i) nodes.emplace_back(table.x()[i], table.values()[i]);
    report.add(equal_profit_at(nodes, target, profit, tol.equal_profit));
    OfferProfile f = table.profile();
    report.add(no_flat_region(f, tol));
    report.add(no_atom(f, tol));
    return report;
}

} // namespace

VerificationReport certify_table(const TabulatedCdf& table, const MarketParams& params,
                                 const VerifyTolerances& tol) {
    double target = sequential_profit(table.upper(), 1.0, params);
    return certify_table_impl(
        table, target, [&](double x, double cdf) { return sequential_profit(x, cdf, params); }, tol);
}

VerificationReport certify_table(const TabulatedCdf& table, const NoisyParams& params,
                                 const VerifyTolerances& tol) {
    double target = params.mu_at(1) * table.upper();
    return certify_table_impl(
        table, target, [&](double x, double cdf) { return noisy_profit(x, cdf, params); }, tol);
}

} // namespace searcheq
