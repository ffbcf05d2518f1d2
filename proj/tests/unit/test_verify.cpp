#include <doctest.h>

#include <cmath>

#include "searcheq/errors.hpp"
#include "searcheq/verify.hpp"

using namespace searcheq;

namespace {

SurplusMap linear_map() { return SurplusMap(make_demand(DemandFamily::linear, {1.0, 1.0})); }

TabulatedCdf table_of(const SequentialEquilibrium& eq, int rows = 512) {
    std::vector<double> x, f;
    for (int i = 0; i < rows; ++i) {
        double t = i + 1 == rows ? eq.upper : eq.lower + (eq.upper - eq.lower) * i / (rows - 1);
        x.push_back(t);
        f.push_back(eq.cdf_extended(t));
    }
    return TabulatedCdf(x, f);
}

} // namespace

TEST_CASE("solved equilibria pass every check") {
    auto m = linear_map();
    for (MarketParams p : {MarketParams{2, 0.5, 0.1}, MarketParams{5, 0.2, 0.02}, MarketParams{3, 0.7, 0.4}}) {
        for (const auto& eq : {solve_two_part(p, m), solve_linear(p, m)}) {
            auto report = certify(eq);
            CHECK(report.pass());
            CHECK(report.find("equal-profit")->residual <= 1e-8);
            CHECK(report.find("no-flat-region") != nullptr);
            CHECK(report.find("no-atom") != nullptr);
            CHECK(report.find(eq.boundary ? "reservation-bound" : "reservation-consistency") != nullptr);
        }
    }
    auto noisy = solve_noisy_linear({{0.2, 0.5, 0.3}, 0.05}, m);
    CHECK(certify(noisy).pass());
}

TEST_CASE("linear deviations against the two-part equilibrium are unprofitable") {
    auto m = linear_map();
    MarketParams p{2, 0.5, 0.1};
    auto fee = solve_two_part(p, m);
    auto scan = linear_deviation_scan(fee, p, m);
    CHECK(scan.max_gain <= 1e-9);
    CHECK(scan.foc_root_below_monopoly);
    CHECK(scan.argmax_consistent);
    CHECK(linear_deviation_profit(fee, 0.0) == 0.0);
    CHECK_THROWS_AS(linear_deviation_scan(solve_linear(p, m), p, m), ParameterMismatch);
    CHECK_THROWS_AS(linear_deviation_scan(fee, {3, 0.5, 0.1}, m), ParameterMismatch);
}

TEST_CASE("fee equivalent of a linear price") {
    auto d = make_demand(DemandFamily::linear, {1.0, 1.0});
    for (double p : {0.1, 0.3, 0.7}) CHECK(fee_equivalent(d, p) == doctest::Approx(p - 0.5 * p * p));
}

TEST_CASE("independent benefit agrees with the solver's quadrature") {
    auto m = linear_map();
    MarketParams p{4, 0.4, 0.05};
    auto fee = solve_two_part(p, m);
    auto rev = solve_linear(p, m);
    CHECK(std::abs(independent_benefit(fee) - fee_benefit(fee.reservation, p)) <= 1e-8);
    CHECK(std::abs(independent_benefit(rev) - revenue_benefit(rev.reservation, p, m)) <= 1e-8);
    auto boundary = solve_two_part({2, 0.5, 0.4}, m);
    CHECK_THROWS_AS(reservation_consistency(boundary), DomainError);
    CHECK(reservation_bound(boundary).pass);
}

TEST_CASE("counterexample profiles fail the named checks") {
    auto m = linear_map();
    MarketParams p{2, 0.5, 0.1};
    auto eq = solve_two_part(p, m);
    double lo = eq.lower, hi = eq.upper, mid = 0.5 * (lo + hi);

    SUBCASE("atom") {
        OfferProfile f{[&](double x) {
                           double base = (x - lo) / (hi - lo) * 0.9;
                           return x >= mid ? base + 0.1 : base;
                       },
                       lo, hi};
        auto checks = structure_checks(f, eq.reservation, m.v0());
        CHECK_FALSE(checks[1].pass);
        CHECK(checks[1].name == "no-atom");
        CHECK(checks[0].pass);
    }
    SUBCASE("flat region") {
        OfferProfile f{[&](double x) {
                           double a = lo + 0.4 * (hi - lo), b = lo + 0.6 * (hi - lo);
                           double y = x < a ? x : x < b ? a : x - (b - a);
                           return (y - lo) / (hi - lo - (b - a));
                       },
                       lo, hi};
        auto checks = structure_checks(f, eq.reservation, m.v0());
        CHECK_FALSE(checks[0].pass);
        CHECK(checks[0].name == "no-flat-region");
    }
    SUBCASE("support beyond the reservation fee") {
        auto checks = structure_checks(profile_of(eq), eq.reservation * 0.9, m.v0());
        CHECK_FALSE(checks[2].pass);
    }
    SUBCASE("uniform profile violates equal profit") {
        OfferProfile f{[&](double x) { return (x - lo) / (hi - lo); }, lo, hi};
        CHECK_FALSE(equal_profit_residual(f, p).pass);
    }
}

TEST_CASE("tabulated solver output certifies; perturbed tables do not") {
    auto m = linear_map();
    MarketParams p{3, 0.4, 0.08};
    auto eq = solve_two_part(p, m);
    auto table = table_of(eq);
    CHECK(certify_table(table, p).pass());
    CHECK(table(eq.lower) == 0.0);
    CHECK(table(eq.upper) == 1.0);
    CHECK_FALSE(certify_table(table, MarketParams{3, 0.5, 0.08}).pass());

    auto x = table.x();
    auto f = table.values();
    for (std::size_t i = 200; i <= 260; ++i) f[i] = f[200];
    auto report = certify_table(TabulatedCdf(x, f), p);
    CHECK_FALSE(report.pass());
    CHECK(!report.find("no-flat-region")->pass);
}

TEST_CASE("malformed tables are rejected") {
    CHECK_THROWS_AS(TabulatedCdf({0.1}, {0.0}), DomainError);
    CHECK_THROWS_AS(TabulatedCdf({0.1, 0.1}, {0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(TabulatedCdf({0.1, 0.2}, {0.0, 1.01}), DomainError);
    CHECK_THROWS_AS(TabulatedCdf({0.1, 0.2, 0.3}, {0.0, 0.6, 0.5}), DomainError);
    CHECK_THROWS_AS(TabulatedCdf({0.1, 0.2}, {0.0, std::nan("")}), DomainError);
}

TEST_CASE("tolerance scaling loosens every tolerance") {
    VerifyTolerances t;
    auto s = t.scaled(10.0);
    CHECK(s.equal_profit == doctest::Approx(1e-7));
    CHECK(s.deviation_gain == doctest::Approx(1e-8));
    CHECK(s.min_normalized_slope == doctest::Approx(1e-7));
}
