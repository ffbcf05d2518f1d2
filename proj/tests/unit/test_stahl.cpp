#include <doctest.h>

#include <cmath>

#include "searcheq/errors.hpp"
#include "searcheq/stahl.hpp"
#include "oracles.hpp"

using namespace searcheq;

namespace {

SurplusMap linear_map() { return SurplusMap(make_demand(DemandFamily::linear, {1.0, 1.0})); }

// Frozen from the u-space oracle (see oracles.hpp), lambda = 0.5, n = 2, q = 1 - p.
constexpr double kFeeCutoff = 0.22534692783297255;
constexpr double kFeeReservation = 0.22188010496002888; // s = 0.1
constexpr double kRevenueCutoff = 0.21924597045856611;
constexpr double kRevenueReservation = 0.10093792444784137; // s = 0.05
constexpr double kRevenueUpper = 0.1782076560128861;        // s = 0.1

} // namespace

TEST_CASE("two-part cutoff and reservation fee match closed forms") {
    auto m = linear_map();
    auto eq = solve_two_part({2, 0.5, 0.1}, m);
    CHECK(std::abs(eq.s_bar - 0.5 * (1.0 - 0.5 * std::log(3.0))) <= 1e-9);
    CHECK(std::abs(eq.s_bar - kFeeCutoff) <= 1e-9);
    CHECK(std::abs(eq.reservation - kFeeReservation) <= 1e-9);
    CHECK(std::abs(eq.reservation - 0.1 / (1.0 - 0.5 * std::log(3.0))) <= 1e-9);
    CHECK_FALSE(eq.boundary);
    CHECK(eq.lower == doctest::Approx(eq.upper / 3.0).epsilon(1e-14));
    CHECK(eq.per_firm_profit == doctest::Approx(0.25 * eq.upper).epsilon(1e-14));
    CHECK(eq.unit_price() == 0.0);
}

TEST_CASE("two-part boundary regime pins the upper support at v(0)") {
    auto eq = solve_two_part({2, 0.5, 0.3}, linear_map());
    CHECK(eq.boundary);
    CHECK(eq.upper == 0.5);
    CHECK(eq.reservation == 0.5);
    CHECK(eq.industry_profit() == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("linear-price cutoff and reservation revenue match the oracle") {
    auto m = linear_map();
    MarketParams p{2, 0.5, 0.05};
    auto eq = solve_linear(p, m);
    CHECK(std::abs(eq.s_bar - kRevenueCutoff) <= 1e-9);
    CHECK(std::abs(eq.reservation - kRevenueReservation) <= 1e-9);
    oracle::Seq o{2, 0.5};
    double oracle_res = oracle::seq_reservation(
        [&](double r) { return oracle::seq_revenue_benefit_linear_demand(r, o); }, 0.25 * (1 - 1e-12), 0.05);
    CHECK(std::abs(eq.reservation - oracle_res) <= 1e-9);
    CHECK(std::abs(solve_linear({2, 0.5, 0.1}, m).upper - kRevenueUpper) <= 1e-9);
    auto boundary = solve_linear({2, 0.5, 0.3}, m);
    CHECK(boundary.boundary);
    CHECK(boundary.upper == m.pi_m());
}

TEST_CASE("both regimes share the support ratio") {
    auto m = linear_map();
    for (MarketParams p : {MarketParams{2, 0.5, 0.1}, MarketParams{5, 0.3, 0.05}, MarketParams{10, 0.9, 0.01}}) {
        auto fee = solve_two_part(p, m);
        auto rev = solve_linear(p, m);
        CHECK(std::abs(fee.upper / fee.lower - rev.upper / rev.lower) <= 1e-10);
        CHECK(fee.lower / fee.upper == doctest::Approx(p.support_ratio()));
    }
}

TEST_CASE("sequential cdf and quantile are inverse and hit the support ends") {
    MarketParams p{3, 0.4, 0.1};
    double upper = 0.2;
    double lower = upper * p.support_ratio();
    CHECK(sequential_quantile(0.0, upper, p) == doctest::Approx(lower).epsilon(1e-15));
    CHECK(sequential_quantile(1.0, upper, p) == upper);
    CHECK(sequential_cdf(lower, upper, p) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(sequential_cdf(upper, upper, p) == 1.0);
    for (int i = 1; i < 100; ++i) {
        double u = i / 100.0;
        CHECK(sequential_cdf(sequential_quantile(u, upper, p), upper, p) == doctest::Approx(u).epsilon(1e-12));
        oracle::Seq o{3, 0.4};
        CHECK(sequential_quantile(u, upper, p) == doctest::Approx(oracle::seq_quantile(u, upper, o)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(sequential_cdf(upper * 1.01, upper, p), DomainError);
    CHECK_THROWS_AS(sequential_cdf(lower * 0.99, upper, p), DomainError);
}

TEST_CASE("parameter validation names the violated bound") {
    auto m = linear_map();
    auto message = [&](MarketParams p) {
        try {
            solve_two_part(p, m);
        } catch (const InvalidParameter& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message({2, 1.0, 0.1}).find("lambda") != std::string::npos);
    CHECK(message({2, 0.0, 0.1}).find("lambda") != std::string::npos);
    CHECK(message({1, 0.5, 0.1}).find("n") != std::string::npos);
    CHECK(message({2, 0.5, 0.0}).find("s") != std::string::npos);
    CHECK(message({2, 0.5, std::nan("")}).find("s") != std::string::npos);
}

TEST_CASE("near-competitive markets keep a defined equilibrium") {
    auto eq = solve_two_part({2, 1.0 - 1e-9, 0.1}, linear_map());
    CHECK(eq.industry_profit() < 1e-8);
    CHECK(eq.industry_profit() > 0.0);
}

TEST_CASE("property: reservation value rises with the search cost") {
    auto m = SurplusMap(make_demand(DemandFamily::quadratic, {1.0, 1.0}));
    for (int n : {2, 4}) {
        for (double lambda : {0.2, 0.7}) {
            double prev_fee = 0.0;
            double prev_rev = 0.0;
            for (int k = 1; k <= 8; ++k) {
                MarketParams p{n, lambda, 0.03 * k};
                auto fee = solve_two_part(p, m);
                auto rev = solve_linear(p, m);
                CHECK(fee.reservation >= prev_fee);
                CHECK(rev.reservation >= prev_rev);
                CHECK(fee.upper > rev.upper);
                prev_fee = fee.reservation;
                prev_rev = rev.reservation;
            }
        }
    }
}

TEST_CASE("very small search costs are not bracketed by the reservation search") {
    CHECK_THROWS_AS(solve_two_part({2, 0.5, 1e-300}, linear_map()), SolveFailure);
}
