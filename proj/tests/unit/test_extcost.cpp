#include <doctest.h>

#include <cmath>

#include "searcheq/errors.hpp"
#include "searcheq/extcost.hpp"
#include "oracles.hpp"

using namespace searcheq;

namespace {

SurplusMap linear_map() { return SurplusMap(make_demand(DemandFamily::linear, {1.0, 1.0})); }

// g0 = 4, q = 1 - p
constexpr double kPiStar = 0.1761005643694788;
constexpr double kSurplusAtPiStar = 0.29787197098827967;
constexpr double kLinearTotalSurplus = 0.47397253535775846;

} // namespace

TEST_CASE("t* is 1/g0 and pi* solves its first-order condition") {
    auto m = linear_map();
    auto g = SearchCostDist::make(CostFamily::uniform, {0.25});
    CHECK(g.g0() == 4.0);
    auto t = solve_t_star(g, m);
    CHECK(t.value == 0.25);
    CHECK_FALSE(t.clamped);
    CHECK(t.argmax_gain <= 1e-12);
    auto pi = solve_pi_star(g, m);
    CHECK(std::abs(pi.value - kPiStar) <= 1e-10);
    CHECK(std::abs(pi.value - oracle::lin_pi_star(4.0)) <= 1e-10);
    CHECK(std::abs(pi.value * -m.v_prime(pi.value) - 0.25) <= 1e-10);
    CHECK(pi.argmax_gain <= 1e-8);
    CHECK(pi.value < t.value);
    auto w = welfare_cont(g, m);
    CHECK(w.linear.consumer_surplus == doctest::Approx(kSurplusAtPiStar).epsilon(1e-10));
    CHECK(w.linear.total_surplus == doctest::Approx(kLinearTotalSurplus).epsilon(1e-10));
    CHECK(w.nonlinear.consumer_surplus == doctest::Approx(0.25));
}

TEST_CASE("fixed-point iteration reaches the closed-form stars") {
    auto m = linear_map();
    for (auto [family, params] : {std::pair{CostFamily::uniform, std::vector<double>{0.2}},
                                  std::pair{CostFamily::exponential, std::vector<double>{8.0}}}) {
        auto g = SearchCostDist::make(family, params);
        CHECK(t_star_by_iteration(g, m) == doctest::Approx(solve_t_star(g, m).value).epsilon(1e-6));
        CHECK(pi_star_by_iteration(g, m) == doctest::Approx(solve_pi_star(g, m).value).epsilon(1e-6));
    }
}

TEST_CASE("t* is clamped at v(0) when search costs are dispersed") {
    auto m = linear_map();
    auto g = SearchCostDist::make(CostFamily::uniform, {2.0}); // g0 = 0.5 < 1/v(0)
    auto t = solve_t_star(g, m);
    CHECK(t.clamped);
    CHECK(t.value == m.v0());
    CHECK_THROWS_AS(cs_slope_check(g, m), DomainError);
    auto edge = SearchCostDist::make(CostFamily::uniform, {0.5}); // g0 = 1/v(0)
    CHECK(welfare_cont(edge, m).nonlinear.consumer_surplus == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("consumer-surplus slopes in g0 match their closed forms") {
    for (auto [family, params] : {std::pair{DemandFamily::linear, std::vector<double>{1.0, 1.0}},
                                  std::pair{DemandFamily::quadratic, std::vector<double>{1.0, 1.0}}}) {
        SurplusMap m(make_demand(family, params));
        for (double g0 : {2.5, 4.0, 8.0, 16.0}) {
            auto g = SearchCostDist::make(CostFamily::uniform, {1.0 / g0});
            auto r = cs_slope_check(g, m);
            CHECK(r.residual_linear <= 1e-4);
            CHECK(r.residual_nonlinear <= 1e-4);
            CHECK(r.linear_rises_slower);
        }
    }
}

TEST_CASE("truncated normal costs and validation") {
    auto g = SearchCostDist::make(CostFamily::truncated_normal, {0.1, 0.2});
    CHECK(g.g0() > 0.0);
    CHECK(g.cdf(0.0) == 0.0);
    CHECK(g.cdf(10.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(SearchCostDist::make(CostFamily::uniform, {0.0}), InvalidParameter);
    CHECK_THROWS_AS(SearchCostDist::make(CostFamily::exponential, {-1.0}), InvalidParameter);
    CHECK_THROWS_AS(parse_cost_family("pareto"), InvalidParameter);
}
