#include <doctest.h>

#include <cmath>

#include "searcheq/errors.hpp"
#include "searcheq/welfare.hpp"
#include "oracles.hpp"

using namespace searcheq;

namespace {

SurplusMap linear_map() { return SurplusMap(make_demand(DemandFamily::linear, {1.0, 1.0})); }

// lambda = 0.5, n = 2, s = 0.1, q = 1 - p
constexpr double kNonlinearCs = 0.3890599475199855;
constexpr double kLinearCs = 0.4051309860989405;
constexpr double kLinearTs = 0.49423481410538356;
constexpr double kSurplusAtUpper = 0.2948666388762937;

// noisy mu = (0.5, 0.5), s = 0.1
constexpr double kNoisyProfitNonlinear = 0.1132965412608519;
constexpr double kNoisyProfitLinear = 0.09358737431194813;
constexpr double kNoisyCsNonlinear = 0.38670345873914813;
constexpr double kNoisyCsLinear = 0.3999258529683183;

} // namespace

TEST_CASE("expected minimum against the u-space oracle") {
    MarketParams p{2, 0.5, 0.1};
    oracle::Seq o{2, 0.5};
    auto cdf = [&](double x) { return x <= 0.5 / 3.0 ? 0.0 : x >= 0.5 ? 1.0 : sequential_cdf(x, 0.5, p); };
    CHECK(expected_min(cdf, 0.5 / 3.0, 0.5, 1) == doctest::Approx(0.27465307216702745).epsilon(1e-9));
    CHECK(expected_min(cdf, 0.5 / 3.0, 0.5, 2) == doctest::Approx(0.22534692783297255).epsilon(1e-9));
    CHECK(expected_min(cdf, 0.5 / 3.0, 0.5, 1) == doctest::Approx(oracle::seq_expected_min(0.5, o, 1)).epsilon(1e-9));
    CHECK(expected_min(cdf, 0.3, 0.3, 3) == 0.3);
    CHECK_THROWS_AS(expected_min(cdf, 0.5, 0.1, 1), DomainError);
    CHECK_THROWS_AS(expected_min(cdf, 0.1, 0.5, 0), DomainError);
}

TEST_CASE("sequential welfare comparison") {
    auto m = linear_map();
    MarketParams p{2, 0.5, 0.1};
    auto fee = solve_two_part(p, m);
    auto rev = solve_linear(p, m);
    auto w = welfare_sequential(fee, rev, p, m);
    CHECK(w.nonlinear.consumer_surplus == doctest::Approx(kNonlinearCs).epsilon(1e-10));
    CHECK(w.linear.consumer_surplus == doctest::Approx(kLinearCs).epsilon(1e-10));
    CHECK(w.linear.total_surplus == doctest::Approx(kLinearTs).epsilon(1e-10));
    oracle::Seq o{2, 0.5};
    double oracle_cs = 0.5 * oracle::seq_expected_v_of_min_linear_demand(rev.upper, o, 2) +
                       0.5 * oracle::seq_expected_v_of_min_linear_demand(rev.upper, o, 1);
    CHECK(std::abs(w.linear.consumer_surplus - oracle_cs) <= 1e-9);
    CHECK(w.nonlinear.industry_profit == doctest::Approx((1 - p.lambda) * fee.upper).epsilon(1e-10));
    CHECK(w.nonlinear.industry_profit == doctest::Approx(fee.industry_profit()).epsilon(1e-10));
    CHECK(w.delta().total_surplus > 0.0);
    CHECK(w.delta().industry_profit > 0.0);
    CHECK(w.delta().consumer_surplus < 0.0);

    auto bounds = cs_bound_checks(fee, rev, p, m);
    CHECK(m.v(rev.upper) == doctest::Approx(kSurplusAtUpper).epsilon(1e-10));
    CHECK(bounds.surplus_gap >= 0.0);
    CHECK(bounds.linear_cs_bound >= 0.0);
    CHECK(bounds.support_ratio_gap <= 1e-10);
}

TEST_CASE("welfare rejects mismatched equilibria") {
    auto m = linear_map();
    MarketParams p{2, 0.5, 0.1};
    auto fee = solve_two_part(p, m);
    auto other = solve_linear({3, 0.5, 0.1}, m);
    CHECK_THROWS_AS(welfare_sequential(fee, other, p, m), ParameterMismatch);
    CHECK_THROWS_AS(welfare_sequential(fee, fee, p, m), ParameterMismatch);
    SurplusMap quad(make_demand(DemandFamily::quadratic, {1.0, 1.0}));
    CHECK_THROWS_AS(welfare_sequential(fee, solve_linear(p, quad), p, m), ParameterMismatch);
}

TEST_CASE("noisy welfare comparison") {
    auto m = linear_map();
    NoisyParams p{{0.5, 0.5}, 0.1};
    auto fee = solve_noisy_two_part(p, m);
    auto rev = solve_noisy_linear(p, m);
    auto w = welfare_noisy(fee, rev, p, m);
    CHECK(w.nonlinear.industry_profit == doctest::Approx(kNoisyProfitNonlinear).epsilon(1e-10));
    CHECK(w.linear.industry_profit == doctest::Approx(kNoisyProfitLinear).epsilon(1e-10));
    CHECK(w.nonlinear.consumer_surplus == doctest::Approx(kNoisyCsNonlinear).epsilon(1e-10));
    CHECK(w.linear.consumer_surplus == doctest::Approx(kNoisyCsLinear).epsilon(1e-10));
    CHECK(w.nonlinear.industry_profit == doctest::Approx(oracle::noisy_expected_paid(fee.upper, p.mu)).epsilon(1e-9));
    // industry revenue equals mu(1) times the upper support
    CHECK(w.nonlinear.industry_profit == doctest::Approx(fee.industry_profit()).epsilon(1e-9));
    CHECK(w.linear.industry_profit == doctest::Approx(rev.industry_profit()).epsilon(1e-9));
    auto boundary = solve_noisy_two_part({{0.5, 0.5}, 0.3}, m);
    auto boundary_rev = solve_noisy_linear({{0.5, 0.5}, 0.3}, m);
    auto wb = welfare_noisy(boundary, boundary_rev, {{0.5, 0.5}, 0.3}, m);
    CHECK(wb.nonlinear.industry_profit == doctest::Approx(0.25).epsilon(1e-9));
}
